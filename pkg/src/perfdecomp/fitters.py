"""Model library for the hybrid decomposition steps.

Trend models (linear, piecewise linear, LOESS, moving average) and cyclic
models (sinusoidal regression on a period grid, additive Holt-Winters
exponential smoothing), plus extrapolation of fitted models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NonExtrapolableError, ValidationError
from .model import FittedModel

PERIOD_GRID_STEP = 1.02  # multiplicative; resolves ~2% period differences
HWES_GRID = np.round(np.arange(0.01, 1.0, 0.02), 8)


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    sse: float
    fitted: np.ndarray

    def to_model(self) -> FittedModel:
        return FittedModel("linear", {"slope": self.slope, "intercept": self.intercept})


@dataclass(frozen=True)
class PiecewiseLinearFit:
    breakpoints: tuple  # interior indices, 0..2 of them
    slopes: tuple
    intercepts: tuple  # intercepts in global t coordinates
    sse: float
    fitted: np.ndarray

    def to_model(self) -> FittedModel:
        return FittedModel(
            "piecewise_linear",
            {
                "breakpoints": list(self.breakpoints),
                "slopes": list(self.slopes),
                "intercepts": list(self.intercepts),
            },
        )


@dataclass(frozen=True)
class SinusoidFit:
    amplitude: float
    period: float
    phase: float
    offset: float
    sse: float
    fitted: np.ndarray

    def to_model(self) -> FittedModel:
        return FittedModel(
            "sinusoid",
            {
                "amplitude": self.amplitude,
                "period": self.period,
                "phase": self.phase,
                "offset": self.offset,
            },
        )


@dataclass(frozen=True)
class HwesFit:
    alpha: float
    beta: float
    gamma: float
    period: int
    level: float  # final states, ready for forecasting
    trend: float
    seasonals: np.ndarray  # indexed by phase t mod period
    train_length: int
    sse: float
    fitted: np.ndarray

    def to_model(self) -> FittedModel:
        return FittedModel(
            "hwes",
            {
                "alpha": self.alpha,
                "beta": self.beta,
                "gamma": self.gamma,
                "period": self.period,
                "level": self.level,
                "trend": self.trend,
                "seasonals": list(self.seasonals),
                "train_length": self.train_length,
            },
        )


def fit_linear(series) -> LinearFit:
    """Ordinary least squares over t = 0..n-1."""
    y = np.asarray(series, dtype=np.float64)
    n = len(y)
    if n < 3:
        raise ValidationError("linear fit needs at least 3 points")
    t = np.arange(n, dtype=np.float64)
    design = np.column_stack([t, np.ones(n)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = slope * t + intercept
    sse = float(np.sum((y - fitted) ** 2))
    return LinearFit(float(slope), float(intercept), sse, fitted)


def _segment_ols(y, t, lo, hi):
    seg_t = t[lo:hi]
    seg_y = y[lo:hi]
    design = np.column_stack([seg_t, np.ones(hi - lo)])
    coef, *_ = np.linalg.lstsq(design, seg_y, rcond=None)
    fitted = design @ coef
    sse = float(np.sum((seg_y - fitted) ** 2))
    return float(coef[0]), float(coef[1]), fitted, sse


def _bic(n: int, sse: float, k: int) -> float:
    return n * math.log(max(sse, 1e-10) / n) + k * math.log(n)


def fit_piecewise_linear(
    series,
    max_segments: int = 3,
    min_segment_len: int = 14,
    stride: int = 7,
) -> PiecewiseLinearFit:
    """Independent per-segment OLS with breakpoints on a stride grid.

    Continuity is not enforced; BIC arbitrates between the best 1-, 2-, and
    3-segment fits (parameter count includes breakpoints).
    """
    y = np.asarray(series, dtype=np.float64)
    n = len(y)
    if max_segments not in (2, 3):
        raise ValidationError("max_segments must be 2 or 3")
    if n < max_segments * min_segment_len:
        raise ValidationError(
            f"need at least {max_segments * min_segment_len} points for "
            f"{max_segments} segments of {min_segment_len}"
        )
    t = np.arange(n, dtype=np.float64)
    grid = list(range(min_segment_len, n - min_segment_len + 1, stride))

    def assemble(breaks):
        bounds = [0, *breaks, n]
        slopes, intercepts, fitted = [], [], np.empty(n)
        sse = 0.0
        for lo, hi in zip(bounds, bounds[1:]):
            s, b, f, e = _segment_ols(y, t, lo, hi)
            slopes.append(s)
            intercepts.append(b)
            fitted[lo:hi] = f
            sse += e
        return tuple(slopes), tuple(intercepts), fitted, sse

    candidates = []
    slopes, intercepts, fitted, sse = assemble(())
    candidates.append(((), slopes, intercepts, fitted, sse, _bic(n, sse, 2)))

    best2 = None
    for b1 in grid:
        slopes, intercepts, fitted, sse = assemble((b1,))
        if best2 is None or sse < best2[4]:
            best2 = ((b1,), slopes, intercepts, fitted, sse, _bic(n, sse, 5))
    if best2 is not None:
        candidates.append(best2)

    if max_segments >= 3:
        best3 = None
        for b1 in grid:
            for b2 in grid:
                if b2 - b1 < min_segment_len:
                    continue
                slopes, intercepts, fitted, sse = assemble((b1, b2))
                if best3 is None or sse < best3[4]:
                    best3 = ((b1, b2), slopes, intercepts, fitted, sse, _bic(n, sse, 8))
        if best3 is not None:
            candidates.append(best3)

    breaks, slopes, intercepts, fitted, sse, _ = min(candidates, key=lambda c: c[5])
    return PiecewiseLinearFit(breaks, slopes, intercepts, sse, fitted)


def default_period_grid(n: int, lo: float = 3.0, hi: float | None = None) -> list:
    """Multiplicative period grid from lo to hi (default n/1.5)."""
    if hi is None:
        hi = n / 1.5
    grid = []
    p = lo
    while p <= hi:
        grid.append(p)
        p *= PERIOD_GRID_STEP
    return grid


def fit_sinusoid(series, period_grid=None) -> SinusoidFit:
    """Grid search over period with linear least squares per candidate.

    Each candidate solves on the basis {sin, cos, 1}; ties break toward the
    smaller period so concurrent evaluation order cannot matter.
    """
    y = np.asarray(series, dtype=np.float64)
    n = len(y)
    if n < 8:
        raise ValidationError("sinusoid fit needs at least 8 points")
    if period_grid is None:
        period_grid = default_period_grid(n)
    periods = sorted(float(p) for p in period_grid)
    if not periods:
        raise ValidationError("empty period grid")
    if periods[0] <= 2 or periods[-1] >= 2 * n:
        raise ValidationError("grid periods must lie in (2, 2n)")
    t = np.arange(n, dtype=np.float64)
    best = None
    for p in periods:
        w = 2.0 * math.pi / p
        design = np.column_stack([np.sin(w * t), np.cos(w * t), np.ones(n)])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        fitted = design @ coef
        sse = float(np.sum((y - fitted) ** 2))
        if best is None or sse < best[0]:
            best = (sse, p, coef, fitted)
    sse, p, (a, b, c), fitted = best
    amplitude = math.hypot(a, b)
    phase = math.atan2(b, a) if amplitude > 0 else 0.0
    return SinusoidFit(float(amplitude), float(p), float(phase), float(c), sse, fitted)


def _hwes_initial_states(y: np.ndarray, m: int):
    first = y[:m]
    second = y[m : 2 * m]
    level0 = float(first.mean())
    trend0 = float((second.mean() - first.mean()) / m)
    seasonal0 = (first - first.mean()).astype(np.float64)
    return level0, trend0, seasonal0


def fit_hwes(series, period: int, optimize: bool = True) -> HwesFit:
    """Additive Holt-Winters with deterministic initial states.

    Initial level/trend come from the first two seasonal blocks; initial
    seasonal indices are the first block's deviations from its mean.  When
    optimize is set, the three smoothing factors are chosen by coordinate
    grid search minimizing one-step-ahead SSE.
    """
    y = np.ascontiguousarray(series, dtype=np.float64)
    n = len(y)
    m = int(period)
    if m < 2:
        raise ValidationError("period must be >= 2")
    if n < 3 * m:
        raise ValidationError(f"need at least {3 * m} points for period {m}")
    level0, trend0, seasonal0 = _hwes_initial_states(y, m)

    alpha, beta, gamma = 0.29, 0.03, 0.29
    if optimize:
        for _ in range(2):  # two coordinate passes
            for coord in range(3):
                best = None
                for v in HWES_GRID:
                    trial = [alpha, beta, gamma]
                    trial[coord] = float(v)
                    sse = _kernels.hwes_sse(
                        y, trial[0], trial[1], trial[2], m, level0, trend0, seasonal0
                    )
                    if best is None or sse < best[0]:
                        best = (sse, float(v))
                if coord == 0:
                    alpha = best[1]
                elif coord == 1:
                    beta = best[1]
                else:
                    gamma = best[1]
    fitted, level, trend, seasonals = _kernels.hwes_filter(
        y, alpha, beta, gamma, m, level0, trend0, seasonal0
    )
    sse = float(np.sum((y - fitted) ** 2))
    return HwesFit(alpha, beta, gamma, m, float(level), float(trend), seasonals, n, sse, fitted)


def loess_smooth(series, span: float) -> np.ndarray:
    """Local linear regression with tricube weights over span·n nearest points."""
    y = np.ascontiguousarray(series, dtype=np.float64)
    n = len(y)
    if not 0.0 < span <= 1.0:
        raise ValidationError("span must be in (0, 1]")
    k = int(math.ceil(span * n))
    if k < 4:
        raise ValidationError(f"window of {k} points is degenerate (need >= 4)")
    return _kernels.loess_fit(y, k)


def moving_average(series, window: int) -> np.ndarray:
    """Centered moving average; windows truncate at the boundaries."""
    y = np.asarray(series, dtype=np.float64)
    n = len(y)
    if not 2 <= window <= n:
        raise ValidationError("window must be in [2, n]")
    half = window // 2
    out = np.empty(n)
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        out[i] = y[lo:hi].mean()
    return out


def forecast_model(model: FittedModel, horizon: int, train_length: int) -> np.ndarray:
    """Extend a fitted model to t = train_length .. train_length+horizon-1."""
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    t = np.arange(train_length, train_length + horizon, dtype=np.float64)
    p = model.params
    if model.family == "linear":
        return p["slope"] * t + p["intercept"]
    if model.family == "piecewise_linear":
        return p["slopes"][-1] * t + p["intercepts"][-1]
    if model.family == "sinusoid":
        w = 2.0 * math.pi / p["period"]
        return p["amplitude"] * np.sin(w * t + p["phase"]) + p["offset"]
    if model.family == "hwes":
        m = int(p["period"])
        seas = np.asarray(p["seasonals"], dtype=np.float64)
        start = int(p.get("train_length", train_length))
        out = np.empty(horizon)
        for h in range(horizon):
            out[h] = p["level"] + (h + 1) * p["trend"] + seas[(start + h) % m]
        return out
    raise NonExtrapolableError(f"model family {model.family!r} cannot extrapolate")
