"""Statistical diagnostics and evaluation metrics.

Autocorrelation, the runs randomness test, MAPE, edit distance with real
penalty (ERP), and mean-crossing period estimation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InsufficientDataError, NoPeriodError, ValidationError, ZeroVarianceError

DEFAULT_ALPHA = 0.05
DEFAULT_ERP_GAP = 0.0


@dataclass(frozen=True)
class AcfResult:
    lags: np.ndarray
    correlations: np.ndarray
    series_length: int

    def white_noise_band(self) -> float:
        """Half-width of the 95% band for a white-noise correlogram."""
        return 1.96 / math.sqrt(self.series_length)


@dataclass(frozen=True)
class RunsVerdict:
    n_runs: int
    n_above: int
    n_below: int
    z_statistic: float
    p_value: float
    random: bool
    degenerate: bool = False


def acf(series, max_lag: int) -> AcfResult:
    """Biased-estimator autocorrelation up to max_lag (full-series denominator)."""
    x = np.asarray(series, dtype=np.float64)
    n = len(x)
    if not 1 <= max_lag < n:
        raise ValidationError(f"max_lag must be in [1, {n - 1}]")
    dev = x - x.mean()
    denom = float(np.dot(dev, dev))
    if denom == 0.0:
        raise ZeroVarianceError("acf undefined on a constant series")
    corr = np.empty(max_lag + 1)
    corr[0] = 1.0
    for k in range(1, max_lag + 1):
        corr[k] = float(np.dot(dev[k:], dev[:-k])) / denom
    return AcfResult(np.arange(max_lag + 1), corr, n)


def _norm_sf(z: float) -> float:
    """Standard normal survival function."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def runs_test(series, alpha: float = DEFAULT_ALPHA) -> RunsVerdict:
    """Wald-Wolfowitz runs test around the median, normal approximation.

    Values equal to the median are dropped before dichotomization.
    """
    x = np.asarray(series, dtype=np.float64)
    if len(x) < 20:
        raise InsufficientDataError("runs test needs at least 20 points")
    if not 0.0 < alpha <= 0.5:
        raise ValidationError("alpha must be in (0, 0.5]")
    med = float(np.median(x))
    signs = np.sign(x - med)
    signs = signs[signs != 0]
    a = int(np.sum(signs > 0))
    b = int(np.sum(signs < 0))
    if a < 10 or b < 10:
        raise InsufficientDataError(
            f"need at least 10 points on each side of the median (got {a}/{b})"
        )
    runs = 1 + int(np.sum(signs[1:] != signs[:-1]))
    ab = a + b
    expected = 2.0 * a * b / ab + 1.0
    variance = 2.0 * a * b * (2.0 * a * b - ab) / (ab * ab * (ab - 1.0))
    z = (runs - expected) / math.sqrt(variance)
    p = 2.0 * _norm_sf(abs(z))
    p = min(p, 1.0)
    return RunsVerdict(runs, a, b, z, p, p >= alpha)


def mape(predicted, actual) -> float:
    """Mean absolute percentage error, in percent."""
    p = np.asarray(predicted, dtype=np.float64)
    a = np.asarray(actual, dtype=np.float64)
    if p.shape != a.shape or p.size == 0:
        raise ValidationError("predicted and actual must be equal-length, non-empty")
    if np.any(a == 0.0):
        raise ZeroDivisionError("MAPE undefined when an actual value is 0")
    return float(100.0 * np.mean(np.abs(p - a) / np.abs(a)))


def erp(predicted, actual, gap: float = DEFAULT_ERP_GAP) -> float:
    """Raw ERP alignment distance between two series."""
    p = np.ascontiguousarray(predicted, dtype=np.float64)
    a = np.ascontiguousarray(actual, dtype=np.float64)
    if p.size == 0 or a.size == 0:
        raise ValidationError("erp requires non-empty series")
    return float(_kernels.erp_distance(p, a, gap))


def erp_normalized(predicted, actual, gap: float = DEFAULT_ERP_GAP) -> float:
    """ERP divided by the length of the actual series (per-point penalty)."""
    a = np.asarray(actual, dtype=np.float64)
    return erp(predicted, actual, gap) / a.size


def mean_period(series) -> float:
    """Period estimate from mean-crossing spacing.

    Crossing positions are linearly interpolated between samples; the period
    is twice the mean distance between consecutive crossings.
    """
    x = np.asarray(series, dtype=np.float64)
    centered = x - x.mean()
    s = np.sign(centered)
    # treat exact zeros as belonging to the previous side to avoid double counts
    for i in range(len(s)):
        if s[i] == 0:
            s[i] = s[i - 1] if i else 1.0
    change = np.flatnonzero(s[1:] != s[:-1])
    if len(change) < 4:
        raise NoPeriodError("fewer than 4 mean-crossings")
    t = change + centered[change] / (centered[change] - centered[change + 1])
    return float(2.0 * np.mean(np.diff(t)))
