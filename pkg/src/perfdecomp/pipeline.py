"""Orchestration: the recipe-driven hybrid engine, the automatic EEMD
pipeline, decomposition-based forecasting, method comparison, and the
slow-weekday resource planner."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import emd as emd_mod
from . import fitters, preprocess, stats, stl as stl_mod
from .errors import NonExtrapolableError, ValidationError
from .model import (
    WEEKDAY_NAMES,
    Component,
    DecompositionResult,
    FittedModel,
    Trace,
)

TREND_FAMILIES = ("linear", "piecewise_linear", "loess", "ma")
CYCLIC_FAMILIES = ("sinusoid", "hwes")

FAST_BANDS = ("subweekly", "weekly")
MAX_JOINT_SINUSOIDS = 3


@dataclass(frozen=True)
class RecipeStep:
    band: str
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.band == "trend":
            allowed = TREND_FAMILIES
        else:
            allowed = CYCLIC_FAMILIES
        if self.family not in allowed:
            raise ValidationError(
                f"family {self.family!r} not valid for band {self.band!r}"
            )


@dataclass(frozen=True)
class Recipe:
    name: str
    steps: tuple
    runs_alpha: float = 0.05
    refine_passes: int = 1

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise ValidationError("recipe needs at least one step")
        if self.steps[0].band != "trend":
            raise ValidationError("first recipe step must extract the trend")
        if self.refine_passes < 0:
            raise ValidationError("refine_passes must be >= 0")


def sab_default_recipe() -> Recipe:
    """Linear trend, three auto sinusoids by band, weekly and semi-weekly HWES."""
    return Recipe(
        "sab-default",
        (
            RecipeStep("trend", "linear"),
            RecipeStep("quarterly", "sinusoid", {"period_min": 120, "period_max": 260}),
            RecipeStep("monthly", "sinusoid", {"period_min": 20, "period_max": 100}),
            RecipeStep("monthly", "sinusoid", {"period_min": 10, "period_max": 20}),
            RecipeStep("weekly", "hwes", {"period": 7}),
            RecipeStep("subweekly", "hwes", {"period": 5}),
        ),
    )


@dataclass(frozen=True)
class ForecastResult:
    horizon: int
    predicted: np.ndarray
    per_component: tuple  # (label, series) pairs
    mape_percent: float | None = None
    erp_normalized: float | None = None


@dataclass(frozen=True)
class WeekdayPlan:
    per_weekday_deviation: tuple  # Monday-first, trace units
    slow_days: tuple  # weekday names
    threshold_used: float


@dataclass(frozen=True)
class MethodReport:
    name: str
    periods: tuple  # (band, period) pairs
    mape_percent: float | None
    erp_normalized: float | None


@dataclass(frozen=True)
class ComparisonReport:
    hybrid: MethodReport
    auto: MethodReport
    stl: MethodReport
    band_deltas: tuple  # (band, hybrid period, auto period) where both exist
    stl_leftover_acf_lag: int
    stl_leftover_acf_value: float
    stl_white_noise_band: float


def _fit_step(step: RecipeStep, target: np.ndarray, label: str):
    """Fit one recipe step on the current residual; returns (Component, model)."""
    p = step.params
    if step.family == "linear":
        fit = fitters.fit_linear(target)
        return Component(label, "trend", fit.fitted, fit.to_model(), None)
    if step.family == "piecewise_linear":
        fit = fitters.fit_piecewise_linear(
            target,
            max_segments=p.get("max_segments", 3),
            min_segment_len=p.get("min_segment_len", 14),
        )
        return Component(label, "trend", fit.fitted, fit.to_model(), None)
    if step.family == "loess":
        fitted = fitters.loess_smooth(target, p.get("span", 0.3))
        return Component(
            label, "trend", fitted, FittedModel("loess", {"span": p.get("span", 0.3)}), None
        )
    if step.family == "ma":
        window = p.get("window", 29)
        fitted = fitters.moving_average(target, window)
        return Component(
            label, "trend", fitted, FittedModel("ma", {"window": window}), None
        )
    if step.family == "sinusoid":
        if "period" in p:
            grid = [float(p["period"])]
        else:
            grid = fitters.default_period_grid(
                len(target), p.get("period_min", 3.0), p.get("period_max")
            )
        fit = fitters.fit_sinusoid(target, grid)
        return Component(label, step.band, fit.fitted, fit.to_model(), fit.period)
    if step.family == "hwes":
        if "period" not in p:
            raise ValidationError("hwes steps must pin an integer period")
        fit = fitters.fit_hwes(target, int(p["period"]), p.get("optimize", True))
        return Component(label, step.band, fit.fitted, fit.to_model(), float(fit.period))
    raise ValidationError(f"unknown family {step.family!r}")


def _joint_design(n: int, periods) -> np.ndarray:
    t = np.arange(n, dtype=np.float64)
    cols = [t, np.ones(n)]
    for p in periods:
        w = 2.0 * np.pi / p
        cols.append(np.sin(w * t))
        cols.append(np.cos(w * t))
    return np.column_stack(cols)


def _step_grid(step: RecipeStep, n: int):
    if "period" in step.params:
        return [float(step.params["period"])]
    return fitters.default_period_grid(
        n, step.params.get("period_min", 3.0), step.params.get("period_max")
    )


def _refine_pass(source: np.ndarray, steps, components):
    """One back-fit pass over the fitted components.

    A sequential chain lets slowly-varying components trade linear content
    (a fraction of a long sine projects onto the trend line), so when the
    trend is linear the pass re-solves trend and all sinusoid steps as one
    least-squares system, scanning each sinusoid's period grid with the
    others held fixed.  High-frequency content of HWES steps acts as noise
    in that solve; the HWES steps themselves are then refit on the cleaned
    residual.  Other families fall back to a plain one-at-a-time backfit.
    """
    n = len(source)
    sin_idx = [i for i, s in enumerate(steps) if s.family == "sinusoid"]
    joint_ok = steps[0].family == "linear" and sin_idx

    if joint_ok:
        other_idx = [
            i
            for i, s in enumerate(steps)
            if i != 0 and s.family not in ("sinusoid", "hwes")
        ]
        target = source.copy()
        for i in other_idx:
            target = target - components[i].contribution
        periods = [components[i].period_days for i in sin_idx]
        for pos, i in enumerate(sin_idx):
            best = None
            for p in _step_grid(steps[i], n):
                trial = list(periods)
                trial[pos] = p
                design = _joint_design(n, trial)
                coef, *_ = np.linalg.lstsq(design, target, rcond=None)
                sse = float(np.sum((design @ coef - target) ** 2))
                if best is None or sse < best[0] or (sse == best[0] and p < best[1]):
                    best = (sse, p)
            periods[pos] = best[1]
        design = _joint_design(n, periods)
        coef, *_ = np.linalg.lstsq(design, target, rcond=None)
        trend_fit = coef[0] * np.arange(n, dtype=np.float64) + coef[1]
        components[0] = Component(
            components[0].label,
            "trend",
            trend_fit,
            FittedModel("linear", {"slope": float(coef[0]), "intercept": float(coef[1])}),
            None,
        )
        for pos, i in enumerate(sin_idx):
            a, b = float(coef[2 + 2 * pos]), float(coef[3 + 2 * pos])
            w = 2.0 * np.pi / periods[pos]
            fitted = a * np.sin(w * np.arange(n)) + b * np.cos(w * np.arange(n))
            amplitude = float(np.hypot(a, b))
            phase = float(np.arctan2(b, a)) if amplitude > 0 else 0.0
            components[i] = Component(
                components[i].label,
                steps[i].band,
                fitted,
                FittedModel(
                    "sinusoid",
                    {
                        "amplitude": amplitude,
                        "period": float(periods[pos]),
                        "phase": phase,
                        "offset": 0.0,
                    },
                ),
                float(periods[pos]),
            )
        refit_idx = [i for i, s in enumerate(steps) if s.family == "hwes"]
    else:
        refit_idx = list(range(len(steps)))

    for i in refit_idx:
        others = sum(
            (c.contribution for j, c in enumerate(components) if j != i),
            np.zeros(n),
        )
        components[i] = _fit_step(steps[i], source - others, components[i].label)


def _residual_verdict(residual: np.ndarray, alpha: float):
    """Runs test with a degenerate-random fallback for constant residuals."""
    if np.ptp(residual) == 0.0 or len(residual) < 20:
        return True, 1.0, True, None
    try:
        verdict = stats.runs_test(residual, alpha)
    except Exception:
        return True, 1.0, True, None
    suggestion = None
    if not verdict.random:
        lags = min(len(residual) - 1, 92)
        corr = stats.acf(residual, lags).correlations
        suggestion = int(np.argmax(corr[2:]) + 2)
    return verdict.random, verdict.p_value, False, suggestion


def run_hybrid(
    trace: Trace,
    recipe: Recipe,
    hampel_window: int = preprocess.DEFAULT_HAMPEL_WINDOW,
    hampel_threshold: float = preprocess.DEFAULT_HAMPEL_THRESHOLD,
) -> DecompositionResult:
    """Recipe-driven decomposition: Hampel preprocessing, sequential model
    fits on the running residual, optional back-fit refinement, and a final
    runs randomness test on the residual."""
    preprocess.validate(trace).require()
    source, outliers = preprocess.hampel_filter(trace, hampel_window, hampel_threshold)
    components = []
    residual = source.values.copy()
    for i, step in enumerate(recipe.steps):
        label = f"step{i + 1} {step.family} ({step.band})"
        try:
            comp = _fit_step(step, residual, label)
        except ValidationError as exc:
            raise ValidationError(f"step {i + 1}: {exc}") from exc
        residual = residual - comp.contribution
        components.append(comp)

    for _ in range(recipe.refine_passes):
        _refine_pass(source.values, recipe.steps, components)
        residual = source.values.copy()
        for comp in components:
            residual = residual - comp.contribution

    random, p_value, degenerate, suggestion = _residual_verdict(residual, recipe.runs_alpha)
    diagnostics = {"outliers_replaced": len(outliers), "recipe": recipe.name}
    if degenerate:
        diagnostics["degenerate_residual"] = True
    if suggestion is not None:
        diagnostics["suggested_next_period"] = suggestion
    return DecompositionResult(source, components, residual, random, p_value, diagnostics)


def run_auto(
    trace: Trace,
    config: emd_mod.EemdConfig | None = None,
    hampel_window: int = preprocess.DEFAULT_HAMPEL_WINDOW,
    hampel_threshold: float = preprocess.DEFAULT_HAMPEL_THRESHOLD,
) -> DecompositionResult:
    """Fully automatic decomposition: Hampel, EEMD, band labelling.

    All signal is assigned to components, so the residual is the zero series;
    the randomness verdict is computed on the highest-frequency IMF as a
    diagnostic."""
    config = config or emd_mod.EemdConfig()
    preprocess.validate(trace).require()
    source, outliers = preprocess.hampel_filter(trace, hampel_window, hampel_threshold)
    imfs, residue = emd_mod.eemd(source.values, config)
    components = emd_mod.label_imfs(imfs, residue)
    residual = np.zeros(len(source))
    if imfs:
        random, p_value, degenerate, _ = _residual_verdict(
            imfs[0].values, stats.DEFAULT_ALPHA
        )
    else:
        random, p_value, degenerate = True, 1.0, True
    diagnostics = {
        "outliers_replaced": len(outliers),
        "randomness_checked_on": "imf1",
        "master_seed": config.master_seed,
        "ensemble_size": config.ensemble_size,
        "noise_amplitude": config.noise_amplitude,
    }
    if degenerate:
        diagnostics["degenerate_residual"] = True
    return DecompositionResult(source, components, residual, random, p_value, diagnostics)


def _forecast_component(comp: Component, horizon: int, n: int) -> np.ndarray:
    if comp.model.family in ("loess", "ma"):
        raise NonExtrapolableError(
            f"component {comp.label!r} ({comp.model.family}) cannot extrapolate"
        )
    return fitters.forecast_model(comp.model, horizon, n)


def _fast_imf_forecast(comp: Component, horizon: int, n: int) -> np.ndarray:
    """Sinusoid surrogate around the mode's own period estimate."""
    p = comp.period_days or 7.0
    grid = np.geomspace(max(2.5, 0.75 * p), min(4.0 * p / 3.0, n / 1.2), 60)
    fit = fitters.fit_sinusoid(comp.contribution, grid)
    return fitters.forecast_model(fit.to_model(), horizon, n)


def _slow_design(t: np.ndarray, periods) -> np.ndarray:
    cols = [t, np.ones_like(t)]
    for p in periods:
        w = 2.0 * np.pi / p
        cols.append(np.sin(w * t))
        cols.append(np.cos(w * t))
    return np.column_stack(cols)


def _forecast_slow_group(components, horizon: int, n: int) -> dict:
    """Joint line + sinusoids forecast for monthly-and-slower EEMD content.

    Mode mixing spreads slow tones across neighbouring modes; the pieces
    cancel in the reconstruction but diverge if each is extrapolated on its
    own.  Fitting one parametric surrogate to the aggregate sidesteps that.
    The fitted line is attributed to the final trend component, each sinusoid
    to the mode whose period seeded it, and remaining components get zeros so
    the per-component entries still sum to the total.
    """
    t = np.arange(n, dtype=np.float64)
    tf = np.arange(n, n + horizon, dtype=np.float64)
    aggregate = np.zeros(n)
    for comp, _ in components:
        aggregate = aggregate + comp.contribution
    oscillatory = [
        (i, comp)
        for i, (comp, _) in enumerate(components)
        if comp.period_days is not None
    ]
    oscillatory.sort(key=lambda item: float(np.std(item[1].contribution)), reverse=True)
    oscillatory = oscillatory[:MAX_JOINT_SINUSOIDS]
    seeds = [comp.period_days for _, comp in oscillatory]
    grids = []
    for p in seeds:
        lo, hi = max(15.0, 0.6 * p), min(1.5 * p, n / 1.2)
        grids.append(np.geomspace(lo, hi, 40) if hi > lo else np.array([p]))
    periods = list(seeds)

    def sse_for(trial) -> float:
        x = _slow_design(t, trial)
        beta, _, _, _ = np.linalg.lstsq(x, aggregate, rcond=None)
        r = aggregate - x @ beta
        return float(r @ r)

    for _ in range(3 if periods else 0):
        for k, grid in enumerate(grids):
            best = None
            for p in grid:
                trial = list(periods)
                trial[k] = float(p)
                s = sse_for(trial)
                if best is None or s < best[0]:
                    best = (s, float(p))
            periods[k] = best[1]
    x = _slow_design(t, periods)
    beta, _, _, _ = np.linalg.lstsq(x, aggregate, rcond=None)
    xf = _slow_design(tf, periods)

    out = {}
    line = beta[0] * tf + beta[1]
    trend_slots = [i for i, (comp, _) in enumerate(components) if comp.band == "trend"]
    line_slot = trend_slots[-1] if trend_slots else 0
    for i in range(len(components)):
        out[i] = np.zeros(horizon)
    out[line_slot] = out[line_slot] + line
    for k, (i, _) in enumerate(oscillatory):
        pair = beta[2 + 2 * k : 4 + 2 * k]
        out[i] = out[i] + xf[:, 2 + 2 * k : 4 + 2 * k] @ pair
    return out


def forecast(
    result: DecompositionResult, horizon: int, actual=None
) -> ForecastResult:
    """Extrapolate every component and sum; metrics when actuals supplied."""
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    n = len(result.source)
    series_by_index: dict[int, np.ndarray] = {}
    slow_group = []
    for i, comp in enumerate(result.components):
        if comp.model is not None:
            series_by_index[i] = _forecast_component(comp, horizon, n)
        elif comp.band in FAST_BANDS:
            series_by_index[i] = _fast_imf_forecast(comp, horizon, n)
        else:
            slow_group.append((comp, i))
    if slow_group:
        grouped = _forecast_slow_group(slow_group, horizon, n)
        for local, (_, i) in enumerate(slow_group):
            series_by_index[i] = grouped[local]
    per_component = [
        (comp.label, series_by_index[i]) for i, comp in enumerate(result.components)
    ]
    predicted = np.zeros(horizon)
    for _, series in per_component:
        predicted = predicted + series
    mape_val = erp_val = None
    if actual is not None:
        actual = np.asarray(actual, dtype=np.float64)
        if len(actual) != horizon:
            raise ValidationError("actual length must equal horizon")
        mape_val, erp_val = evaluate(predicted, actual)
    return ForecastResult(horizon, predicted, tuple(per_component), mape_val, erp_val)


def evaluate(predicted, actual) -> tuple:
    """(MAPE percent, normalized ERP) against a held-out actual series."""
    return (
        stats.mape(predicted, actual),
        stats.erp_normalized(predicted, actual),
    )


def _method_periods(result: DecompositionResult) -> tuple:
    return tuple(
        (c.band, c.period_days) for c in result.components if c.period_days is not None
    )


def compare_methods(
    trace: Trace,
    recipe: Recipe | None = None,
    eemd_config: emd_mod.EemdConfig | None = None,
    horizon: int = 28,
    actual=None,
    stl_period: int = 7,
) -> ComparisonReport:
    """Run hybrid, automatic, and STL side by side.

    Reports per-method periods and forecast metrics, per-band period deltas
    between hybrid and automatic, and the autocorrelation left in STL's
    trend+remainder at the dominant unmodelled lag."""
    recipe = recipe or sab_default_recipe()
    hybrid = run_hybrid(trace, recipe)
    auto = run_auto(trace, eemd_config)
    source = hybrid.source.values
    stl_result = stl_mod.stl(source, stl_period)

    reports = {}
    for name, res in (("hybrid", hybrid), ("auto", auto)):
        m = e = None
        if actual is not None:
            fc = forecast(res, horizon, actual)
            m, e = fc.mape_percent, fc.erp_normalized
        reports[name] = MethodReport(name, _method_periods(res), m, e)
    m = e = None
    if actual is not None:
        stl_pred = stl_mod.stl_forecast(stl_result, horizon)
        m, e = evaluate(stl_pred, np.asarray(actual, dtype=np.float64))
    reports["stl"] = MethodReport("stl", (("weekly", float(stl_period)),), m, e)

    deltas = []
    auto_periods = dict(reports["auto"].periods)
    for band, period in reports["hybrid"].periods:
        if band in auto_periods:
            deltas.append((band, period, auto_periods[band]))

    # what STL failed to model: remainder plus the non-linear part of its trend
    trend_line = np.polyval(
        np.polyfit(np.arange(len(source), dtype=np.float64), stl_result.trend, 1),
        np.arange(len(source), dtype=np.float64),
    )
    leftover = stl_result.remainder + (stl_result.trend - trend_line)
    max_lag = min(len(source) - 1, 100)
    leftover_acf = stats.acf(leftover, max_lag)
    lag = int(np.argmax(np.abs(leftover_acf.correlations[stl_period + 1 :]))) + stl_period + 1
    return ComparisonReport(
        reports["hybrid"],
        reports["auto"],
        reports["stl"],
        tuple(deltas),
        lag,
        float(leftover_acf.correlations[lag]),
        leftover_acf.white_noise_band(),
    )


def plan_weekdays(
    result: DecompositionResult, trace: Trace, fraction: float = 0.5
) -> WeekdayPlan:
    """Identify slow weekdays from the weekly-band contributions.

    Averages weekly plus subweekly contributions per weekday over the whole
    trace; weekdays whose mean positive deviation reaches fraction times the
    maximum deviation are flagged slow (higher latency)."""
    if not 0.0 < fraction <= 1.0:
        raise ValidationError("fraction must be in (0, 1]")
    weekly = [c for c in result.components if c.band in ("weekly", "subweekly")]
    if not weekly:
        raise ValidationError("no weekly or subweekly component in result")
    total = np.zeros(len(trace))
    for comp in weekly:
        total = total + comp.contribution
    sums = np.zeros(7)
    counts = np.zeros(7)
    start = trace.start_date.weekday()
    for i in range(len(trace)):
        wd = (start + i) % 7
        sums[wd] += total[i]
        counts[wd] += 1
    deviations = sums / counts
    max_dev = float(deviations.max())
    threshold = fraction * max_dev
    if max_dev <= 0.0:
        slow = ()
    else:
        order = np.argsort(deviations)[::-1]
        slow = tuple(
            WEEKDAY_NAMES[wd]
            for wd in sorted(w for w in order[:5] if deviations[w] >= threshold and deviations[w] > 0)
        )
    return WeekdayPlan(tuple(float(d) for d in deviations), slow, threshold)
