"""Seasonal-trend decomposition via LOESS, used as the comparison baseline.

Backed by statsmodels' STL implementation behind this module's contract;
defaults follow the classic parameterization (periodic seasonal smoothing,
trend span derived from the period).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from statsmodels.tsa.seasonal import STL as _STL

from .errors import ValidationError


@dataclass(frozen=True)
class StlResult:
    trend: np.ndarray
    seasonal: np.ndarray
    remainder: np.ndarray
    period: int


def _next_odd(x: float) -> int:
    k = int(math.ceil(x))
    return k if k % 2 == 1 else k + 1


def stl(
    values,
    period: int,
    n_inner: int = 2,
    n_outer: int = 1,
    seasonal_span: int | None = None,
    trend_span: int | None = None,
) -> StlResult:
    """Classic STL decomposition; trend + seasonal + remainder == input exactly."""
    y = np.asarray(values, dtype=np.float64)
    n = len(y)
    if period < 2:
        raise ValidationError("period must be >= 2")
    if n < 2 * period:
        raise ValidationError(f"need at least {2 * period} points for period {period}")
    if seasonal_span is None:
        # span all subseries points: effectively periodic seasonality
        seasonal_span = _next_odd(2 * math.ceil(n / period) + 1)
    if trend_span is None:
        trend_span = _next_odd(1.5 * period / (1.0 - 1.5 / seasonal_span))
    trend_span = max(trend_span, _next_odd(period + 1))
    fit = _STL(
        y,
        period=period,
        seasonal=seasonal_span,
        trend=trend_span,
        robust=n_outer > 0,
    ).fit(inner_iter=n_inner, outer_iter=max(n_outer, 1))
    return StlResult(
        np.asarray(fit.trend), np.asarray(fit.seasonal), np.asarray(fit.resid), period
    )


def stl_forecast(result: StlResult, horizon: int) -> np.ndarray:
    """Naive STL extrapolation: linear trend extension plus repeated seasonal
    pattern from the last full cycle."""
    n = len(result.trend)
    t = np.arange(n, dtype=np.float64)
    coef = np.polyfit(t, result.trend, 1)
    future_t = np.arange(n, n + horizon, dtype=np.float64)
    trend = np.polyval(coef, future_t)
    last_cycle = result.seasonal[n - result.period :]
    seasonal = np.array([last_cycle[h % result.period] for h in range(horizon)])
    return trend + seasonal
