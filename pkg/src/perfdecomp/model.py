"""Core domain types: traces, components, decomposition results.

All types are immutable value objects; arrays are copied on construction and
marked read-only, so instances can be shared freely between threads.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from .errors import StructuralError, ValidationError

BANDS = ("trend", "quarterly", "monthly", "weekly", "subweekly", "unclassified")
MODEL_FAMILIES = ("linear", "piecewise_linear", "loess", "sinusoid", "hwes", "ma")

WEEKDAY_NAMES = (
    "Monday",
    "Tuesday",
    "Wednesday",
    "Thursday",
    "Friday",
    "Saturday",
    "Sunday",
)


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError("series must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Trace:
    """A daily-sampled performance series starting at a calendar date."""

    start_date: dt.date
    values: np.ndarray
    unit: str = "ms"

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))
        if len(self.values) < 2:
            raise ValidationError("trace needs at least 2 samples")
        if not np.all(np.isfinite(self.values)):
            bad = int(np.flatnonzero(~np.isfinite(self.values))[0])
            raise ValidationError(f"non-finite value at index {bad}")
        if not isinstance(self.start_date, dt.date):
            raise ValidationError("start_date must be a datetime.date")

    def __len__(self) -> int:
        return len(self.values)

    def date_of(self, index: int) -> dt.date:
        if not 0 <= index < len(self):
            raise IndexError(f"index {index} out of range 0..{len(self) - 1}")
        return self.start_date + dt.timedelta(days=index)

    def dates(self) -> list[dt.date]:
        return [self.start_date + dt.timedelta(days=i) for i in range(len(self))]

    def with_values(self, values) -> "Trace":
        return Trace(self.start_date, values, self.unit)


def weekday_of(trace: Trace, index: int) -> str:
    """Gregorian weekday name of trace.start_date + index days."""
    return WEEKDAY_NAMES[trace.date_of(index).weekday()]


@dataclass(frozen=True)
class FittedModel:
    """Descriptor of a fitted model: family name plus named parameters."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in MODEL_FAMILIES:
            raise ValidationError(f"unknown model family {self.family!r}")


@dataclass(frozen=True)
class Component:
    """One extracted variation source and its per-day contribution."""

    label: str
    band: str
    contribution: np.ndarray
    model: FittedModel | None = None
    period_days: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "contribution", _frozen_array(self.contribution))
        if self.band not in BANDS:
            raise ValidationError(f"unknown band {self.band!r}")
        if self.band == "trend":
            if self.period_days is not None:
                raise ValidationError("trend components carry no period")
        else:
            if self.period_days is None:
                raise ValidationError(f"band {self.band!r} requires period_days")
            if not self.period_days > 2:
                raise ValidationError(
                    "period_days must exceed 2 (Nyquist floor for daily samples)"
                )


@dataclass(frozen=True)
class DecompositionResult:
    """Ordered components plus final residual for one decomposed trace."""

    source: Trace
    components: tuple
    residual: np.ndarray
    residual_random: bool
    residual_p_value: float
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "residual", _frozen_array(self.residual))
        n = len(self.source)
        if len(self.residual) != n:
            raise StructuralError("residual length differs from source")
        for comp in self.components:
            if len(comp.contribution) != n:
                raise StructuralError(
                    f"component {comp.label!r} length differs from source"
                )
        if not 0.0 <= self.residual_p_value <= 1.0:
            raise ValidationError("residual_p_value outside [0, 1]")


def reconstruct(result: DecompositionResult) -> np.ndarray:
    """Sum of all component contributions plus the residual."""
    total = result.residual.copy()
    for comp in result.components:
        if len(comp.contribution) != len(total):
            raise StructuralError("component length mismatch")
        total += comp.contribution
    return total
