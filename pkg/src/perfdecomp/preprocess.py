"""Outlier removal and input validation ahead of decomposition."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .model import Trace

MIN_TRACE_LENGTH = 28  # four weekly cycles; seasonal fitting below this is noise

DEFAULT_HAMPEL_WINDOW = 3
DEFAULT_HAMPEL_THRESHOLD = 3.0
MAD_SCALE = 1.4826  # consistency factor for Gaussian data


@dataclass(frozen=True)
class OutlierReport:
    indices: tuple = ()
    original_values: tuple = ()
    replacement_values: tuple = ()

    def __post_init__(self):
        if not (
            len(self.indices) == len(self.original_values) == len(self.replacement_values)
        ):
            raise ValidationError("outlier report lists must be parallel")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValidationError("outlier indices must be strictly increasing")

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class ValidationVerdict:
    valid: bool
    problems: tuple = ()
    bad_indices: tuple = ()

    def require(self):
        if not self.valid:
            raise ValidationError("; ".join(self.problems))


def hampel_filter(
    trace: Trace,
    window_half_width: int = DEFAULT_HAMPEL_WINDOW,
    threshold: float = DEFAULT_HAMPEL_THRESHOLD,
) -> tuple[Trace, OutlierReport]:
    """Sliding-window median/MAD point-outlier replacement.

    For each index the window [i-w, i+w] (truncated at the boundaries) yields
    a median m and MAD; points deviating more than threshold scaled MADs are
    replaced by m.  With MAD = 0 any nonzero deviation is replaced.
    """
    if window_half_width < 1:
        raise ValidationError("window_half_width must be >= 1")
    if threshold <= 0:
        raise ValidationError("threshold must be positive")
    x = trace.values
    n = len(x)
    if n <= 2 * window_half_width:
        raise ValidationError(
            f"trace length {n} too short for window half-width {window_half_width}"
        )
    out = x.copy()
    idx, orig, repl = [], [], []
    for i in range(n):
        lo = max(0, i - window_half_width)
        hi = min(n, i + window_half_width + 1)
        window = x[lo:hi]
        med = float(np.median(window))
        mad = float(np.median(np.abs(window - med)))
        if abs(x[i] - med) > threshold * MAD_SCALE * mad:
            out[i] = med
            idx.append(i)
            orig.append(float(x[i]))
            repl.append(med)
    report = OutlierReport(tuple(idx), tuple(orig), tuple(repl))
    return trace.with_values(out), report


def validate_values(values: np.ndarray) -> ValidationVerdict:
    """Check a raw value array before it becomes a Trace."""
    values = np.asarray(values, dtype=np.float64)
    problems = []
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        problems.append(f"non-finite values at indices {bad.tolist()[:10]}")
    if len(values) < MIN_TRACE_LENGTH:
        problems.append(
            f"length {len(values)} below minimum {MIN_TRACE_LENGTH} for seasonal analysis"
        )
    finite = values[np.isfinite(values)]
    if finite.size and np.ptp(finite) == 0.0:
        problems.append("constant series (zero variance)")
    return ValidationVerdict(not problems, tuple(problems), tuple(int(i) for i in bad))


def validate(trace: Trace) -> ValidationVerdict:
    return validate_values(trace.values)
