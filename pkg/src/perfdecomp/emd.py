"""Empirical mode decomposition and its noise-assisted ensemble variant.

Sifting uses natural cubic-spline envelopes through mirrored extrema and a
Cauchy-type standard-deviation stopping criterion.  The ensemble variant
averages IMFs across noise-perturbed trials with per-trial counter seeding,
so results are deterministic and independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels, stats
from .errors import NoPeriodError, ValidationError
from .model import Component

MIN_EMD_LENGTH = 16


@dataclass(frozen=True)
class EmdConfig:
    sd_threshold: float = 0.2
    max_sift_iterations: int = 10
    max_imfs: int = 12
    boundary: int = 2  # extrema mirrored at each end

    def __post_init__(self):
        if self.sd_threshold <= 0 or self.max_sift_iterations < 1:
            raise ValidationError("sd_threshold and max_sift_iterations must be positive")
        if self.max_imfs < 1 or self.boundary < 1:
            raise ValidationError("max_imfs and boundary must be positive")


@dataclass(frozen=True)
class EemdConfig:
    base: EmdConfig = field(default_factory=EmdConfig)
    ensemble_size: int = 200
    noise_amplitude: float = 0.2  # fraction of the input standard deviation
    master_seed: int = 0

    def __post_init__(self):
        if self.ensemble_size < 1:
            raise ValidationError("ensemble_size must be >= 1")
        if not 0.0 <= self.noise_amplitude <= 1.0:
            raise ValidationError("noise_amplitude must be in [0, 1]")


@dataclass(frozen=True)
class Imf:
    values: np.ndarray
    index: int  # 1 = highest frequency
    mean_period_days: float | None = None


def find_extrema(x: np.ndarray):
    """Indices of local maxima and minima; plateau runs count their midpoint."""
    n = len(x)
    maxima, minima = [], []
    i = 1
    while i < n - 1:
        if x[i] == x[i - 1]:
            i += 1
            continue
        j = i
        while j < n - 1 and x[j + 1] == x[j]:
            j += 1
        if j >= n - 1:
            break
        mid = (i + j) // 2
        if x[i] > x[i - 1] and x[j] > x[j + 1]:
            maxima.append(mid)
        elif x[i] < x[i - 1] and x[j] < x[j + 1]:
            minima.append(mid)
        i = j + 1
    return np.asarray(maxima, dtype=np.int64), np.asarray(minima, dtype=np.int64)


def _mirror_extend(idx: np.ndarray, vals: np.ndarray, n: int, depth: int):
    """Reflect up to `depth` extrema across each boundary."""
    left_idx = [-int(i) for i in idx[:depth] if i > 0]
    left_val = [float(v) for i, v in zip(idx[:depth], vals[:depth]) if i > 0]
    right_idx = [2 * (n - 1) - int(i) for i in idx[-depth:] if i < n - 1]
    right_val = [float(v) for i, v in zip(idx[-depth:], vals[-depth:]) if i < n - 1]
    xs = np.array(left_idx[::-1] + [float(i) for i in idx] + right_idx, dtype=np.float64)
    ys = np.array(left_val[::-1] + [float(v) for v in vals] + right_val, dtype=np.float64)
    # reflections can coincide with existing knots; keep strictly increasing
    keep = np.concatenate([[True], np.diff(xs) > 0])
    return xs[keep], ys[keep]


def envelope_mean(signal, boundary: int = 2):
    """Mean of the upper and lower cubic-spline envelopes, or None if the
    signal has fewer than 2 maxima or 2 minima."""
    x = np.ascontiguousarray(signal, dtype=np.float64)
    n = len(x)
    max_idx, min_idx = find_extrema(x)
    # mirrored knots let a single extremum on one side still span an
    # envelope; below 3 extrema total the mode is residue-like
    if len(max_idx) < 1 or len(min_idx) < 1 or len(max_idx) + len(min_idx) < 3:
        return None
    t = np.arange(n, dtype=np.float64)
    ux, uy = _mirror_extend(max_idx, x[max_idx], n, boundary)
    lx, ly = _mirror_extend(min_idx, x[min_idx], n, boundary)
    upper = _kernels.natural_spline_eval(ux, uy, t)
    lower = _kernels.natural_spline_eval(lx, ly, t)
    return 0.5 * (upper + lower)


def sift_once(signal, boundary: int = 2):
    """One sifting pass: (imf_candidate, envelope_mean), or None when the
    signal is monotone-residue (too few extrema)."""
    mean = envelope_mean(signal, boundary)
    if mean is None:
        return None
    return np.asarray(signal, dtype=np.float64) - mean, mean


def _extract_imf(signal: np.ndarray, config: EmdConfig):
    h = signal
    for _ in range(config.max_sift_iterations):
        step = sift_once(h, config.boundary)
        if step is None:
            return None
        candidate, _ = step
        denom = float(np.sum(h * h))
        sd = float(np.sum((h - candidate) ** 2)) / denom if denom > 0 else 0.0
        h = candidate
        if sd < config.sd_threshold:
            break
    return h


def emd(signal, config: EmdConfig | None = None):
    """Full EMD: returns (list of Imf, residue).

    The subtraction chain guarantees sum(IMFs) + residue == signal to
    floating accumulation error.
    """
    config = config or EmdConfig()
    x = np.ascontiguousarray(signal, dtype=np.float64)
    if len(x) < MIN_EMD_LENGTH:
        raise ValidationError(f"emd needs at least {MIN_EMD_LENGTH} samples")
    imfs = []
    remainder = x.copy()
    while len(imfs) < config.max_imfs:
        imf = _extract_imf(remainder, config)
        if imf is None:
            break
        remainder = remainder - imf
        imfs.append(Imf(imf, len(imfs) + 1))
    return imfs, remainder


def eemd(signal, config: EemdConfig | None = None):
    """Ensemble EMD: average IMFs over noise-perturbed trials.

    Trial j uses seed master_seed + j.  Trials can disagree on mode count
    when a mid-band mode splits, but the slowest mode is stable across
    trials, so short trials are padded with zero modes at the *fast* end
    (slow-end alignment) before averaging.  The returned residue is signal
    minus the summed averaged IMFs, so additive reconstruction is exact.
    """
    config = config or EemdConfig()
    x = np.ascontiguousarray(signal, dtype=np.float64)
    if len(x) < MIN_EMD_LENGTH:
        raise ValidationError(f"eemd needs at least {MIN_EMD_LENGTH} samples")
    sigma = config.noise_amplitude * float(np.std(x))
    trials = []
    for j in range(config.ensemble_size):
        if sigma > 0:
            rng = np.random.default_rng(config.master_seed + j)
            noisy = x + rng.normal(0.0, sigma, len(x))
        else:
            noisy = x
        imfs, _ = emd(noisy, config.base)
        trials.append([imf.values for imf in imfs])
    n_modes = max(len(t) for t in trials)
    if n_modes == 0:
        return [], x.copy()
    stacked = np.zeros((n_modes, len(x)))
    for t in trials:
        offset = n_modes - len(t)
        for k, values in enumerate(t):
            stacked[offset + k] += values
    stacked /= config.ensemble_size
    imfs = [Imf(stacked[k], k + 1) for k in range(n_modes)]
    residue = x - stacked.sum(axis=0)
    return imfs, residue


def band_for_period(period: float, n: int) -> str:
    if 2 < period <= 5:
        return "subweekly"
    if 5 < period <= 10:
        return "weekly"
    if 10 < period <= 45:
        return "monthly"
    if 45 < period <= 135:
        return "monthly"  # bi-monthly range shares the monthly band
    if 135 < period <= n / 1.2:
        return "quarterly"
    return "trend"


def _relaxed_mean_period(values: np.ndarray) -> float | None:
    """Mean-crossing period estimate accepting as few as 3 crossings.

    Slow modes spanning under two full cycles cannot meet the 4-crossing
    floor of the general estimator but still have a usable spacing.
    """
    try:
        return stats.mean_period(values)
    except NoPeriodError:
        pass
    centered = values - values.mean()
    s = np.sign(centered)
    s[s == 0] = 1.0
    change = np.flatnonzero(s[1:] != s[:-1])
    if len(change) < 2:
        return None
    if len(change) == 2:
        # A single half-cycle between crossings is only trustworthy when the
        # mode genuinely oscillates, i.e. it turns at least three times.
        maxima, minima = find_extrema(values)
        if len(maxima) + len(minima) < 3 or not maxima.size or not minima.size:
            return None
    t = change + centered[change] / (centered[change] - centered[change + 1])
    return float(2.0 * np.mean(np.diff(t)))


def label_imfs(imfs, residue) -> list:
    """Turn IMFs plus residue into labelled Components.

    Bands come from the mean-crossing period estimate; the residue and any
    mode too slow to estimate become trend components.
    """
    if not imfs and residue is None:
        raise ValidationError("empty decomposition")
    n = len(residue)
    components = []
    for imf in imfs:
        period = _relaxed_mean_period(imf.values)
        if period is None or period > n / 1.2:
            components.append(
                Component(f"imf{imf.index} (trend)", "trend", imf.values, None, None)
            )
            continue
        period = max(period, 2.01)  # Nyquist floor for daily samples
        band = band_for_period(period, n)
        if band == "trend":
            components.append(
                Component(f"imf{imf.index} (trend)", "trend", imf.values, None, None)
            )
        else:
            components.append(
                Component(f"imf{imf.index} ({band})", band, imf.values, None, period)
            )
    components.append(Component("residue (trend)", "trend", residue, None, None))
    return components
