import datetime as dt

import numpy as np
import pytest

from perfdecomp.model import Trace

SIGNAL_SEED = 1
EEMD_SEED = 7
TRAIN_DAYS = 301
HOLDOUT_DAYS = 28


def multi_tone(n, seed=SIGNAL_SEED, sigma=3.0):
    """Trend + quarterly + monthly + weekly tones with Gaussian noise.

    Mean is ~100 so sigma=3 corresponds to ~3% noise.
    """
    t = np.arange(n, dtype=np.float64)
    clean = (
        55.0
        + 0.3 * t
        + 40.0 * np.sin(2 * np.pi * t / 180.0)
        + 15.0 * np.sin(2 * np.pi * t / 56.0)
        + 10.0 * np.sin(2 * np.pi * t / 7.0)
    )
    noise = np.random.default_rng(seed).normal(0.0, sigma, n)
    return clean + noise


@pytest.fixture(scope="session")
def synthetic_full():
    return multi_tone(TRAIN_DAYS + HOLDOUT_DAYS)


@pytest.fixture(scope="session")
def synthetic_trace(synthetic_full):
    return Trace(dt.date(2024, 1, 1), synthetic_full[:TRAIN_DAYS])


@pytest.fixture(scope="session")
def synthetic_actual(synthetic_full):
    return synthetic_full[TRAIN_DAYS:]


@pytest.fixture
def monday():
    return dt.date(2024, 1, 1)  # a Monday


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
