"""Decomposition toolkit for long-horizon cloud performance traces.

Two decomposition routes over daily latency traces: a recipe-driven hybrid
engine (trend plus cyclic model fits with a runs-test stop condition) and a
fully automatic EEMD pipeline, plus forecasting and weekday resource
planning on the extracted components.
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    Component,
    DecompositionResult,
    FittedModel,
    Trace,
    reconstruct,
    weekday_of,
)
