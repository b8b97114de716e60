"""File formats: trace CSV, result JSON, recipe JSON, forecast artifacts.

Floats go through Python's repr (shortest round-trip form), so CSV and JSON
round-trips are lossless at 17 significant digits.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json

import numpy as np

from . import __version__
from .errors import ValidationError
from .model import Component, DecompositionResult, FittedModel, Trace
from .pipeline import Recipe, RecipeStep

RECIPE_KEYS = {"name", "runs_alpha", "steps", "refine_passes"}
STEP_KEYS = {"band", "family", "params"}


def parse_trace_csv(text: str, unit: str = "ms") -> Trace:
    """Parse `date,value` CSV; `#` comment lines allowed; dates must be
    consecutive days."""
    dates, values, linenos = [], [], []
    reader = csv.reader(io.StringIO(text))
    for lineno, row in enumerate(reader, start=1):
        if not row or row[0].lstrip().startswith("#"):
            continue
        if [c.strip().lower() for c in row[:2]] == ["date", "value"]:
            continue
        if len(row) < 2:
            raise ValidationError(f"line {lineno}: expected `date,value`")
        try:
            date = dt.date.fromisoformat(row[0].strip())
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: bad date {row[0]!r}") from exc
        try:
            value = float(row[1])
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: bad value {row[1]!r}") from exc
        if not np.isfinite(value):
            raise ValidationError(f"line {lineno}: non-finite value")
        dates.append(date)
        values.append(value)
        linenos.append(lineno)
    if len(dates) < 2:
        raise ValidationError("trace CSV needs at least 2 data rows")
    for i, date in enumerate(dates[1:], start=1):
        if (date - dates[0]).days != i:
            raise ValidationError(
                f"line {linenos[i]}: dates must be consecutive days; "
                f"gap before {date.isoformat()}"
            )
    return Trace(dates[0], values, unit)


def read_trace_csv(path: str, unit: str = "ms") -> Trace:
    with open(path, encoding="utf-8") as fh:
        return parse_trace_csv(fh.read(), unit)


def trace_to_csv(trace: Trace) -> str:
    lines = ["date,value"]
    for i, date in enumerate(trace.dates()):
        lines.append(f"{date.isoformat()},{float(trace.values[i])!r}")
    return "\n".join(lines) + "\n"


def _component_to_dict(comp: Component) -> dict:
    return {
        "label": comp.label,
        "band": comp.band,
        "model": (
            {"family": comp.model.family, "params": comp.model.params}
            if comp.model is not None
            else None
        ),
        "period_days": comp.period_days,
        "contribution": comp.contribution.tolist(),
    }


def _component_from_dict(d: dict) -> Component:
    model = None
    if d.get("model") is not None:
        model = FittedModel(d["model"]["family"], dict(d["model"]["params"]))
    return Component(
        d["label"], d["band"], np.asarray(d["contribution"]), model, d.get("period_days")
    )


def result_to_dict(result: DecompositionResult) -> dict:
    return {
        "source": {
            "start_date": result.source.start_date.isoformat(),
            "unit": result.source.unit,
            "values": result.source.values.tolist(),
        },
        "components": [_component_to_dict(c) for c in result.components],
        "residual": result.residual.tolist(),
        "residual_random": result.residual_random,
        "residual_p_value": result.residual_p_value,
        "diagnostics": result.diagnostics,
        "tool_version": __version__,
    }


def result_from_dict(d: dict) -> DecompositionResult:
    src = d["source"]
    trace = Trace(dt.date.fromisoformat(src["start_date"]), src["values"], src.get("unit", "ms"))
    return DecompositionResult(
        trace,
        tuple(_component_from_dict(c) for c in d["components"]),
        np.asarray(d["residual"]),
        d["residual_random"],
        d["residual_p_value"],
        dict(d.get("diagnostics", {})),
    )


def result_to_json(result: DecompositionResult) -> str:
    return json.dumps(result_to_dict(result), indent=1)


def result_from_json(text: str) -> DecompositionResult:
    return result_from_dict(json.loads(text))


def components_to_csv(result: DecompositionResult) -> str:
    header = ["date", "value", *(c.label for c in result.components), "residual"]
    lines = [",".join(f'"{h}"' if "," in h else h for h in header)]
    dates = result.source.dates()
    for i in range(len(result.source)):
        row = [dates[i].isoformat(), repr(float(result.source.values[i]))]
        row += [repr(float(c.contribution[i])) for c in result.components]
        row.append(repr(float(result.residual[i])))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def recipe_from_dict(d: dict) -> Recipe:
    unknown = set(d) - RECIPE_KEYS
    if unknown:
        raise ValidationError(f"unknown recipe fields: {sorted(unknown)}")
    if "steps" not in d or "name" not in d:
        raise ValidationError("recipe requires `name` and `steps`")
    steps = []
    for i, sd in enumerate(d["steps"]):
        unknown = set(sd) - STEP_KEYS
        if unknown:
            raise ValidationError(f"step {i + 1}: unknown fields {sorted(unknown)}")
        params = sd.get("params", {})
        if params == "auto":
            params = {}
        if not isinstance(params, dict):
            raise ValidationError(f"step {i + 1}: params must be an object or \"auto\"")
        steps.append(RecipeStep(sd["band"], sd["family"], dict(params)))
    return Recipe(
        d["name"],
        tuple(steps),
        float(d.get("runs_alpha", 0.05)),
        int(d.get("refine_passes", 1)),
    )


def recipe_from_json(text: str) -> Recipe:
    return recipe_from_dict(json.loads(text))


def recipe_to_dict(recipe: Recipe) -> dict:
    return {
        "name": recipe.name,
        "runs_alpha": recipe.runs_alpha,
        "refine_passes": recipe.refine_passes,
        "steps": [
            {"band": s.band, "family": s.family, "params": s.params or "auto"}
            for s in recipe.steps
        ],
    }


def recipe_to_json(recipe: Recipe) -> str:
    return json.dumps(recipe_to_dict(recipe), indent=1)
