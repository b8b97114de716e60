"""Command-line interface: `decomp auto|hybrid|forecast|plan|serve`.

Exit codes: 2 validation error, 3 decomposition error, 4 port busy.
"""

from __future__ import annotations

import json
import pathlib
import sys

import click

from . import pipeline, serialization
from .emd import EemdConfig, EmdConfig
from .errors import DecompError, ValidationError

EXIT_VALIDATION = 2
EXIT_DECOMPOSITION = 3
EXIT_PORT_BUSY = 4


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_trace(path: str):
    try:
        return serialization.read_trace_csv(path)
    except (ValidationError, OSError) as exc:
        _fail(EXIT_VALIDATION, str(exc))


def _write_result(result, out_dir: str):
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "components.json").write_text(serialization.result_to_json(result))
    (out / "components.csv").write_text(serialization.components_to_csv(result))
    return out


@click.group()
def main():
    """Decompose daily cloud performance traces into trend and seasonal
    components; forecast and plan from the pieces."""


@main.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--ensemble", default=200, show_default=True, type=int)
@click.option("--noise", default=0.2, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--max-imfs", default=12, show_default=True, type=int)
def auto(input_path, out_dir, ensemble, noise, seed, max_imfs):
    """Automatic EEMD decomposition of a trace CSV."""
    trace = _load_trace(input_path)
    try:
        config = EemdConfig(
            EmdConfig(max_imfs=max_imfs),
            ensemble_size=ensemble,
            noise_amplitude=noise,
            master_seed=seed,
        )
        result = pipeline.run_auto(trace, config)
    except ValidationError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except DecompError as exc:
        _fail(EXIT_DECOMPOSITION, str(exc))
    out = _write_result(result, out_dir)
    click.echo(f"wrote {out / 'components.json'} and {out / 'components.csv'}")


@main.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--recipe", "recipe_path", required=True,
              help="recipe JSON path, `-` for stdin, or `sab-default`")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def hybrid(input_path, recipe_path, out_dir):
    """Recipe-driven hybrid decomposition of a trace CSV."""
    trace = _load_trace(input_path)
    try:
        if recipe_path == "-":
            recipe = serialization.recipe_from_json(sys.stdin.read())
        elif recipe_path == "sab-default":
            recipe = pipeline.sab_default_recipe()
        else:
            recipe = serialization.recipe_from_json(
                pathlib.Path(recipe_path).read_text()
            )
    except (ValidationError, OSError, json.JSONDecodeError) as exc:
        _fail(EXIT_VALIDATION, f"recipe: {exc}")
    try:
        result = pipeline.run_hybrid(trace, recipe)
    except ValidationError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except DecompError as exc:
        _fail(EXIT_DECOMPOSITION, str(exc))
    out = _write_result(result, out_dir)
    if not result.residual_random:
        click.echo(
            "warning: residual failed the runs randomness test "
            f"(p={result.residual_p_value:.4f}); consider another cyclic step",
            err=True,
        )
    click.echo(f"wrote {out / 'components.json'}")


@main.command()
@click.argument("result_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--horizon", default=28, show_default=True, type=int)
@click.option("--actual", "actual_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def forecast(result_path, horizon, actual_path, out_dir):
    """Forecast from a decomposition result JSON."""
    if horizon < 1:
        _fail(EXIT_VALIDATION, "horizon must be >= 1")
    try:
        result = serialization.result_from_json(pathlib.Path(result_path).read_text())
    except (ValidationError, json.JSONDecodeError, KeyError) as exc:
        _fail(EXIT_VALIDATION, f"result file: {exc}")
    actual = None
    if actual_path:
        actual = _load_trace(actual_path).values
        if len(actual) != horizon:
            _fail(EXIT_VALIDATION, "actual trace length must equal horizon")
    try:
        fc = pipeline.forecast(result, horizon, actual)
    except DecompError as exc:
        _fail(EXIT_DECOMPOSITION, str(exc))
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["day,predicted," + ",".join(label for label, _ in fc.per_component)]
    for h in range(horizon):
        row = [str(h + 1), repr(float(fc.predicted[h]))]
        row += [repr(float(series[h])) for _, series in fc.per_component]
        lines.append(",".join(row))
    (out / "forecast.csv").write_text("\n".join(lines) + "\n")
    payload = {
        "horizon": horizon,
        "predicted": fc.predicted.tolist(),
        "per_component": {label: series.tolist() for label, series in fc.per_component},
    }
    if fc.mape_percent is not None:
        payload["metrics"] = {
            "mape_percent": fc.mape_percent,
            "erp_normalized": fc.erp_normalized,
        }
    (out / "forecast.json").write_text(json.dumps(payload, indent=1))
    click.echo(f"wrote {out / 'forecast.csv'}")
    if fc.mape_percent is not None:
        click.echo(f"MAPE {fc.mape_percent:.2f}%  ERP {fc.erp_normalized:.3f}")


@main.command()
@click.argument("result_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--fraction", default=0.5, show_default=True, type=float)
@click.option("--out", "out_path", type=click.Path(dir_okay=False))
def plan(result_path, fraction, out_path):
    """Slow-weekday plan from a decomposition result JSON."""
    try:
        result = serialization.result_from_json(pathlib.Path(result_path).read_text())
        wp = pipeline.plan_weekdays(result, result.source, fraction)
    except (ValidationError, json.JSONDecodeError, KeyError) as exc:
        _fail(EXIT_VALIDATION, str(exc))
    payload = {
        "per_weekday_deviation": dict(
            zip(
                ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"),
                wp.per_weekday_deviation,
            )
        ),
        "slow_days": list(wp.slow_days),
        "threshold_used": wp.threshold_used,
    }
    text = json.dumps(payload, indent=1)
    if out_path:
        pathlib.Path(out_path).write_text(text)
    click.echo(text)


@main.command()
@click.option("--port", default=8377, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--state-dir", default=None, type=click.Path(file_okay=False),
              help="session persistence directory (env DECOMP_STATE_DIR overrides)")
def serve(port, host, state_dir):
    """Run the local HTTP session service for the interactive workflow."""
    import errno
    import os

    import uvicorn

    from .service import create_app

    state_dir = os.environ.get("DECOMP_STATE_DIR", state_dir) or ".decomp-state"
    app = create_app(state_dir)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        if exc.errno in (errno.EADDRINUSE, errno.EACCES):
            _fail(EXIT_PORT_BUSY, f"port {port} unavailable: {exc}")
        raise


if __name__ == "__main__":
    main()
