"""Local HTTP service hosting the interactive hybrid workflow.

Sessions wrap a preprocessed trace plus an undo-able step stack; every
mutation bumps the revision and is persisted as a JSON file in the state
directory, so sessions survive restarts.  Computation is pure, so replaying
a session's step log against its trace reproduces the residual bit-exactly.
"""

from __future__ import annotations

import datetime as dt
import json
import pathlib
import threading
import uuid

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import __version__, pipeline, preprocess, serialization, stats
from .errors import DecompError, ValidationError
from .model import DecompositionResult, Trace
from .pipeline import RecipeStep


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: str = ""):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


class Session:
    """One interactive decomposition: preprocessed trace + applied steps."""

    def __init__(self, sid: str, trace: Trace, outliers_replaced: int):
        self.id = sid
        self.trace = trace  # post-Hampel source
        self.outliers_replaced = outliers_replaced
        self.steps = []  # dicts: band, family, params, component
        self.residuals = [trace.values.copy()]  # stack, one entry per revision
        self.revision = 0
        self.lock = threading.Lock()

    @property
    def residual(self) -> np.ndarray:
        return self.residuals[-1]

    def apply_step(self, band: str, family: str, params: dict):
        step = RecipeStep(band, family, dict(params))
        label = f"step{len(self.steps) + 1} {family} ({band})"
        comp = pipeline._fit_step(step, self.residual, label)
        self.residuals.append(self.residual - comp.contribution)
        self.steps.append(
            {"band": band, "family": family, "params": dict(params), "component": comp}
        )
        self.revision += 1
        return comp

    def undo(self):
        if not self.steps:
            raise ServiceError(409, "nothing_to_undo", "no applied steps")
        self.steps.pop()
        self.residuals.pop()
        self.revision += 1

    def components(self):
        return tuple(s["component"] for s in self.steps)

    def as_result(self) -> DecompositionResult:
        random, p_value, degenerate, _ = pipeline._residual_verdict(
            self.residual, stats.DEFAULT_ALPHA
        )
        diagnostics = {"session": self.id, "outliers_replaced": self.outliers_replaced}
        if degenerate:
            diagnostics["degenerate_residual"] = True
        return DecompositionResult(
            self.trace, self.components(), self.residual, random, p_value, diagnostics
        )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "revision": self.revision,
            "outliers_replaced": self.outliers_replaced,
            "trace": {
                "start_date": self.trace.start_date.isoformat(),
                "unit": self.trace.unit,
                "values": self.trace.values.tolist(),
            },
            "steps": [
                {
                    "band": s["band"],
                    "family": s["family"],
                    "params": s["params"],
                    "component": serialization._component_to_dict(s["component"]),
                }
                for s in self.steps
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Session":
        trace = Trace(
            dt.date.fromisoformat(d["trace"]["start_date"]),
            d["trace"]["values"],
            d["trace"].get("unit", "ms"),
        )
        session = cls(d["id"], trace, d.get("outliers_replaced", 0))
        for s in d["steps"]:
            comp = serialization._component_from_dict(s["component"])
            session.residuals.append(session.residual - comp.contribution)
            session.steps.append(
                {"band": s["band"], "family": s["family"], "params": s["params"], "component": comp}
            )
        session.revision = d.get("revision", len(session.steps))
        return session


class SessionStore:
    def __init__(self, state_dir: str):
        self.dir = pathlib.Path(state_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, Session] = {}
        self.lock = threading.Lock()
        for path in self.dir.glob("session-*.json"):
            try:
                session = Session.from_dict(json.loads(path.read_text()))
                self.sessions[session.id] = session
            except (ValueError, KeyError):
                continue  # unreadable session files are skipped, not fatal

    def get(self, sid: str) -> Session:
        try:
            return self.sessions[sid]
        except KeyError:
            raise ServiceError(404, "session_not_found", f"no session {sid}") from None

    def add(self, session: Session):
        with self.lock:
            self.sessions[session.id] = session
        self.persist(session)

    def persist(self, session: Session):
        path = self.dir / f"session-{session.id}.json"
        path.write_text(json.dumps(session.to_dict()))


def _series_summary(x: np.ndarray) -> dict:
    return {
        "length": int(len(x)),
        "mean": float(np.mean(x)),
        "std": float(np.std(x)),
        "min": float(np.min(x)),
        "max": float(np.max(x)),
    }


def _runs_payload(residual: np.ndarray) -> dict:
    random, p_value, degenerate, suggestion = pipeline._residual_verdict(
        residual, stats.DEFAULT_ALPHA
    )
    payload = {"random": random, "p_value": p_value, "degenerate": degenerate}
    if suggestion is not None:
        payload["suggested_period"] = suggestion
    return payload


def _acf_payload(residual: np.ndarray, max_lag: int) -> dict:
    max_lag = min(max_lag, len(residual) - 1)
    try:
        result = stats.acf(residual, max_lag)
    except DecompError:
        return {"lags": [], "correlations": [], "white_noise_band": None}
    return {
        "lags": result.lags.tolist(),
        "correlations": result.correlations.tolist(),
        "white_noise_band": result.white_noise_band(),
    }


def _component_payload(comp) -> dict:
    d = serialization._component_to_dict(comp)
    return d


def _step_response(session: Session, comp) -> dict:
    return {
        "revision": session.revision,
        "component": _component_payload(comp),
        "residual_summary": _series_summary(session.residual),
        "runs_test": _runs_payload(session.residual),
        "acf": _acf_payload(session.residual, 30),
    }


def create_app(state_dir: str = ".decomp-state", static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="perfdecomp session service", version=__version__)
    store = SessionStore(state_dir)

    @app.exception_handler(ServiceError)
    async def _service_error(request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    @app.exception_handler(DecompError)
    async def _decomp_error(request: Request, exc: DecompError):
        status = 422 if isinstance(exc, ValidationError) else 400
        return JSONResponse(
            status_code=status,
            content={"code": type(exc).__name__, "message": str(exc), "detail": ""},
        )

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/sessions", status_code=201)
    async def create_session(request: Request):
        body = (await request.body()).decode("utf-8", errors="replace")
        trace = serialization.parse_trace_csv(body)
        verdict = preprocess.validate(trace)
        verdict.require()
        filtered, report = preprocess.hampel_filter(trace)
        session = Session(uuid.uuid4().hex[:12], filtered, len(report))
        store.add(session)
        return {
            "id": session.id,
            "revision": session.revision,
            "validation": {"valid": verdict.valid, "problems": list(verdict.problems)},
            "outliers_replaced": len(report),
            "preview": {
                "start_date": filtered.start_date.isoformat(),
                **_series_summary(filtered.values),
            },
        }

    @app.get("/v1/sessions/{sid}")
    def get_session(sid: str):
        session = store.get(sid)
        return {
            "id": session.id,
            "revision": session.revision,
            "trace": {
                "start_date": session.trace.start_date.isoformat(),
                "unit": session.trace.unit,
                "values": session.trace.values.tolist(),
            },
            "steps": [
                {
                    "band": s["band"],
                    "family": s["family"],
                    "params": s["params"],
                    "component": _component_payload(s["component"]),
                }
                for s in session.steps
            ],
            "residual": session.residual.tolist(),
            "residual_summary": _series_summary(session.residual),
            "runs_test": _runs_payload(session.residual),
            "acf": _acf_payload(session.residual, 30),
        }

    @app.post("/v1/sessions/{sid}/steps")
    async def add_step(sid: str, request: Request):
        session = store.get(sid)
        body = await request.json()
        for key in ("band", "family"):
            if key not in body:
                raise ServiceError(422, "bad_step", f"missing field {key!r}")
        params = body.get("params", {})
        if params == "auto":
            params = {}
        with session.lock:
            comp = session.apply_step(body["band"], body["family"], params)
            store.persist(session)
            return _step_response(session, comp)

    @app.delete("/v1/sessions/{sid}/steps/last")
    def undo_step(sid: str):
        session = store.get(sid)
        with session.lock:
            session.undo()
            store.persist(session)
            return {
                "revision": session.revision,
                "residual_summary": _series_summary(session.residual),
                "runs_test": _runs_payload(session.residual),
                "acf": _acf_payload(session.residual, 30),
            }

    @app.get("/v1/sessions/{sid}/residual")
    def residual(sid: str):
        session = store.get(sid)
        return {
            "revision": session.revision,
            "dates": [d.isoformat() for d in session.trace.dates()],
            "values": session.residual.tolist(),
        }

    @app.get("/v1/sessions/{sid}/acf")
    def session_acf(sid: str, max_lag: int = 30):
        session = store.get(sid)
        return _acf_payload(session.residual, max_lag)

    @app.get("/v1/sessions/{sid}/runs-test")
    def session_runs(sid: str):
        session = store.get(sid)
        return _runs_payload(session.residual)

    @app.post("/v1/sessions/{sid}/forecast")
    async def session_forecast(sid: str, request: Request):
        session = store.get(sid)
        body = await request.json()
        horizon = int(body.get("horizon", 28))
        actual = body.get("actual")
        result = session.as_result()
        fc = pipeline.forecast(result, horizon, actual)
        payload = {
            "horizon": horizon,
            "predicted": fc.predicted.tolist(),
            "per_component": {
                label: series.tolist() for label, series in fc.per_component
            },
        }
        if fc.mape_percent is not None:
            payload["metrics"] = {
                "mape_percent": fc.mape_percent,
                "erp_normalized": fc.erp_normalized,
            }
        return payload

    @app.get("/v1/sessions/{sid}/export")
    def export_session(sid: str):
        session = store.get(sid)
        recipe = {
            "name": f"session-{session.id}",
            "runs_alpha": stats.DEFAULT_ALPHA,
            "refine_passes": 0,
            "steps": [
                {"band": s["band"], "family": s["family"], "params": s["params"] or "auto"}
                for s in session.steps
            ],
        }
        return {
            "recipe": recipe,
            "result": serialization.result_to_dict(session.as_result()),
        }

    @app.post("/v1/auto")
    async def one_shot_auto(request: Request):
        body = await request.json()
        if "csv" not in body:
            raise ServiceError(422, "bad_request", "missing `csv` field")
        trace = serialization.parse_trace_csv(body["csv"])
        from .emd import EemdConfig, EmdConfig

        config = EemdConfig(
            EmdConfig(max_imfs=int(body.get("max_imfs", 12))),
            ensemble_size=int(body.get("ensemble", 200)),
            noise_amplitude=float(body.get("noise", 0.2)),
            master_seed=int(body.get("seed", 0)),
        )
        result = pipeline.run_auto(trace, config)
        return serialization.result_to_dict(result)

    if static_dir and pathlib.Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
