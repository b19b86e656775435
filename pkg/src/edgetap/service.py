"""HTTP facade over the predictor and shipped presets.

Endpoints: GET /presets, POST /predict, POST /simulate-preview. All units
are millimetres; field names are snake_case. Validation failures return
400 with a field-level message; model-domain failures return 422. The
built explorer UI (if present) is served statically under /.

Run with ``python -m edgetap.service``; bind address from the
``EDGETAP_ADDR`` environment variable (default 127.0.0.1:8000).
"""

from __future__ import annotations

import math
import os
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import presets
from .predictor import (
    AxisConstants,
    AxisGeometry,
    EdgeSide,
    ModelConstants,
    ModelDomainError,
    TargetLayout,
    baseline_sr_2d,
    baseline_variance,
    predict_axis_sr,
    predict_moments,
)
from .simulation import _rng, _sample_with_rng
from .skewnormal import ParameterError, moments_to_skewnormal, skewnorm_pdf
from .taplog import constants_from_dict

MAX_CURVE_POINTS = 2048
MAX_PREVIEW_SAMPLES = 100_000


class PredictRequest(BaseModel):
    w: float
    h: float
    margin_x: float
    margin_y: float
    edge_x: str = "none"
    edge_y: str = "none"
    preset: str | None = None
    constants: dict | None = None
    curve_points: int | None = Field(default=None)
    baseline: bool = False


class SimulatePreviewRequest(PredictRequest):
    n: int
    seed: int = 0
    bins: int = 40


class ValidationFailure(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _build_layout(req: PredictRequest) -> TargetLayout:
    for name in ("w", "h"):
        if getattr(req, name) <= 0:
            raise ValidationFailure(name, "must be positive")
    for name in ("margin_x", "margin_y"):
        if getattr(req, name) < 0:
            raise ValidationFailure(name, "must be nonnegative")
    edges = {}
    for name in ("edge_x", "edge_y"):
        try:
            edges[name] = EdgeSide(getattr(req, name))
        except ValueError:
            raise ValidationFailure(name, "must be one of neg, pos, none") from None
    return TargetLayout(
        axis_x=AxisGeometry(req.w, req.margin_x, edges["edge_x"]),
        axis_y=AxisGeometry(req.h, req.margin_y, edges["edge_y"]),
    )


def _resolve_constants(req: PredictRequest) -> ModelConstants:
    if req.constants is not None:
        try:
            return constants_from_dict(req.constants)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParameterError):
                raise
            raise ValidationFailure("constants", str(exc)) from None
    name = req.preset or "exp1"
    try:
        return presets.load_preset(name)
    except KeyError as exc:
        raise ValidationFailure("preset", str(exc)) from None


def _axis_payload(geom: AxisGeometry, k: AxisConstants, curve_points: int | None) -> dict:
    m = predict_moments(geom, k)
    p = moments_to_skewnormal(m)
    payload = {
        "sr": predict_axis_sr(geom, k),
        "gamma1": m.gamma1, "sigma2": m.sigma2, "mu": m.mu,
        "xi": p.xi, "omega": p.omega, "alpha": p.alpha,
        "d_edge": geom.d_edge,
        "threshold": k.threshold,
    }
    if curve_points:
        half = 0.5 * geom.size
        lo = min(-half, p.xi - 4.0 * p.omega)
        hi = max(half, p.xi + 4.0 * p.omega)
        xs = np.linspace(lo, hi, curve_points)
        payload["curve"] = {
            "positions": xs.tolist(),
            "density": [skewnorm_pdf(float(x), p) for x in xs],
        }
        if k.baseline is not None:
            var = baseline_variance(geom.size, k.baseline.a, k.baseline.b)
            payload["curve"]["baseline_density"] = (
                np.exp(-0.5 * xs**2 / var) / math.sqrt(2.0 * math.pi * var)
            ).tolist()
    return payload


def create_app() -> FastAPI:
    app = FastAPI(title="edgetap", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def on_bad_request(request: Request, exc: RequestValidationError):
        details = [
            {"field": ".".join(str(p) for p in e.get("loc", []) if p != "body"),
             "message": e.get("msg", "invalid")}
            for e in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": details})

    @app.exception_handler(ValidationFailure)
    async def on_validation(request: Request, exc: ValidationFailure):
        return JSONResponse(status_code=400,
                            content={"detail": [{"field": exc.field, "message": str(exc)}]})

    @app.exception_handler(ModelDomainError)
    async def on_domain(request: Request, exc: ModelDomainError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(ParameterError)
    async def on_parameter(request: Request, exc: ParameterError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/presets")
    def get_presets():
        return presets.list_presets()

    @app.post("/predict")
    def post_predict(req: PredictRequest):
        if req.curve_points is not None and not (0 < req.curve_points <= MAX_CURVE_POINTS):
            raise ValidationFailure("curve_points", f"must be in 1..{MAX_CURVE_POINTS}")
        layout = _build_layout(req)
        k = _resolve_constants(req)
        ax = _axis_payload(layout.axis_x, k.x, req.curve_points)
        ay = _axis_payload(layout.axis_y, k.y, req.curve_points)
        out = {"sr": ax["sr"] * ay["sr"], "sr_x": ax["sr"], "sr_y": ay["sr"],
               "x": ax, "y": ay}
        if req.baseline:
            out["baseline_sr"] = baseline_sr_2d(layout, k)
        return out

    @app.post("/simulate-preview")
    def post_preview(req: SimulatePreviewRequest):
        if not (0 < req.n <= MAX_PREVIEW_SAMPLES):
            raise ValidationFailure("n", f"must be in 1..{MAX_PREVIEW_SAMPLES}")
        if not (1 < req.bins <= 200):
            raise ValidationFailure("bins", "must be in 2..200")
        layout = _build_layout(req)
        k = _resolve_constants(req)
        out = {}
        for name, geom, kc in (("x", layout.axis_x, k.x), ("y", layout.axis_y, k.y)):
            p = moments_to_skewnormal(predict_moments(geom, kc))
            rng = _rng(req.seed, 0 if name == "x" else 1)
            samples = _sample_with_rng(p, req.n, rng)
            counts, edges = np.histogram(samples, bins=req.bins)
            centers = 0.5 * (edges[:-1] + edges[1:])
            width = float(edges[1] - edges[0])
            out[name] = {
                "bin_edges": edges.tolist(),
                "counts": counts.tolist(),
                "density": (counts / (req.n * width)).tolist(),
                "overlay_density": [skewnorm_pdf(float(x), p) for x in centers],
            }
        return out

    ui_dir = os.environ.get("EDGETAP_UI_DIR")
    candidates = [ui_dir] if ui_dir else ["frontend/dist", Path(__file__).resolve().parents[2] / "frontend" / "dist"]
    for cand in candidates:
        if cand and Path(cand).is_dir():
            app.mount("/", StaticFiles(directory=str(cand), html=True), name="ui")
            break
    return app


app = create_app()


def main() -> None:
    import uvicorn

    addr = os.environ.get("EDGETAP_ADDR", "127.0.0.1:8000")
    host, _, port = addr.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
