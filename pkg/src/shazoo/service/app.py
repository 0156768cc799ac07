"""FastAPI application wrapping the core package.

Run it with ``uvicorn shazoo.service.app:app``.  Data problems map to HTTP
400 and configuration problems to 422, mirroring the CLI exit codes.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import ConfigError, DataError, ShazooError
from . import handlers
from . import models as m

app = FastAPI(
    title="shazoo",
    version=__version__,
    description="Node-label prediction on weighted trees and graphs",
)


@app.exception_handler(ShazooError)
async def _shazoo_error(_: Request, exc: ShazooError):
    if isinstance(exc, ConfigError):
        status, kind = 422, "config"
    elif isinstance(exc, DataError):
        status, kind = 400, "data"
    else:  # pragma: no cover - unreachable with current hierarchy
        status, kind = 500, "data"
    return JSONResponse(status_code=status, content={"error": str(exc), "kind": kind})


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/graph/build", response_model=m.GraphSummary)
def build_graph(req: m.BuildGraphRequest):
    return handlers.build_graph(req)


@app.post("/tree/sample", response_model=m.SampleTreeResponse)
def sample_tree(req: m.SampleTreeRequest):
    return handlers.sample_tree_handler(req)


@app.post("/predict", response_model=m.PredictResponse)
def predict(req: m.PredictRequest):
    return handlers.predict(req)


@app.post("/adversary", response_model=m.AdversaryResponse)
def adversary(req: m.AdversaryRequest):
    return handlers.adversary(req)


@app.post("/audit", response_model=m.AuditResponse)
def audit(req: m.AuditRequest):
    return handlers.audit(req)


@app.post("/experiment/run", response_model=m.ExperimentResponse)
def experiment(req: m.ExperimentRequest):
    return handlers.experiment(req)
