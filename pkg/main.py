import logging
import time

from fastapi import FastAPI, HTTPException, Query, Request
from starlette.middleware.base import BaseHTTPMiddleware

from errors import ConfigError, SolverError
from models import ComparisonReport
from schemas import EffectiveReport, StudyConfig, SweepReport, ValidationSummary
from settings import configure_logging
from solvers.study_orchestrator import METHODS, run_compare, run_homogenize, run_sweep, run_validate

logger = logging.getLogger(__name__)

configure_logging()

app = FastAPI(title="lamhom: periodic thermodiffusive laminates")


class NoCacheTimingMiddleware(BaseHTTPMiddleware):
    async def dispatch(self, request: Request, call_next):
        started = time.perf_counter()
        response = await call_next(request)
        response.headers["Cache-Control"] = "no-cache, no-store, must-revalidate"
        response.headers["X-Process-Time"] = f"{time.perf_counter() - started:.6f}"
        return response


app.add_middleware(NoCacheTimingMiddleware)


def _run(study, *args, **kwargs):
    """Map domain errors onto HTTP errors."""
    try:
        return study(*args, **kwargs)
    except ConfigError as exc:
        location = ".".join(str(part) for part in exc.loc)
        raise HTTPException(status_code=422, detail=f"{location}: {exc.message}" if location else exc.message)
    except SolverError as exc:
        logger.error("solver error: %s", exc)
        raise HTTPException(status_code=500, detail=str(exc))
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.get("/api/health")
async def health():
    return {"status": "ok"}


@app.post("/api/homogenize", response_model=EffectiveReport)
def api_homogenize(config: StudyConfig, method: str = Query("both")):
    """
    Effective constants of the posted laminate.

    The method is one of analytic, cell-solver or both; with both the report
    carries the largest relative discrepancy between the two.
    """
    if method not in METHODS:
        raise HTTPException(status_code=422, detail=f"unsupported method {method!r}")
    return _run(run_homogenize, config, method=method)["report"]


@app.post("/api/sweep", response_model=SweepReport)
def api_sweep(config: StudyConfig):
    return _run(run_sweep, config)["report"]


@app.post("/api/compare", response_model=ComparisonReport)
def api_compare(config: StudyConfig):
    """Heterogeneous versus homogenized comparison. Field tables are not returned."""
    return _run(run_compare, config)["report"]


@app.post("/api/validate", response_model=ValidationSummary)
def api_validate(config: StudyConfig):
    """Invariant suite. A failed check still answers 200 with passed = false."""
    return _run(run_validate, config)["summary"]
