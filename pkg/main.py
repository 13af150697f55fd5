import math
import logging
from datetime import datetime
from typing import Any, List, Optional, Union

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from config.messages import STATUS_MESSAGES
from config.settings import configure_logging, get_settings
from services.initialization_service import InitializationService
from states.coherent import CoherentParams, default_space, mcs
from states.families import builtin_family
from utils.errors import RotorError
from utils.hilbert import SpaceSpec, Tower
from utils.state_io import parse_complex

settings = get_settings()
configure_logging(settings)
logger = logging.getLogger(__name__)


app = FastAPI(title="Rotor coherent states", version="1.0.0")


initialization_service = None

ComplexInput = Union[float, str]


class StateRequest(BaseModel):
    family: int
    z: ComplexInput
    zl: ComplexInput = 0.0
    zm: ComplexInput = 0.0
    jmax: Optional[float] = None


class ExpectRequest(StateRequest):
    direct: bool = False


class VerifyRequest(BaseModel):
    jmax: Optional[float] = None
    families: Optional[List[int]] = None
    draws: Optional[int] = None


def _complex(value: ComplexInput) -> complex:
    return complex(value) if isinstance(value, (int, float)) else parse_complex(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return _jsonable(value.item())
    if isinstance(value, complex):
        return {"re": _jsonable(value.real), "im": _jsonable(value.imag)}
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


def _params(body: StateRequest) -> CoherentParams:
    return CoherentParams(builtin_family(body.family), _complex(body.z), _complex(body.zl), _complex(body.zm))


def _space(params: CoherentParams, jmax: Optional[float]) -> SpaceSpec:
    if jmax is None:
        return default_space(params.family, params.x)
    two_j = int(round(2 * jmax))
    if params.family.tower is Tower.INTEGER:
        two_j -= two_j % 2
    return SpaceSpec(two_j, params.family.tower)


def _not_ready() -> JSONResponse:
    return JSONResponse(status_code=503, content={"success": False, "status": "initializing",
                                                  "error": STATUS_MESSAGES["initializing"]})


def _failure(e: Exception) -> JSONResponse:
    logger.error(f"Request failed: {e}", exc_info=True)
    return JSONResponse(status_code=400, content={"success": False, "status": "error", "error": str(e)})


@app.on_event("startup")
async def startup_event():
    global initialization_service
    try:
        initialization_service = InitializationService(settings)
        if not initialization_service.initialize():
            raise RuntimeError("Service initialization failed")
    except Exception as e:
        logger.error(f"Startup failed: {e}", exc_info=True)
        raise


@app.get("/health")
async def health():
    if not initialization_service:
        return _not_ready()
    return {"success": True, "status": "ready", "message": STATUS_MESSAGES["ready"],
            "services": initialization_service.get_initialization_status()}


@app.get("/families")
async def families():
    if not initialization_service:
        return _not_ready()
    return _jsonable(initialization_service.table_service.families_table())


@app.post("/expect")
async def expect(body: ExpectRequest):
    if not initialization_service:
        return _not_ready()
    try:
        params = _params(body)
        service = initialization_service.expectation_service
        report, n_lab, n_mol = service.mcs_expectations(params)
        result = {"success": True, "status": "ok", "closed": report.to_dict(),
                  "lab_direction": n_lab, "molecular_direction": n_mol}
        if body.direct:
            result["direct"] = service.mcs_direct_report(params, _space(params, body.jmax)).to_dict()
        return _jsonable(result)
    except (RotorError, ValueError) as e:
        return _failure(e)


@app.post("/mcs")
async def build_mcs(body: StateRequest):
    if not initialization_service:
        return _not_ready()
    try:
        params = _params(body)
        state = mcs(params, _space(params, body.jmax))
        amplitudes = [{"two_j": label.two_j, "two_k": label.two_k, "two_m": label.two_m,
                       "re": value.real, "im": value.imag} for label, value in sorted(state.coeffs.items())]
        return _jsonable({"success": True, "status": "ok", "two_j_max": state.space.two_j_max,
                          "tower": state.space.tower.value, "dropped_weight": state.dropped_weight,
                          "amplitudes": amplitudes})
    except (RotorError, ValueError) as e:
        return _failure(e)


@app.get("/tables/{which}")
async def tables(which: str):
    if not initialization_service:
        return _not_ready()
    result = initialization_service.table_service.reproduce(which)
    if result.get("status") == "unknown_table":
        return JSONResponse(status_code=404, content=result)
    return _jsonable(result)


@app.post("/verify/{suite}")
async def verify(suite: str, body: Optional[VerifyRequest] = None):
    if not initialization_service:
        return _not_ready()
    options = {}
    if body is not None:
        if body.jmax is not None:
            options["two_j_max"] = int(round(2 * body.jmax))
        if body.families:
            options["family_ids"] = body.families
        if body.draws is not None:
            options["draws"] = body.draws
    result = initialization_service.verification_service.run(suite, **options)
    if result.get("status") == "unknown_suite":
        return JSONResponse(status_code=404, content=result)
    return _jsonable(result)


@app.middleware("http")
async def logging_middleware(request: Request, call_next):
    start_time = datetime.now()
    try:
        response = await call_next(request)
        process_time = (datetime.now() - start_time).total_seconds()
        response.headers["X-Process-Time"] = str(round(process_time, 3))
        logger.info(f"{request.method} {request.url.path} - {response.status_code} - {process_time:.3f}s")
        return response
    except Exception as e:
        process_time = (datetime.now() - start_time).total_seconds()
        logger.error(f"{request.method} {request.url.path} - Error: {e} - {process_time:.3f}s")
        raise


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        app,
        host=settings.host,
        port=settings.port,
        log_level="info"
    )
