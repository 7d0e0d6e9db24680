from __future__ import annotations

import asyncio
import logging
from typing import Callable, Tuple, TypeVar

from fastapi import APIRouter, HTTPException

from app.charsum import PartitionTables
from app.codes import CodeSpec
from app.errors import FewWeightError, ParameterError
from app.reports import (
    bent_report,
    build_spec,
    field_setup,
    params_report,
    predict_report,
    spectrum_report,
    verify_report,
)
from app.schemas import (
    BentReport,
    CodeRequest,
    DistributionReport,
    ParamsReport,
    ParamsRequest,
    VerifyReport,
)

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/v1/codes", tags=["codes"])

T = TypeVar("T")


async def _offload(name: str, fn: Callable[[], T]) -> T:
    try:
        return await asyncio.to_thread(fn)
    except FewWeightError as exc:
        logger.warning("%s rejected (%s): %s", name, exc.detail, exc)
        raise HTTPException(status_code=exc.status_code, detail=exc.detail)
    except Exception as exc:
        logger.exception("%s failed: %s", name, exc)
        raise HTTPException(status_code=500, detail=f"{name}_failed")


def _spec_for(req: CodeRequest) -> Tuple[CodeSpec, PartitionTables]:
    _, _, part = field_setup(req.p, req.ell, req.k)
    return build_spec(part, du=req.du, dprime=req.dprime, i=req.i), part


@router.post("/params", response_model=ParamsReport)
async def params(req: ParamsRequest) -> ParamsReport:
    return await _offload("params", lambda: params_report(req.p, req.ell, req.k))


@router.post("/spectrum", response_model=DistributionReport)
async def spectrum(req: CodeRequest) -> DistributionReport:
    def run() -> DistributionReport:
        spec, part = _spec_for(req)
        return spectrum_report(spec, part, req.method)

    return await _offload("spectrum", run)


@router.post("/predict", response_model=DistributionReport)
async def predict(req: CodeRequest) -> DistributionReport:
    return await _offload("predict", lambda: predict_report(_spec_for(req)[0]))


@router.post("/verify", response_model=VerifyReport)
async def verify(req: CodeRequest) -> VerifyReport:
    def run() -> VerifyReport:
        spec, part = _spec_for(req)
        return verify_report(spec, part, req.method)

    return await _offload("verify", run)


@router.post("/bent", response_model=BentReport)
async def bent(req: CodeRequest) -> BentReport:
    def run() -> BentReport:
        if req.dprime is None:
            raise ParameterError("bent needs a dprime family")
        return bent_report(req.p, req.ell, req.k, family=req.dprime, i=req.i)

    return await _offload("bent", run)
