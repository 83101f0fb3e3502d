from __future__ import annotations

from fastapi import APIRouter, Depends

from ..harness import SuitePlan, mds_certificate, run_family_suite
from ..settings import load_settings
from ..storage import mds_to_dict, suite_to_dict
from .dependencies import get_family, run_blocking

router = APIRouter(prefix="/api", tags=["verify"])


@router.get("/verify/{n}")
async def verify_family(family: tuple = Depends(get_family)):
    """Run the verification suite for one family model"""
    plan = SuitePlan.from_settings(load_settings())
    report = await run_blocking(run_family_suite, *family, plan=plan)
    return suite_to_dict(report)


@router.get("/mds/{n}")
async def get_mds_certificate(family: tuple = Depends(get_family)):
    cert = await run_blocking(mds_certificate, *family)
    return mds_to_dict(cert)
