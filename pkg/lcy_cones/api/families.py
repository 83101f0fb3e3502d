from __future__ import annotations

from typing import List, Literal

from fastapi import APIRouter, Depends, Query

from ..cones import cone_of_curves, nef_cone, nefe_prime
from ..formulas import compare_dual_basis
from ..lattice import ClassVector
from ..polyhedral import contains
from ..storage import certificate_to_dict, cone_to_dict, dual_rows_to_dict, encode_vector, model_to_dict
from .dependencies import get_family, load_family_async, run_blocking

router = APIRouter(prefix="/api/families", tags=["families"])


@router.get("/{n}")
async def get_model(family: tuple = Depends(get_family)):
    """Family model JSON for (n, p)"""
    model = await load_family_async(*family)
    return model_to_dict(model)


@router.get("/{n}/curves")
async def get_curves(family: tuple = Depends(get_family)):
    """Cone of curves generators"""
    model = await load_family_async(*family)
    return cone_to_dict(await run_blocking(cone_of_curves, model))


@router.get("/{n}/nef")
async def get_nef(family: tuple = Depends(get_family)):
    """Rays of the nef cone"""
    model = await load_family_async(*family)
    return cone_to_dict(await run_blocking(nef_cone, model))


@router.get("/{n}/nefe-prime")
async def get_nefe_prime(family: tuple = Depends(get_family)):
    model = await load_family_async(*family)
    return cone_to_dict(await run_blocking(nefe_prime, model))


@router.get("/{n}/dual-basis")
async def get_dual_basis(family: tuple = Depends(get_family)):
    """Printed dual-basis formulas next to the Gram-inverse values"""
    model = await load_family_async(*family)
    return dual_rows_to_dict(await run_blocking(compare_dual_basis, model))


@router.get("/{n}/member")
async def get_member(
    family: tuple = Depends(get_family),
    x: List[int] = Query(..., description="Class in ambient coordinates"),
    cone: Literal["curves", "nef"] = Query("curves"),
):
    """Membership certificate: coefficients over the cone rays, or a separating functional"""
    model = await load_family_async(*family)
    target = await run_blocking(cone_of_curves if cone == "curves" else nef_cone, model)
    cert = await run_blocking(contains, model.form, target, ClassVector(tuple(x)))
    data = {"cone": cone, "x": encode_vector(ClassVector(tuple(x))), **certificate_to_dict(cert)}
    if target.labels is not None:
        data["labels"] = list(target.labels)
    return data
