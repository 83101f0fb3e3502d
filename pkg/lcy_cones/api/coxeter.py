from __future__ import annotations

from typing import List, Optional

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from ..coxeter import chamber_reduce, sigma_membership, simple_roots
from ..lattice import ClassVector
from ..settings import load_settings
from ..storage import domain_result_to_dict, generators_from_json, trace_to_dict
from .dependencies import load_family_async, run_blocking, validated_family

router = APIRouter(prefix="/api", tags=["coxeter"])


class ReduceRequest(BaseModel):
    n: int = Field(..., ge=1, le=6, description="Boundary length")
    p: List[int] = Field(..., min_length=1, max_length=6, description="Blowup depths")
    x: List[int] = Field(..., min_length=1, description="Class in ambient coordinates")
    max_iter: Optional[int] = Field(None, ge=1)


class GeneratorSpec(BaseModel):
    label: str = Field(..., min_length=1)
    matrix: List[List[int]] = Field(..., min_length=1, description="Integer matrix acting on column vectors")


class SigmaRequest(BaseModel):
    n: int = Field(..., ge=1, le=6)
    p: List[int] = Field(..., min_length=1, max_length=6)
    x: List[int] = Field(..., min_length=1)
    y: Optional[List[int]] = Field(None, description="Ample reference class; defaults to the sum of nef rays")
    radius: Optional[int] = Field(None, ge=0, description="Word-length radius")
    generators: List[GeneratorSpec] = Field(default_factory=list, description="Extra isometries fixing every D_i")


def _vector(values: List[int], rank: int, name: str) -> ClassVector:
    if len(values) != rank:
        raise HTTPException(status_code=400, detail=f"{name} needs {rank} coordinates, got {len(values)}")
    return ClassVector(tuple(values))


@router.post("/reduce")
async def reduce_class(request: ReduceRequest):
    """Reflect x into the fundamental chamber of the interior (-2)-curves"""
    n, p = validated_family(request.n, request.p)
    model = await load_family_async(n, p)
    x = _vector(request.x, model.rank, "x")
    max_iter = request.max_iter or load_settings().default_max_iter
    rs = simple_roots(model)
    trace = await run_blocking(chamber_reduce, rs, x, max_iter)
    return trace_to_dict(trace, rs.labels)


@router.post("/sigma")
async def sigma_check(request: SigmaRequest):
    """Search a word-length ball for an image of x that lowers x . y"""
    n, p = validated_family(request.n, request.p)
    model = await load_family_async(n, p)
    x = _vector(request.x, model.rank, "x")
    y = _vector(request.y, model.rank, "y") if request.y is not None else None
    radius = request.radius if request.radius is not None else load_settings().default_radius
    specs = [g.model_dump() for g in request.generators]
    generators = await run_blocking(generators_from_json, model, specs)
    result = await run_blocking(sigma_membership, model, y, x, radius, generators)
    data = domain_result_to_dict(result)
    data["images_checked"] = str(result.images_checked)
    return data
