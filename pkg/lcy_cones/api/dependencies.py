"""FastAPI dependencies for common operations."""

from __future__ import annotations

import asyncio
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache, partial
from typing import Any, Callable, List

from fastapi import HTTPException, Query
from fastapi import Path as PathParam

from ..config import BASE_RANKS, check_depths
from ..exceptions import CoxeterError, FamilySuiteError, LcyConesError, ModelNotFromFamily, RankLimitExceeded
from ..models import SurfaceModel
from ..settings import load_settings
from ..surfaces import build_family

# Thread executor for blocking operations
executor = ThreadPoolExecutor(max_workers=4)


def http_error(error: LcyConesError) -> HTTPException:
    """Map an engine error to an HTTP error.

    Precondition failures of otherwise valid input (a non-ample y, a reduction that
    does not finish, a model outside the family) are 422. Engine failures inside a
    suite are 500; everything else is 400.
    """
    if isinstance(error, FamilySuiteError):
        return HTTPException(status_code=500, detail=error.message)
    if isinstance(error, (CoxeterError, ModelNotFromFamily)):
        return HTTPException(status_code=422, detail=error.user_message)
    return HTTPException(status_code=400, detail=error.user_message)


async def run_blocking(func: Callable[..., Any], *args: Any, **kwargs: Any) -> Any:
    """Run an engine call in the executor, translating engine errors."""
    loop = asyncio.get_event_loop()
    try:
        return await loop.run_in_executor(executor, partial(func, *args, **kwargs))
    except LcyConesError as e:
        raise http_error(e)


@lru_cache(maxsize=64)
def family_model(n: int, p: tuple[int, ...]) -> SurfaceModel:
    """Memoised family models; build_family is deterministic."""
    return build_family(n, p)


def validated_family(n: int, p: List[int]) -> tuple[int, tuple[int, ...]]:
    """Check (n, p) and the rank guard without building anything.

    Raises:
        HTTPException: 400 if n or p is invalid or the model is too large
    """
    try:
        depths = check_depths(n, p)
        limit = load_settings().max_rank
        rank = BASE_RANKS[n] + sum(depths)
        if rank > limit:
            raise RankLimitExceeded(rank, limit)
    except LcyConesError as e:
        raise http_error(e)
    return n, depths


def get_family(
    n: int = PathParam(..., description="Boundary length 1..6"),
    p: List[int] = Query(..., description="Blowup depths, one per boundary component"),
) -> tuple[int, tuple[int, ...]]:
    return validated_family(n, p)


async def load_family_async(n: int, p: tuple[int, ...]) -> SurfaceModel:
    return await run_blocking(family_model, n, p)
