from __future__ import annotations

from itertools import product
from typing import TYPE_CHECKING, Iterator, Sequence

from .exceptions import InvalidDepth, UnsupportedN

if TYPE_CHECKING:
    from .settings import EngineSettings

FAMILY_NS: tuple[int, ...] = (1, 2, 3, 4, 5, 6)

# Picard rank of the base surface of each family
BASE_RANKS: dict[int, int] = {1: 1, 2: 2, 3: 1, 4: 2, 5: 5, 6: 4}

# n = 1 needs the three flex blowups before the chain is defined
MIN_DEPTH: dict[int, int] = {n: (3 if n == 1 else 1) for n in FAMILY_NS}

# desk grid limits: p_i up to 4 (n = 1: 3..6), total depth up to 14
GRID_MAX_DEPTH = 4
GRID_MAX_DEPTH_N1 = 6
GRID_MAX_TOTAL = 14

# central curves per family, in curve-basis order
CENTRAL_LABELS: dict[int, tuple[str, ...]] = {
    1: ("F",),
    2: ("F_1", "F_2"),
    3: ("F",),
    4: ("F_1", "F_2"),
    5: ("F_1", "F_2", "F_3", "F_4", "F_5"),
    6: ("F_{1,4}", "F_{2,5}", "F_{3,6}", "F_{1,3,5}", "F_{2,4,6}"),
}

# n = 6 index set K, in the order of CENTRAL_LABELS[6]
N6_INDEX_SET: tuple[tuple[int, ...], ...] = ((1, 4), (2, 5), (3, 6), (1, 3, 5), (2, 4, 6))


def check_depths(n: int, p: Sequence[int]) -> tuple[int, ...]:
    """Validate blowup depths for family n and return them as a tuple."""
    if n not in FAMILY_NS:
        raise UnsupportedN(n)
    try:
        depths = tuple(int(x) for x in p)
    except (TypeError, ValueError):
        raise InvalidDepth(n, tuple(p), "depths must be integers")
    if len(depths) != n:
        raise InvalidDepth(n, depths, f"expected {n} depths, got {len(depths)}")
    low = MIN_DEPTH[n]
    if any(x < low for x in depths):
        raise InvalidDepth(n, depths, f"every depth must be at least {low}")
    return depths


def iter_depths(n: int, low: int, high: int, max_total: int) -> Iterator[tuple[int, ...]]:
    for p in product(range(low, high + 1), repeat=n):
        if sum(p) <= max_total:
            yield p


def desk_grid(settings: EngineSettings) -> list[tuple[int, tuple[int, ...]]]:
    """All (n, p) pairs within the configured grid bounds, ordered by n then p."""
    grid = []
    for n in FAMILY_NS:
        if n == 1:
            low, high = settings.grid_min_depth_n1, settings.grid_max_depth_n1
        else:
            low, high = 1, settings.grid_max_depth
        grid.extend((n, p) for p in iter_depths(n, low, high, settings.grid_max_total))
    return grid


def reduced_grid(max_depth: int = 2) -> list[tuple[int, tuple[int, ...]]]:
    """A small grid for quick runs: depths 1..max_depth (3..max_depth + 2 for n = 1)."""
    grid = []
    for n in FAMILY_NS:
        low = MIN_DEPTH[n]
        high = low + max_depth - 1
        grid.extend((n, p) for p in iter_depths(n, low, high, 10**6))
    return grid
