"""Weyl group of the interior (-2)-curves: reflections, chamber reduction, orbits and sigma(y).

The groups involved are infinite in general. Everything quantified over the group is
done up to an explicit word-length radius, and results say which radius was checked.
"""

from __future__ import annotations

import logging
import random
from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence

from sympy import Matrix

from .cones import ample_class, cone_of_curves
from .exceptions import InvalidGenerator, MaxIterExceeded, NotARoot, YNotInterior
from .lattice import ClassVector, IntersectionForm, pair, to_fraction
from .models import CurveKind, SurfaceModel
from .polyhedral import RationalCone

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RootSystemData:
    form: IntersectionForm
    simple_roots: tuple[ClassVector, ...]
    labels: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.simple_roots)


@dataclass(frozen=True)
class ReductionTrace:
    input: ClassVector
    word: tuple[int, ...]  # simple-root indices, applied left to right
    output: ClassVector
    iterations: int

    def word_labels(self, rs: RootSystemData) -> list[str]:
        return [rs.labels[i] for i in self.word]


class MembershipStatus(str, Enum):
    VERIFIED_TO_RADIUS = "VerifiedToRadius"
    VIOLATED = "Violated"


@dataclass(frozen=True)
class DomainMembershipResult:
    status: MembershipStatus
    radius: int
    witness: Optional[tuple[str, ...]] = None  # generator labels, applied left to right
    images_checked: int = 0

    @property
    def verified(self) -> bool:
        return self.status == MembershipStatus.VERIFIED_TO_RADIUS


@dataclass(frozen=True)
class ExtraGenerator:
    """An isometry fixing every boundary class, given by an integer matrix acting on columns."""

    label: str
    matrix: tuple[tuple[int, ...], ...]

    def apply(self, v: ClassVector) -> ClassVector:
        return ClassVector(tuple(sum(a * b for a, b in zip(row, v.coords)) for row in self.matrix))


def simple_roots(model: SurfaceModel) -> RootSystemData:
    """Interior (-2)-curves: chain roots first (by chain, then depth), then central curves."""
    records = model.records_of_kind(CurveKind.INTERIOR_MINUS_TWO)
    if model.is_family():
        chain = set(model.exceptional_labels())
        records = [r for r in records if r.label in chain] + [r for r in records if r.label not in chain]
    return RootSystemData(model.form, tuple(r.cls for r in records), tuple(r.label for r in records))


def reflect(form: IntersectionForm, alpha: ClassVector, beta: ClassVector) -> ClassVector:
    """s_alpha(beta) = beta + (alpha . beta) alpha."""
    sq = pair(form, alpha, alpha)
    if sq != -2:
        raise NotARoot(sq)
    return beta + alpha * pair(form, alpha, beta)


def is_in_chamber(rs: RootSystemData, x: ClassVector) -> bool:
    rs.form.check(x)
    return all(pair(rs.form, x, delta) >= 0 for delta in rs.simple_roots)


def replay(rs: RootSystemData, x: ClassVector, word: Sequence[int]) -> ClassVector:
    for i in word:
        x = reflect(rs.form, rs.simple_roots[i], x)
    return x


def chamber_reduce(rs: RootSystemData, x: ClassVector, max_iter: int = 10_000) -> ReductionTrace:
    """Reflect in the lowest-indexed violated root until x is in the fundamental chamber.

    Terminates for x in the closed positive cone: each step lowers x . a by a positive
    integer for any ample a.
    """
    rs.form.check(x)
    current = x
    word: list[int] = []
    while True:
        violated = next((i for i, delta in enumerate(rs.simple_roots) if pair(rs.form, current, delta) < 0), None)
        if violated is None:
            break
        if len(word) >= max_iter:
            raise MaxIterExceeded(max_iter, ReductionTrace(x, tuple(word), current, len(word)))
        current = reflect(rs.form, rs.simple_roots[violated], current)
        word.append(violated)
    logger.debug(f"chamber_reduce: {len(word)} reflections")
    return ReductionTrace(x, tuple(word), current, len(word))


def orbit_ball(rs: RootSystemData, seeds: Sequence[ClassVector], radius: int) -> list[ClassVector]:
    """All classes reachable from the seeds by at most ``radius`` simple reflections, sorted."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    seen = {s for s in seeds}
    frontier = list(seen)
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for delta in rs.simple_roots:
                w = reflect(rs.form, delta, v)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        if not nxt:
            break
        frontier = nxt
    return sorted(seen, key=lambda v: v.coords)


def _integer_entry(value) -> int:
    # 2.0 and "2" are fine, 2.5 and "1/2" are not
    if isinstance(value, bool):
        raise TypeError("boolean matrix entry")
    q = Fraction(value.strip()) if isinstance(value, str) else to_fraction(value)
    if q.denominator != 1:
        raise ValueError(f"{value} is not an integer")
    return q.numerator


def validate_generator(model: SurfaceModel, label: str, matrix: Sequence[Sequence[int]]) -> ExtraGenerator:
    """Accept an integer matrix only if it preserves the form and fixes every D_i."""
    if not label or label in model.labels:
        raise InvalidGenerator(label, "label must be non-empty and differ from every curve label")
    rank = model.rank
    try:
        rows = tuple(tuple(_integer_entry(a) for a in row) for row in matrix)
    except (TypeError, ValueError, ArithmeticError):
        raise InvalidGenerator(label, "entries must be integers")
    if len(rows) != rank or any(len(row) != rank for row in rows):
        raise InvalidGenerator(label, f"matrix must be {rank}x{rank}")
    m = Matrix(rows)
    g = model.form.matrix()
    if m.T * g * m != g:
        raise InvalidGenerator(label, "does not preserve the intersection form")
    generator = ExtraGenerator(label, rows)
    for record in model.boundary:
        if generator.apply(record.cls) != record.cls:
            raise InvalidGenerator(label, f"moves boundary component {record.label}")
    return generator


def _inverse(generator: ExtraGenerator) -> Optional[ExtraGenerator]:
    m = Matrix(generator.matrix)
    inverse = m.inv()
    if inverse == m:
        return None
    rows = tuple(tuple(int(inverse[i, j]) for j in range(m.cols)) for i in range(m.rows))
    return ExtraGenerator(f"{generator.label}^-1", rows)


def check_interior(model: SurfaceModel, y: ClassVector, curves: Optional[RationalCone] = None) -> None:
    model.form.check(y)
    if pair(model.form, y, y) <= 0:
        raise YNotInterior("y^2 must be positive")
    curves = curves or cone_of_curves(model)
    for idx, ray in enumerate(curves.rays):
        if pair(model.form, y, ray) <= 0:
            raise YNotInterior(f"y . {curves.label_of(idx)} = {pair(model.form, y, ray)}")


def sigma_membership(
    model: SurfaceModel,
    y: Optional[ClassVector],
    x: ClassVector,
    radius: int,
    extra_generators: Sequence[ExtraGenerator] = (),
) -> DomainMembershipResult:
    """Search the group ball of the given radius for gamma with gamma(x) . y < x . y.

    Words are explored breadth first over the simple reflections followed by the extra
    generators (and their inverses). A single reflection s_alpha is decided by the sign
    of (x . alpha)(alpha . y), which equals s_alpha(x) . y - x . y.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    form = model.form
    form.check(x)
    curves = cone_of_curves(model) if model.is_family() else None
    if y is None:
        y = ample_class(model)
    if curves is not None:
        check_interior(model, y, curves)
    elif pair(form, y, y) <= 0:
        raise YNotInterior("y^2 must be positive")

    rs = simple_roots(model)
    moves: list[tuple[str, Callable[[ClassVector], ClassVector]]] = [
        (label, lambda v, a=alpha: reflect(form, a, v)) for label, alpha in zip(rs.labels, rs.simple_roots)
    ]
    for g in extra_generators:
        moves.append((g.label, g.apply))
        inv = _inverse(g)
        if inv is not None:
            moves.append((inv.label, inv.apply))

    base = pair(form, x, y)
    for label, alpha in zip(rs.labels, rs.simple_roots):
        closed = pair(form, x, alpha) * pair(form, alpha, y)
        direct = pair(form, reflect(form, alpha, x), y) - base
        if closed != direct:
            raise ArithmeticError(f"closed form disagrees for {label}: {closed} != {direct}")
        if radius >= 1 and closed < 0:
            return DomainMembershipResult(MembershipStatus.VIOLATED, radius, (label,), 1)

    seen = {x}
    queue: deque[tuple[ClassVector, tuple[str, ...]]] = deque([(x, ())])
    checked = 0
    while queue:
        v, word = queue.popleft()
        if len(word) == radius:
            continue
        for label, move in moves:
            w = move(v)
            if w in seen:
                continue
            seen.add(w)
            checked += 1
            path = word + (label,)
            if pair(form, w, y) < base:
                return DomainMembershipResult(MembershipStatus.VIOLATED, radius, path, checked)
            queue.append((w, path))

    logger.debug(f"sigma_membership: {checked} images within radius {radius}")
    return DomainMembershipResult(MembershipStatus.VERIFIED_TO_RADIUS, radius, None, checked)


def replay_word(model: SurfaceModel, x: ClassVector, word: Sequence[str], extra_generators: Sequence[ExtraGenerator] = ()) -> ClassVector:
    """Apply a labelled word (left to right) to x."""
    rs = simple_roots(model)
    roots = dict(zip(rs.labels, rs.simple_roots))
    extras = {g.label: g for g in extra_generators}
    for g in extra_generators:
        inv = _inverse(g)
        if inv is not None:
            extras[inv.label] = inv
    for label in word:
        if label in roots:
            x = reflect(model.form, roots[label], x)
        else:
            x = extras[label].apply(x)
    return x


def sample_positive_classes(
    form: IntersectionForm,
    reference: ClassVector,
    count: int,
    rng: random.Random,
    bound: int = 5,
    max_tries: int = 1_000_000,
) -> list[ClassVector]:
    """Pseudo-random integer classes with coordinates in [-bound, bound] in the closed positive cone.

    Kept classes satisfy x^2 >= 0 and x . reference >= 0 and are nonzero. Stops early
    after ``max_tries`` draws.
    """
    out: list[ClassVector] = []
    tries = 0
    while len(out) < count and tries < max_tries:
        tries += 1
        x = ClassVector(tuple(rng.randint(-bound, bound) for _ in range(form.rank)))
        if x.is_zero():
            continue
        if pair(form, x, x) >= 0 and pair(form, x, reference) >= 0:
            out.append(x)
    if len(out) < count:
        logger.warning(f"sampled {len(out)} of {count} positive classes in {tries} draws")
    return out
