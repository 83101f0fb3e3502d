"""Exact rational polyhedral cones.

Cones are stored by integer ray generators. Conversion to inequalities uses the
double description method with bitmask tight sets and the combinatorial adjacency
test; membership is decided by an exact phase-one simplex with Bland's rule, which
also yields a Farkas functional when the point is outside.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd, lcm
from typing import Optional, Sequence

from .exceptions import DimensionMismatch
from .lattice import ClassVector, IntersectionForm, classes_of_functionals, functional_of, integer_kernel

logger = logging.getLogger(__name__)


def _primitive(values: Sequence) -> tuple[int, ...]:
    """Smallest integer vector positively proportional to ``values``."""
    fractions = [Fraction(v) for v in values]
    scale = reduce(lcm, (f.denominator for f in fractions), 1)
    ints = [int(f * scale) for f in fractions]
    g = reduce(gcd, ints, 0)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def _dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


@dataclass(frozen=True)
class ConeMembershipCertificate:
    """Outcome of a membership test.

    ``coefficients`` are nonnegative and reproduce the query over the cone rays when
    ``member`` holds. Otherwise ``separating_functional`` is a row functional f (in
    ambient coordinates, acting by the standard dot product) with f . r >= 0 for all
    rays and f . x < 0.
    """

    member: bool
    coefficients: Optional[tuple[Fraction, ...]] = None
    separating_functional: Optional[ClassVector] = None


@dataclass(frozen=True)
class RationalCone:
    ambient_rank: int
    rays: tuple[ClassVector, ...]
    labels: Optional[tuple[str, ...]] = None

    @classmethod
    def from_rays(
        cls,
        ambient_rank: int,
        rays: Sequence[ClassVector],
        labels: Optional[Sequence[str]] = None,
    ) -> RationalCone:
        """Primitive, deduplicated generators in first-seen order; zero rays are dropped."""
        seen: dict[tuple[int, ...], int] = {}
        kept_labels: list[str] = []
        for idx, ray in enumerate(rays):
            if len(ray) != ambient_rank:
                raise DimensionMismatch(ambient_rank, len(ray), "ray")
            if ray.is_zero():
                continue
            key = ray.primitive().coords
            if key in seen:
                continue
            seen[key] = idx
            if labels is not None:
                kept_labels.append(labels[idx])
        return cls(
            ambient_rank,
            tuple(ClassVector(key) for key in seen),
            tuple(kept_labels) if labels is not None else None,
        )

    def __len__(self) -> int:
        return len(self.rays)

    def label_of(self, index: int) -> str:
        if self.labels is not None:
            return self.labels[index]
        return f"r{index}"

    @cached_property
    def halfspaces(self) -> tuple[ClassVector, ...]:
        """Row functionals h with cone = {x : h . x >= 0 for all h}."""
        rays, lineality = double_description([r.coords for r in self.rays], self.ambient_rank)
        out = list(rays)
        for line in lineality:
            out.append(line)
            out.append(-line)
        return tuple(out)


def double_description(rows: Sequence[Sequence[int]], dim: int) -> tuple[list[ClassVector], list[ClassVector]]:
    """Generators of {x in Q^dim : a . x >= 0 for every row a}.

    Returns (rays, lineality): the cone is cone(rays) + span(lineality). Rows are
    inserted in lexicographic order; rays come back primitive and sorted.
    """
    for row in rows:
        if len(row) != dim:
            raise DimensionMismatch(dim, len(row), "inequality")
    ordered = sorted({tuple(int(a) for a in row) for row in rows})

    lineality: list[tuple[int, ...]] = [tuple(1 if i == j else 0 for i in range(dim)) for j in range(dim)]
    rays: list[tuple[int, ...]] = []
    tight: list[int] = []  # bitmask of processed rows vanishing on each ray

    for k, a in enumerate(ordered):
        bit = 1 << k
        hit = next((idx for idx, line in enumerate(lineality) if _dot(a, line) != 0), None)
        if hit is not None:
            l0 = lineality.pop(hit)
            s0 = _dot(a, l0)
            if s0 < 0:
                l0 = tuple(-x for x in l0)
                s0 = -s0
            lineality = [_primitive([s0 * x - _dot(a, line) * y for x, y in zip(line, l0)]) for line in lineality]
            rays = [_primitive([s0 * x - _dot(a, ray) * y for x, y in zip(ray, l0)]) for ray in rays]
            tight = [t | bit for t in tight]
            rays.append(l0)
            tight.append(bit - 1)
            continue

        values = [_dot(a, ray) for ray in rays]
        pos = [i for i, v in enumerate(values) if v > 0]
        neg = [i for i, v in enumerate(values) if v < 0]
        zero = [i for i, v in enumerate(values) if v == 0]

        new_rays = [rays[i] for i in pos] + [rays[i] for i in zero]
        new_tight = [tight[i] for i in pos] + [tight[i] | bit for i in zero]

        need = dim - len(lineality) - 2
        # only rays tight on at least `need` rows can witness non-adjacency
        witnesses = [t for t, mask in enumerate(tight) if bin(mask).count("1") >= need]
        for i in pos:
            for j in neg:
                common = tight[i] & tight[j]
                if bin(common).count("1") < need:
                    continue
                if any(t != i and t != j and (tight[t] & common) == common for t in witnesses):
                    continue
                combo = _primitive([values[i] * y - values[j] * x for x, y in zip(rays[i], rays[j])])
                new_rays.append(combo)
                new_tight.append(common | bit)

        rays, tight = new_rays, new_tight
        logger.debug(f"double description: row {k + 1}/{len(ordered)}, {len(rays)} rays, lineality {len(lineality)}")

    # the lineality space is exactly the kernel of the rows; report it in Hermite form
    if lineality:
        lines = integer_kernel(ordered, dim) if ordered else [ClassVector(line) for line in lineality]
    else:
        lines = []
    return sorted((ClassVector(r) for r in set(rays)), key=lambda v: v.coords), lines


def cone_from_inequalities(rows: Sequence[Sequence[int]], dim: int) -> RationalCone:
    """The cone cut out by rows, as generators (lineality directions appear with both signs)."""
    rays, lineality = double_description(rows, dim)
    generators = list(rays)
    for line in lineality:
        generators += [line, -line]
    return RationalCone.from_rays(dim, generators)


def dual_cone(form: IntersectionForm, cone: RationalCone) -> RationalCone:
    """{x : x . r >= 0 for every ray r} under the form."""
    if cone.ambient_rank != form.rank:
        raise DimensionMismatch(form.rank, cone.ambient_rank, "cone")
    rows = [functional_of(form, r).coords for r in cone.rays]
    return cone_from_inequalities(rows, form.rank)


def verify_duality(form: IntersectionForm, cone: RationalCone, dual: RationalCone) -> bool:
    """Decide dual == cone^vee (so dual^vee == cone) without dualizing dual.

    Nonnegative pairings give dual inside cone^vee. The facet functionals of cone,
    read back as classes through the form, generate cone^vee, so the reverse
    inclusion is one membership test per facet.
    """
    if cone.ambient_rank != form.rank:
        raise DimensionMismatch(form.rank, cone.ambient_rank, "cone")
    if dual.ambient_rank != form.rank:
        raise DimensionMismatch(form.rank, dual.ambient_rank, "cone")
    rows = [functional_of(form, r).coords for r in cone.rays]
    if any(_dot(row, d) < 0 for row in rows for d in dual.rays):
        return False
    facets = classes_of_functionals(form, cone.halfspaces)
    logger.debug(f"duality check: {len(dual.rays)} dual rays against {len(facets)} facets")
    return all(ray_membership(dual, y).member for y in facets)


def intersect(*cones: RationalCone) -> RationalCone:
    rank = cones[0].ambient_rank
    rows = []
    for cone in cones:
        if cone.ambient_rank != rank:
            raise DimensionMismatch(rank, cone.ambient_rank, "cone")
        rows.extend(h.coords for h in cone.halfspaces)
    return cone_from_inequalities(rows, rank)


def _phase_one(rays: Sequence[ClassVector], x: Sequence[int]) -> ConeMembershipCertificate:
    """Exact phase-one simplex for R^T lam = x, lam >= 0.

    Artificial variables carry unit cost. At the optimum the dual vector y is read
    from the reduced costs of the artificial columns, rc_j = 1 - y_j.
    """
    m, d = len(rays), len(x)
    signs = [1 if xi >= 0 else -1 for xi in x]
    width = m + d
    table = [
        [Fraction(signs[i] * rays[j][i]) for j in range(m)] + [Fraction(1 if t == i else 0) for t in range(d)]
        for i in range(d)
    ]
    rhs = [Fraction(signs[i] * x[i]) for i in range(d)]
    basis = [m + i for i in range(d)]
    cost = [-sum(table[i][j] for i in range(d)) for j in range(m)] + [Fraction(0)] * d

    while True:
        entering = next((j for j in range(width) if cost[j] < 0), None)
        if entering is None:
            break
        candidates = [(rhs[i] / table[i][entering], basis[i], i) for i in range(d) if table[i][entering] > 0]
        if not candidates:  # cannot happen in phase one: the objective is bounded below by 0
            break
        _, _, row = min(candidates)
        pivot = table[row][entering]
        table[row] = [v / pivot for v in table[row]]
        rhs[row] /= pivot
        for i in range(d):
            if i != row and table[i][entering] != 0:
                f = table[i][entering]
                table[i] = [a - f * b for a, b in zip(table[i], table[row])]
                rhs[i] -= f * rhs[row]
        f = cost[entering]
        cost = [a - f * b for a, b in zip(cost, table[row])]
        basis[row] = entering

    residual = sum(rhs[i] for i in range(d) if basis[i] >= m)
    if residual == 0:
        coefficients = [Fraction(0)] * m
        for i, var in enumerate(basis):
            if var < m:
                coefficients[var] = rhs[i]
        return ConeMembershipCertificate(True, tuple(coefficients), None)

    y = [1 - cost[m + i] for i in range(d)]
    functional = ClassVector(_primitive([-signs[i] * y[i] for i in range(d)]))
    return ConeMembershipCertificate(False, None, functional)


def contains(form: IntersectionForm, cone: RationalCone, x: ClassVector) -> ConeMembershipCertificate:
    form.check(x)
    if cone.ambient_rank != form.rank:
        raise DimensionMismatch(form.rank, cone.ambient_rank, "cone")
    return ray_membership(cone, x)


def ray_membership(cone: RationalCone, x: ClassVector) -> ConeMembershipCertificate:
    """Membership without a form; the certificate is checked before it is returned."""
    if len(x) != cone.ambient_rank:
        raise DimensionMismatch(cone.ambient_rank, len(x), "vector")
    if x.is_zero():
        return ConeMembershipCertificate(True, tuple(Fraction(0) for _ in cone.rays), None)
    if not cone.rays:
        # any functional negative on x separates it from {0}
        return ConeMembershipCertificate(False, None, -x)

    certificate = _phase_one(cone.rays, x.coords)
    if not verify_certificate(cone, x, certificate):
        raise ArithmeticError(f"membership certificate for {x} failed to verify")
    return certificate


def verify_certificate(cone: RationalCone, x: ClassVector, certificate: ConeMembershipCertificate) -> bool:
    if certificate.member:
        coefficients = certificate.coefficients
        if coefficients is None or len(coefficients) != len(cone.rays) or any(c < 0 for c in coefficients):
            return False
        total = [sum(c * r[i] for c, r in zip(coefficients, cone.rays)) for i in range(cone.ambient_rank)]
        return total == list(x.coords)
    f = certificate.separating_functional
    if f is None:
        return False
    return all(_dot(f, r) >= 0 for r in cone.rays) and _dot(f, x) < 0


def cone_contains_cone(outer: RationalCone, inner: RationalCone) -> bool:
    return all(ray_membership(outer, r).member for r in inner.rays)


def cone_equal(c1: RationalCone, c2: RationalCone) -> bool:
    """Mutual containment of generators."""
    if c1.ambient_rank != c2.ambient_rank:
        raise DimensionMismatch(c1.ambient_rank, c2.ambient_rank, "cone")
    return cone_contains_cone(c1, c2) and cone_contains_cone(c2, c1)


def extremal_rays(cone: RationalCone) -> RationalCone:
    """Drop, in order, every ray that is a nonnegative combination of the remaining ones."""
    keep = list(range(len(cone.rays)))
    for idx in range(len(cone.rays)):
        others = [i for i in keep if i != idx]
        rest = RationalCone(cone.ambient_rank, tuple(cone.rays[i] for i in others))
        if others and ray_membership(rest, cone.rays[idx]).member:
            keep = others
    labels = tuple(cone.labels[i] for i in keep) if cone.labels is not None else None
    return RationalCone(cone.ambient_rank, tuple(cone.rays[i] for i in keep), labels)
