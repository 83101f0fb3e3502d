"""The cones attached to a family model: curves, nef, the boundary-orthogonal face and C'."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from .config import CENTRAL_LABELS, N6_INDEX_SET
from .exceptions import ModelNotFromFamily, NotDisjoint, NotMinusOne, WrongN
from .formulas import a_divisor, computed_dual_basis
from .lattice import ClassVector, RationalClassVector, functional_of, integer_kernel, pair
from .models import CheckResult, CurveClass, SurfaceModel, ValidationReport
from .polyhedral import (
    ConeMembershipCertificate,
    RationalCone,
    cone_contains_cone,
    cone_equal,
    cone_from_inequalities,
    contains,
    dual_cone,
)
from .surfaces import classify_curve, exceptional_label, interior_minus_one_labels

logger = logging.getLogger(__name__)

__all__ = [
    "CurveConeCertificate",
    "MembershipEntry",
    "ample_class",
    "c_prime_cone",
    "cone_of_curves",
    "interior_minus_one_labels",
    "n6_system_check",
    "nef_cone",
    "nefe_prime",
    "verify_curve_cone",
]

N6_RELATION = (1, 1, 1, -1, -1)


def _require_family(model: SurfaceModel) -> None:
    if not model.is_family():
        raise ModelNotFromFamily(model.origin.value)


def cone_of_curves(model: SurfaceModel) -> RationalCone:
    """Boundary components, chain curves and central curves, in that order."""
    _require_family(model)
    labels = [r.label for r in model.boundary]
    labels += [exceptional_label(i, j) for i in range(1, model.n + 1) for j in range(1, model.p[i - 1] + 1)]
    labels += [r.label for r in model.central_records()]
    return RationalCone.from_rays(model.rank, [model.cls(label) for label in labels], labels)


def nef_cone(model: SurfaceModel) -> RationalCone:
    return dual_cone(model.form, cone_of_curves(model))


def _curve_rows(model: SurfaceModel) -> list[tuple[int, ...]]:
    return [functional_of(model.form, r).coords for r in cone_of_curves(model).rays]


@dataclass(frozen=True)
class MembershipEntry:
    name: str
    vector: RationalClassVector
    certificate: ConeMembershipCertificate


@dataclass(frozen=True)
class CurveConeCertificate:
    """Evidence that the listed curves generate the cone of curves."""

    model_id: str
    route: str  # "dual-basis" or "a-divisors"
    entries: tuple[MembershipEntry, ...]
    nef_rays_in_cone: bool
    orthant_check: Optional[bool] = None

    @property
    def passed(self) -> bool:
        members = all(e.certificate.member for e in self.entries)
        return members and self.nef_rays_in_cone and self.orthant_check is not False

    def failures(self) -> list[str]:
        return [e.name for e in self.entries if not e.certificate.member]


def verify_curve_cone(model: SurfaceModel, curves: Optional[RationalCone] = None) -> CurveConeCertificate:
    """Certify that every dual-basis element is a nonnegative combination of the curve generators.

    With B a basis of curves and every B*_i effective over the generators, any curve
    C = sum (C . B_i) B*_i lies in their cone. For n = 6 the printed dual of the central
    curves is not effective, so the A_{i,j} (j >= 0) are certified instead and the
    central part is settled by the inequality-cone check of ``n6_system_check``.
    Independently, every nef ray must lie in the generator cone.
    """
    _require_family(model)
    curves = curves or cone_of_curves(model)
    entries = []

    if model.n == 6:
        route = "a-divisors"
        for i in range(1, 7):
            for j in range(0, model.p[i - 1] + 1):
                a = a_divisor(model, i, j)
                entries.append(
                    MembershipEntry(f"A_{{{i},{j}}}", RationalClassVector.from_class_vector(a), contains(model.form, curves, a))
                )
        orthant = n6_system_check(model).check("inequality_cone").passed
    else:
        route = "dual-basis"
        for label, dual in computed_dual_basis(model).items():
            entries.append(MembershipEntry(f"{label}*", dual, contains(model.form, curves, dual.scaled_to_integral())))
        orthant = None

    nef = dual_cone(model.form, curves)
    nef_ok = cone_contains_cone(curves, nef)

    result = CurveConeCertificate(model.model_id, route, tuple(entries), nef_ok, orthant)
    logger.info(f"{model.model_id}: curve cone certificate via {route}: {'ok' if result.passed else 'FAILED'}")
    return result


def nefe_prime(model: SurfaceModel) -> RationalCone:
    """Nef cone cut with the orthogonal complement of the boundary.

    For family models every nef ray is effective, so Nefe coincides with Nef and this
    is the face of Nef orthogonal to every D_i.
    """
    _require_family(model)
    rows = _curve_rows(model)
    for d in model.boundary_classes():
        f = functional_of(model.form, d)
        rows += [f.coords, (-f).coords]
    return cone_from_inequalities(rows, model.rank)


def c_prime_cone(model: SurfaceModel, labels: Sequence[str]) -> RationalCone:
    """<D_1..D_n, E_1..E_k> intersected with the nef cone, for disjoint interior (-1)-curves E."""
    _require_family(model)
    labels = list(dict.fromkeys(labels))
    classes = []
    for label in labels:
        c = model.cls(label)
        kind = classify_curve(model, c)
        if kind != CurveClass.INTERIOR_MINUS_ONE:
            raise NotMinusOne(label, kind.value)
        classes.append(c)
    for a in range(len(labels)):
        for b in range(a + 1, len(labels)):
            value = pair(model.form, classes[a], classes[b])
            if value != 0:
                raise NotDisjoint(labels[a], labels[b], value)

    generated = RationalCone.from_rays(model.rank, model.boundary_classes() + classes)
    rows = [h.coords for h in generated.halfspaces] + _curve_rows(model)
    return cone_from_inequalities(rows, model.rank)


def ample_class(model: SurfaceModel, nef: Optional[RationalCone] = None) -> ClassVector:
    """Sum of the nef-cone rays: strictly positive on every curve generator."""
    nef = nef or nef_cone(model)
    total = ClassVector.zero(model.rank)
    for ray in nef.rays:
        total = total + ray
    return total


def _central_classes(model: SurfaceModel) -> list[ClassVector]:
    return [model.cls(label) for label in CENTRAL_LABELS[6]]


def n6_system_check(model: SurfaceModel) -> ValidationReport:
    """Exact identities of the n = 6 family.

    a_duality: A_{i,j} . E_{s,t} = delta for j >= 1.
    f_relation: the integer relation among the five central curves is (1,1,1,-1,-1).
    inequalities: the pairings A_{i,0} . F_k give the six printed inequalities.
    inequality_cone: in R^5 modulo the relation, the six inequalities cut out exactly
    the image of the nonnegative orthant.
    """
    if model.n != 6:
        raise WrongN(6, model.n)
    _require_family(model)
    form = model.form
    checks = []

    bad = []
    for i in range(1, 7):
        for j in range(1, model.p[i - 1] + 1):
            a = a_divisor(model, i, j)
            for s in range(1, 7):
                for t in range(1, model.p[s - 1] + 1):
                    expected = 1 if (i, j) == (s, t) else 0
                    value = pair(form, a, model.cls(exceptional_label(s, t)))
                    if value != expected:
                        bad.append(f"A_{{{i},{j}}}.E_{{{s},{t}}} = {value}")
    checks.append(CheckResult("a_duality", not bad, "; ".join(bad[:10])))

    central = _central_classes(model)
    columns = [[f[t] for f in central] for t in range(model.rank)]
    kernel = integer_kernel(columns, len(central))
    relation = None
    if len(kernel) == 1:
        relation = kernel[0].coords
        lead = next(x for x in relation if x)
        if lead < 0:
            relation = tuple(-x for x in relation)
    checks.append(CheckResult("f_relation", relation == N6_RELATION, f"kernel {[k.coords for k in kernel]}"))

    derived = [[pair(form, a_divisor(model, i, 0), f) for f in central] for i in range(1, 7)]
    printed = [[1 if i in k else 0 for k in N6_INDEX_SET] for i in range(1, 7)]
    checks.append(CheckResult("inequalities", derived == printed, f"{derived}"))

    units = [ClassVector.unit(5, k) for k in range(5)]
    u = ClassVector(N6_RELATION)
    orthant_image = RationalCone.from_rays(5, units + [u, -u])
    inequality_cone = cone_from_inequalities(derived, 5)
    same = cone_equal(inequality_cone, orthant_image)
    checks.append(CheckResult("inequality_cone", same, f"{len(inequality_cone.rays)} generators"))

    return ValidationReport(model.model_id, tuple(checks))
