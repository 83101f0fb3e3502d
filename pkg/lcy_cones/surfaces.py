"""Construction and validation of the blowup families n = 1..6.

Each family starts from a base pair (Ybar, Dbar) carrying auxiliary central curves
F. The chain over the point q_i on D_i is produced by blowing up q_i, then the
point where the newest exceptional curve meets D_i, p_i times in total.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .config import FAMILY_NS, check_depths
from .exceptions import InconsistentIncidence, ModelNotFromFamily, UnsupportedN
from .lattice import ClassVector, IntersectionForm, gram_of, is_unimodular, pair, signature
from .models import (
    BlowupStep,
    CheckResult,
    CurveClass,
    CurveKind,
    CurveRecord,
    EulerCharacteristic,
    ModelOrigin,
    SurfaceModel,
    ValidationReport,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class _BaseData:
    labels: tuple[str, ...]
    gram: tuple[tuple[int, ...], ...]
    canonical: dict[str, int]
    boundary: tuple[dict[str, int], ...]
    central: tuple[tuple[str, dict[str, int]], ...]
    through: dict[int, tuple[str, ...]]  # chain index -> central curves through q_i


def _diag(*entries: int) -> tuple[tuple[int, ...], ...]:
    size = len(entries)
    return tuple(tuple(entries[i] if i == j else 0 for j in range(size)) for i in range(size))


_E = ("e_1", "e_2", "e_3", "e_4")

_BASES: dict[int, _BaseData] = {
    # P^2 with a nodal cubic; F is the tangent line at a flex q
    1: _BaseData(
        labels=("H",),
        gram=_diag(1),
        canonical={"H": -3},
        boundary=({"H": 3},),
        central=(("F", {"H": 1}),),
        through={1: ("F",)},
    ),
    # Hirzebruch F_2: B the (-2)-section, A the fiber
    2: _BaseData(
        labels=("B", "A"),
        gram=((-2, 1), (1, 0)),
        canonical={"B": -2, "A": -4},
        boundary=({"B": 1, "A": 2}, {"B": 1, "A": 2}),
        central=(("F_1", {"A": 1}), ("F_2", {"B": 1})),
        through={1: ("F_1",), 2: ("F_1",)},
    ),
    3: _BaseData(
        labels=("H",),
        gram=_diag(1),
        canonical={"H": -3},
        boundary=({"H": 1}, {"H": 1}, {"H": 1}),
        central=(("F", {"H": 1}),),
        through={1: ("F",), 2: ("F",), 3: ("F",)},
    ),
    # P^1 x P^1; F_1 is the A-fiber through q_2, q_4 and F_2 the B-fiber through q_1, q_3
    4: _BaseData(
        labels=("A", "B"),
        gram=((0, 1), (1, 0)),
        canonical={"A": -2, "B": -2},
        boundary=({"A": 1}, {"B": 1}, {"A": 1}, {"B": 1}),
        central=(("F_1", {"A": 1}), ("F_2", {"B": 1})),
        through={1: ("F_2",), 2: ("F_1",), 3: ("F_2",), 4: ("F_1",)},
    ),
    # degree 5 del Pezzo: boundary pentagon and interior star of (-1)-curves
    5: _BaseData(
        labels=("H",) + _E,
        gram=_diag(1, -1, -1, -1, -1),
        canonical={"H": -3, "e_1": 1, "e_2": 1, "e_3": 1, "e_4": 1},
        boundary=(
            {"e_1": 1},
            {"H": 1, "e_1": -1, "e_2": -1},
            {"e_2": 1},
            {"H": 1, "e_2": -1, "e_3": -1},
            {"H": 1, "e_1": -1, "e_4": -1},
        ),
        central=(
            ("F_1", {"H": 1, "e_1": -1, "e_3": -1}),
            ("F_2", {"H": 1, "e_3": -1, "e_4": -1}),
            ("F_3", {"H": 1, "e_2": -1, "e_4": -1}),
            ("F_4", {"e_3": 1}),
            ("F_5", {"e_4": 1}),
        ),
        through={i: (f"F_{i}",) for i in range(1, 6)},
    ),
    # toric surface with a hexagon of (-1)-curves
    6: _BaseData(
        labels=("H",) + _E[:3],
        gram=_diag(1, -1, -1, -1),
        canonical={"H": -3, "e_1": 1, "e_2": 1, "e_3": 1},
        boundary=(
            {"e_1": 1},
            {"H": 1, "e_1": -1, "e_2": -1},
            {"e_2": 1},
            {"H": 1, "e_2": -1, "e_3": -1},
            {"e_3": 1},
            {"H": 1, "e_1": -1, "e_3": -1},
        ),
        central=(
            ("F_{1,4}", {"H": 1, "e_1": -1}),
            ("F_{2,5}", {"H": 1, "e_3": -1}),
            ("F_{3,6}", {"H": 1, "e_2": -1}),
            ("F_{1,3,5}", {"H": 2, "e_1": -1, "e_2": -1, "e_3": -1}),
            ("F_{2,4,6}", {"H": 1}),
        ),
        through={
            1: ("F_{1,4}", "F_{1,3,5}"),
            2: ("F_{2,5}", "F_{2,4,6}"),
            3: ("F_{3,6}", "F_{1,3,5}"),
            4: ("F_{1,4}", "F_{2,4,6}"),
            5: ("F_{2,5}", "F_{1,3,5}"),
            6: ("F_{3,6}", "F_{2,4,6}"),
        },
    ),
}

# the central curve left out of the curve basis for n = 6 (it is spanned by the others)
N6_DEPENDENT_CURVE = "F_{2,4,6}"


def boundary_label(i: int) -> str:
    return f"D_{i}"


def exceptional_label(i: int, j: int) -> str:
    return f"E_{{{i},{j}}}"


def _infer_kind(form: IntersectionForm, cls: ClassVector, boundary: Sequence[ClassVector]) -> CurveKind:
    sq = pair(form, cls, cls)
    d_pairs = [pair(form, cls, d) for d in boundary]
    if sq == -1 and sum(d_pairs) == 1 and all(x >= 0 for x in d_pairs):
        return CurveKind.EXCEPTIONAL_MINUS_ONE
    if sq == -2 and all(x == 0 for x in d_pairs):
        return CurveKind.INTERIOR_MINUS_TWO
    return CurveKind.INTERIOR_EXTRA


def _with_kinds(form: IntersectionForm, records: Sequence[CurveRecord], boundary_labels: set[str]) -> list[CurveRecord]:
    boundary = [r.cls for r in records if r.label in boundary_labels]
    out = []
    for r in records:
        kind = CurveKind.BOUNDARY if r.label in boundary_labels else _infer_kind(form, r.cls, boundary)
        out.append(r if r.kind == kind else replace(r, kind=kind))
    return out


def base_surface(n: int) -> SurfaceModel:
    """The base pair (Ybar, Dbar) of family n with its central curves."""
    if n not in FAMILY_NS:
        raise UnsupportedN(n)
    data = _BASES[n]
    form = IntersectionForm(data.gram, data.labels)

    records = [
        CurveRecord(boundary_label(i), form.vector(**coeffs), CurveKind.BOUNDARY)
        for i, coeffs in enumerate(data.boundary, start=1)
    ]
    records += [CurveRecord(label, form.vector(**coeffs), CurveKind.INTERIOR_EXTRA) for label, coeffs in data.central]
    boundary_labels = {boundary_label(i) for i in range(1, n + 1)}
    records = _with_kinds(form, records, boundary_labels)

    return SurfaceModel(
        n=n,
        p=(),
        form=form,
        canonical=form.vector(**data.canonical),
        boundary=tuple(records[:n]),
        inventory=tuple(records),
        history=(),
        base_rank=form.rank,
        origin=ModelOrigin.BASE,
    )


def blow_up(
    model: SurfaceModel,
    incident_labels: Sequence[str],
    new_label: Optional[str] = None,
    basis_label: Optional[str] = None,
) -> SurfaceModel:
    """Blow up a point lying on exactly the listed curves.

    The new basis vector e has e^2 = -1; incident curves lose e, K gains e. When the
    point is a node of the boundary (two boundary curves) the exceptional curve joins
    the boundary cycle between them.
    """
    labels = list(dict.fromkeys(incident_labels))
    records = [model.curve(label) for label in labels]
    for a, b in combinations(records, 2):
        value = pair(model.form, a.cls, b.cls)
        if value < 1:
            raise InconsistentIncidence(a.label, b.label, value)

    step = len(model.history) + 1
    new_label = new_label or f"X_{step}"
    basis_label = basis_label or f"x_{step}"
    if new_label in model.labels or basis_label in model.form.basis_labels:
        raise ValueError(f"label {new_label!r} or basis label {basis_label!r} already in use")

    form = model.form.extended(basis_label)
    e = ClassVector.unit(form.rank, form.rank - 1)
    incident = set(labels)

    def transform(record: CurveRecord) -> CurveRecord:
        cls = record.cls.extended()
        if record.label in incident:
            cls = cls - e
        return replace(record, cls=cls)

    inventory = [transform(r) for r in model.inventory]
    inventory.append(CurveRecord(new_label, e, CurveKind.EXCEPTIONAL_MINUS_ONE))

    boundary_order = [r.label for r in model.boundary]
    hit = [i for i, label in enumerate(boundary_order) if label in incident]
    if len(hit) > 2:
        raise InconsistentIncidence(boundary_order[hit[0]], boundary_order[hit[2]], 0)
    if len(hit) == 2:
        i, j = hit
        if i == 0 and j == len(boundary_order) - 1 and len(boundary_order) > 2:
            boundary_order.append(new_label)
        else:
            boundary_order.insert(i + 1, new_label)
        logger.debug(f"corner blowup between {boundary_order[i]} and {boundary_order[j]}")

    inventory = _with_kinds(form, inventory, set(boundary_order))
    by_label = {r.label: r for r in inventory}

    logger.debug(f"blow_up {model.model_id}: {new_label} on {labels}")
    return replace(
        model,
        n=len(boundary_order),
        form=form,
        canonical=model.canonical.extended() + e,
        boundary=tuple(by_label[label] for label in boundary_order),
        inventory=tuple(inventory),
        history=model.history + (BlowupStep(tuple(labels), new_label),),
        origin=ModelOrigin.CUSTOM,
    )


def build_family(n: int, p: Sequence[int], base: Optional[SurfaceModel] = None) -> SurfaceModel:
    """Run the blowup schedule of family n with chain lengths p.

    ``base`` replaces the standard base surface; it is meant for negative controls.
    """
    p = check_depths(n, p)
    model = base if base is not None else base_surface(n)
    through = _BASES[n].through

    for i in range(1, n + 1):
        latest: Optional[str] = None
        for j in range(1, p[i - 1] + 1):
            if j == 1:
                incident = [boundary_label(i), *through[i]]
            elif n == 1 and j <= 3:
                # flex: the tangent line passes through the first three infinitely near points
                incident = [boundary_label(i), "F", latest]
            else:
                incident = [boundary_label(i), latest]
            model = blow_up(model, incident, exceptional_label(i, j), f"e_{{{i},{j}}}")
            latest = exceptional_label(i, j)

    logger.info(f"built family n={n} p={p} at rank {model.rank}")
    return replace(model, n=n, p=p, origin=ModelOrigin.FAMILY)


def curve_basis(model: SurfaceModel) -> tuple[list[str], list[ClassVector]]:
    """The basis of Pic made of chain curves and central curves.

    Order: E_{i,j} by chain then depth, followed by the central curves; for n = 6
    the dependent curve F_{2,4,6} is left out.
    """
    if not model.is_family():
        raise ModelNotFromFamily(model.origin.value)
    labels = [exceptional_label(i, j) for i in range(1, model.n + 1) for j in range(1, model.p[i - 1] + 1)]
    labels += [r.label for r in model.central_records() if not (model.n == 6 and r.label == N6_DEPENDENT_CURVE)]
    return labels, [model.cls(label) for label in labels]


def _adjunction_target(model: SurfaceModel, record: CurveRecord) -> int:
    # the n = 1 boundary is a nodal curve of arithmetic genus one
    if model.n == 1 and record.kind == CurveKind.BOUNDARY:
        return 0
    return -2


def _boundary_cycle_errors(model: SurfaceModel) -> list[str]:
    form = model.form
    d = model.boundary_classes()
    count = len(d)
    errors = []
    if count == 1:
        if d[0] != -model.canonical:
            errors.append("D_1 is not anticanonical")
        return errors
    if count == 2:
        value = pair(form, d[0], d[1])
        if value != 2:
            errors.append(f"D_1.D_2 = {value}, expected 2")
        return errors
    for i, j in combinations(range(count), 2):
        value = pair(form, d[i], d[j])
        adjacent = j == i + 1 or (i == 0 and j == count - 1)
        if adjacent and value < 1:
            errors.append(f"D_{i + 1}.D_{j + 1} = {value}, expected >= 1")
        if not adjacent and value != 0:
            errors.append(f"D_{i + 1}.D_{j + 1} = {value}, expected 0")
    return errors


def _chain_errors(model: SurfaceModel) -> list[str]:
    form = model.form
    errors = []
    for i in range(1, model.n + 1):
        chain = [model.cls(label) for label in model.chain_labels(i)]
        p_i = len(chain)
        for k, d in enumerate(model.boundary_classes(), start=1):
            for j, e in enumerate(chain, start=1):
                expected = 1 if (k == i and j == p_i) else 0
                value = pair(form, d, e)
                if value != expected:
                    errors.append(f"D_{k}.E_{{{i},{j}}} = {value}, expected {expected}")
        for j in range(p_i - 1):
            value = pair(form, chain[j], chain[j + 1])
            if value != 1:
                errors.append(f"E_{{{i},{j + 1}}}.E_{{{i},{j + 2}}} = {value}, expected 1")
    for record in model.central_records():
        for k, d in enumerate(model.boundary_classes(), start=1):
            value = pair(form, record.cls, d)
            if value != 0:
                errors.append(f"{record.label}.D_{k} = {value}, expected 0")
    return errors


def validate_configuration(model: SurfaceModel) -> ValidationReport:
    """Run the structural checks; failures are reported, never raised.

    The chain-incidence and basis checks only apply to family models.
    """
    form = model.form
    D = model.boundary_sum()
    checks: list[CheckResult] = []

    k_plus_d = model.canonical + D
    checks.append(CheckResult("canonical_plus_boundary", k_plus_d.is_zero(), f"K + D = {k_plus_d}"))

    bad = []
    for record in model.inventory:
        value = pair(form, record.cls, record.cls) - pair(form, record.cls, D)
        if value != _adjunction_target(model, record):
            bad.append(f"{record.label}: C^2 - C.D = {value}")
    checks.append(CheckResult("adjunction", not bad, "; ".join(bad)))

    errors = _boundary_cycle_errors(model)
    checks.append(CheckResult("boundary_cycle", not errors, "; ".join(errors)))

    if model.is_family():
        errors = _chain_errors(model)
        checks.append(CheckResult("chain_incidence", not errors, "; ".join(errors[:10])))

        labels, basis = curve_basis(model)
        unimodular = len(basis) == form.rank and is_unimodular(gram_of(form, basis))
        checks.append(CheckResult("basis_unimodular", unimodular, f"{len(basis)} curves: {', '.join(labels)}"))

    inertia = signature(form.gram)
    expected = (1, form.rank - 1, 0)
    checks.append(CheckResult("signature", inertia == expected, f"{inertia}, expected {expected}"))

    report = ValidationReport(model.model_id, tuple(checks))
    if not report.passed:
        logger.warning(f"{model.model_id}: failed {[c.name for c in report.failures()]}")
    return report


def riemann_roch_chi(model: SurfaceModel, L: ClassVector) -> EulerCharacteristic:
    """chi(L) = 1 + (L^2 + L.D)/2."""
    model.form.check(L)
    twice = pair(model.form, L, L) + pair(model.form, L, model.boundary_sum())
    return EulerCharacteristic(1 + Fraction(twice, 2), twice % 2 == 0)


def classify_curve(model: SurfaceModel, c: ClassVector) -> CurveClass:
    form = model.form
    form.check(c)
    sq = pair(form, c, c)
    d_pairs = [pair(form, c, d) for d in model.boundary_classes()]
    if sq == -1 and all(x >= 0 for x in d_pairs) and sum(d_pairs) == 1:
        return CurveClass.INTERIOR_MINUS_ONE
    if sq == -2 and all(x == 0 for x in d_pairs):
        return CurveClass.INTERIOR_MINUS_TWO
    if c in model.boundary_classes():
        return CurveClass.BOUNDARY_LIKE
    return CurveClass.OTHER


def interior_minus_one_labels(model: SurfaceModel) -> list[str]:
    """Inventory curves that classify as interior (-1)-curves."""
    return [
        r.label
        for r in model.inventory
        if r.kind != CurveKind.BOUNDARY and classify_curve(model, r.cls) == CurveClass.INTERIOR_MINUS_ONE
    ]
