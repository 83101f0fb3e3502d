"""Verification suites over family models and the Mori dream space certificate."""

from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from itertools import combinations
from typing import TYPE_CHECKING, Iterable, Optional, Sequence

from .config import check_depths
from .cones import ample_class, c_prime_cone, cone_of_curves, n6_system_check, nef_cone, verify_curve_cone
from .coxeter import (
    RootSystemData,
    chamber_reduce,
    is_in_chamber,
    reflect,
    replay,
    sample_positive_classes,
    sigma_membership,
    simple_roots,
)
from .exceptions import FamilySuiteError, MaxIterExceeded, handle_engine_error
from .formulas import compare_dual_basis
from .lattice import ClassVector, gram_of, is_generated_by, is_unimodular, orthogonal_complement, pair
from .models import CheckStatus, MdsCertificate, NefRayWitness, SuiteReport, SurfaceModel
from .polyhedral import RationalCone, contains, dual_cone, extremal_rays, ray_membership, verify_duality
from .surfaces import build_family, curve_basis, interior_minus_one_labels, riemann_roch_chi, validate_configuration

if TYPE_CHECKING:
    from .settings import EngineSettings

logger = logging.getLogger(__name__)

GridPoint = tuple[int, tuple[int, ...]]


@dataclass(frozen=True)
class SuitePlan:
    """Sample sizes and word radii for the sampled Weyl, sigma(y) and C' checks.

    The defaults keep a full desk-grid run practical; ``acceptance()`` is the larger
    plan used on the reduced grid.
    """

    weyl_samples: int = 200
    sigma_samples: int = 10
    sigma_reference_radius: int = 2
    sigma_radius: int = 1
    max_iter: int = 10_000
    max_draws: int = 20_000
    c_prime: bool = True
    seed: int = 0

    @classmethod
    def acceptance(cls) -> SuitePlan:
        return cls(weyl_samples=1000, sigma_samples=20, sigma_reference_radius=5, sigma_radius=3)

    @classmethod
    def from_settings(cls, settings: EngineSettings) -> SuitePlan:
        return cls(
            weyl_samples=settings.weyl_samples,
            sigma_samples=settings.sigma_samples,
            max_iter=settings.default_max_iter,
            seed=settings.seed,
        )

    def rng(self, model: SurfaceModel) -> random.Random:
        # one stream per model, so grid order and worker count do not change samples
        return random.Random(f"{self.seed}:{model.model_id}")


def _check_dual_basis(model: SurfaceModel, report: SuiteReport) -> None:
    for row in compare_dual_basis(model):
        name = f"dual_basis.{row.element}[{row.variant}]"
        detail = "" if row.status == CheckStatus.PASS else f"printed {row.printed}, computed {row.computed}"
        report.add(name, row.status == CheckStatus.PASS, detail, flagged=row.status == CheckStatus.FLAGGED)


def _check_curve_cone(model: SurfaceModel, curves: RationalCone, report: SuiteReport) -> None:
    cert = verify_curve_cone(model, curves)
    detail = f"{cert.route}: {len(cert.entries)} certificates"
    if cert.failures():
        detail += f"; not in cone: {', '.join(cert.failures())}"
    if not cert.nef_rays_in_cone:
        detail += "; some nef ray is outside the generator cone"
    if model.n == 2:
        detail += "; the printed list names a single F, both F_1 and F_2 are used as generators"
    report.add("curve_cone", cert.passed, detail)


def _check_curve_rays(model: SurfaceModel, curves: RationalCone, report: SuiteReport) -> None:
    form = model.form
    boundary = {r.label for r in model.boundary}
    bad_square = []
    for label, ray in zip(curves.labels, curves.rays):
        if label not in boundary and pair(form, ray, ray) >= 0:
            bad_square.append(label)
    report.add("curve_rays_negative", not bad_square, ", ".join(bad_square))

    extremal = set(extremal_rays(curves).labels)
    missing = []
    boundary_notes = []
    for label, ray in zip(curves.labels, curves.rays):
        if label in boundary:
            sq = pair(form, ray, ray)
            if sq < 0 and label not in extremal:
                missing.append(label)
            elif sq >= 0:
                boundary_notes.append(f"{label}^2={sq} {'extremal' if label in extremal else 'not extremal'}")
        elif label not in extremal:
            missing.append(label)
    detail = ", ".join(missing) if missing else "; ".join(boundary_notes)
    report.add("curve_rays_extremal", not missing, detail)


def _check_split_mhs(model: SurfaceModel, report: SuiteReport) -> None:
    complement = orthogonal_complement(model.form, model.boundary_classes())
    roots = list(simple_roots(model).simple_roots)
    cert = is_generated_by(model.form, complement, roots)
    report.add(
        "split_mhs",
        cert.generated,
        f"rank {len(complement)}, {len(roots)} roots, index {cert.index}",
    )


def _positive_samples(
    model: SurfaceModel, rs: RootSystemData, y: ClassVector, nef: RationalCone, plan: SuitePlan, rng: random.Random
) -> list[ClassVector]:
    """Random positive-cone classes, topped up with reflected nef classes when rejection sampling runs dry."""
    samples = sample_positive_classes(model.form, y, plan.weyl_samples, rng, max_tries=plan.max_draws)
    while len(samples) < plan.weyl_samples:
        x = y
        for ray in nef.rays:
            x = x + ray * rng.randint(0, 2)
        for _ in range(rng.randint(1, 8) if rs.simple_roots else 0):
            x = reflect(model.form, rng.choice(rs.simple_roots), x)
        samples.append(x)
    return samples


def _check_weyl(model: SurfaceModel, rs: RootSystemData, samples: Sequence[ClassVector], plan: SuitePlan, report: SuiteReport):
    """Chamber reduction on every sample: terminates, lands in the chamber, replays, conserves invariants."""
    form = model.form
    boundary = model.boundary_classes()
    bad = []
    longest = 0
    reduced = []
    for x in samples:
        try:
            trace = chamber_reduce(rs, x, plan.max_iter)
        except MaxIterExceeded:
            bad.append(f"{x}: no termination")
            continue
        out = trace.output
        longest = max(longest, len(trace.word))
        reduced.append(out)
        if not is_in_chamber(rs, out):
            bad.append(f"{x}: output outside the chamber")
        elif replay(rs, x, trace.word) != out:
            bad.append(f"{x}: replay differs")
        elif pair(form, out, out) != pair(form, x, x) or any(pair(form, out, d) != pair(form, x, d) for d in boundary):
            bad.append(f"{x}: invariants not conserved")
    detail = f"{len(samples)} classes, longest word {longest}"
    if bad:
        detail += "; " + "; ".join(bad[:5])
    report.add("weyl.chamber", not bad, detail)
    return reduced


def _check_sigma(
    model: SurfaceModel,
    rs: RootSystemData,
    y: ClassVector,
    candidates: Sequence[ClassVector],
    plan: SuitePlan,
    report: SuiteReport,
) -> None:
    reference = sigma_membership(model, y, y, plan.sigma_reference_radius)
    report.add(
        "sigma.reference",
        reference.verified,
        f"radius {reference.radius}, {reference.images_checked} images",
    )

    bad = []
    inside = 0
    for x in candidates[: plan.sigma_samples]:
        if not sigma_membership(model, y, x, plan.sigma_radius).verified:
            continue
        inside += 1
        if not is_in_chamber(rs, x):
            bad.append(str(x))
    detail = f"{inside} of {min(len(candidates), plan.sigma_samples)} samples in sigma to radius {plan.sigma_radius}"
    if bad:
        detail += f"; outside the chamber: {', '.join(bad[:5])}"
    report.add("sigma.chamber", not bad, detail)


def _check_c_prime(model: SurfaceModel, curves: RationalCone, report: SuiteReport) -> None:
    """C' on every singleton and disjoint pair: finite rays, each nef and inside <D, E>."""
    form = model.form
    labels = interior_minus_one_labels(model)
    subsets = [[label] for label in labels]
    subsets += [[a, b] for a, b in combinations(labels, 2) if pair(form, model.cls(a), model.cls(b)) == 0]
    bad = []
    for subset in subsets:
        cone = c_prime_cone(model, subset)
        generated = RationalCone.from_rays(model.rank, model.boundary_classes() + [model.cls(label) for label in subset])
        for ray in cone.rays:
            if any(pair(form, ray, c) < 0 for c in curves.rays) or not ray_membership(generated, ray).member:
                bad.append(",".join(subset))
                break
    detail = f"{len(subsets)} cones from {len(labels)} interior (-1)-curves"
    if bad:
        detail += f"; bad rays for {'; '.join(bad[:5])}"
    report.add("c_prime", not bad, detail)


def _run_checks(model: SurfaceModel, report: SuiteReport, plan: SuitePlan) -> None:
    for check in validate_configuration(model).checks:
        report.add(f"config.{check.name}", check.passed, check.detail)

    _check_dual_basis(model, report)

    curves = cone_of_curves(model)
    _check_curve_cone(model, curves, report)

    nef = dual_cone(model.form, curves)
    report.add(
        "biduality",
        verify_duality(model.form, curves, nef),
        f"{len(nef.rays)} nef rays, {len(curves.halfspaces)} facets",
    )

    _check_curve_rays(model, curves, report)
    _check_split_mhs(model, report)

    rs = simple_roots(model)
    y = ample_class(model, nef)
    samples = _positive_samples(model, rs, y, nef, plan, plan.rng(model))
    reduced = _check_weyl(model, rs, samples, plan, report)
    candidates = [x for couple in zip(samples, reduced) for x in couple]
    _check_sigma(model, rs, y, candidates, plan, report)
    if plan.c_prime:
        _check_c_prime(model, curves, report)

    if model.n == 6:
        for check in n6_system_check(model).checks:
            report.add(f"n6.{check.name}", check.passed, check.detail)


def run_family_suite(
    n: int,
    p: Sequence[int],
    model: Optional[SurfaceModel] = None,
    plan: Optional[SuitePlan] = None,
) -> SuiteReport:
    """Build the family model and run every check on it.

    A supplied model (for example one read back from JSON) is checked as given, after
    confirming it is the family model for (n, p).
    """
    plan = plan or SuitePlan()
    report = SuiteReport(n, check_depths(n, p))
    start = time.perf_counter()
    logger.info(f"running suite for {report.model_id}")
    try:
        expected = build_family(n, report.p)
        if model is None:
            model = expected
        else:
            report.add("input_model", model == expected, "" if model == expected else "differs from the family model")
        _run_checks(model, report, plan)
    except FamilySuiteError:
        raise
    except Exception as e:
        raise handle_engine_error(e, report.model_id) from e
    finally:
        report.elapsed = time.perf_counter() - start

    failed = [c.name for c in report.checks if c.status == CheckStatus.FAIL]
    if failed:
        logger.warning(f"{report.model_id}: {len(failed)} failed checks: {failed}")
    else:
        logger.info(f"{report.model_id}: {len(report.checks)} checks, no failures ({report.elapsed:.2f}s)")
    return report


def mds_certificate(n: int, p: Sequence[int]) -> MdsCertificate:
    """Certificate for the Picard and nef-cone items of the Mori dream space criterion.

    Semiampleness of nef classes is cited, not checked.
    """
    model = build_family(n, p)
    try:
        _, basis = curve_basis(model)
        unimodular = len(basis) == model.rank and is_unimodular(gram_of(model.form, basis))
        curves = cone_of_curves(model)
        nef = nef_cone(model)
        witnesses = []
        for ray in nef.rays:
            membership = contains(model.form, curves, ray)
            witnesses.append(
                NefRayWitness(
                    ray=ray,
                    chi=riemann_roch_chi(model, ray),
                    effective=membership.member,
                    coefficients=membership.coefficients or (),
                )
            )
    except Exception as e:
        raise handle_engine_error(e, model.model_id) from e

    cert = MdsCertificate(
        n=model.n,
        p=model.p,
        rank=model.rank,
        base_rank=model.base_rank,
        unimodular=unimodular,
        curve_rays=curves.rays,
        curve_labels=curves.labels or (),
        nef_rays=tuple(witnesses),
    )
    logger.info(f"{cert.model_id}: MDS certificate with {len(witnesses)} nef rays")
    return cert


def _suite_job(point: GridPoint, plan: Optional[SuitePlan] = None) -> SuiteReport:
    n, p = point
    return run_family_suite(n, p, plan=plan)


def run_grid(grid: Iterable[GridPoint], workers: int = 1, plan: Optional[SuitePlan] = None) -> list[SuiteReport]:
    """Run suites for many models; results are ordered by (n, p)."""
    points = sorted({(n, tuple(p)) for n, p in grid})
    job = partial(_suite_job, plan=plan)
    if workers <= 1 or len(points) <= 1:
        reports = [job(point) for point in points]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(job, points))
    return sorted(reports, key=lambda r: (r.n, r.p))
