"""Tests for the verification suites and the MDS certificate."""
import os
from dataclasses import replace

import pytest

from lcy_cones.config import desk_grid, reduced_grid
from lcy_cones.exceptions import FamilySuiteError, InvalidDepth, UnsupportedN
from lcy_cones.harness import SuitePlan, mds_certificate, run_family_suite, run_grid
from lcy_cones.lattice import ClassVector
from lcy_cones.models import CheckStatus
from lcy_cones.settings import EngineSettings
from lcy_cones.surfaces import build_family

FULL_GRID = os.environ.get("LCY_CONES_FULL_GRID") == "1"


class TestFamilySuite:
    """Test run_family_suite on individual models."""

    def test_m3_all_pass(self):
        report = run_family_suite(3, (1, 1, 1))
        assert not report.failed
        assert all(c.status == CheckStatus.PASS for c in report.checks)
        names = report.statuses()
        assert "curve_cone" in names and "biduality" in names and "split_mhs" in names
        assert "config.signature" in names
        assert {"weyl.chamber", "sigma.reference", "sigma.chamber", "c_prime"} <= set(names)

    def test_n2_flagged_not_failed(self):
        """The n=2 F_2 dual rows are Flagged and nothing fails."""
        report = run_family_suite(2, (1, 1))
        statuses = report.statuses()
        assert statuses["dual_basis.F_2[i=1]"] == CheckStatus.FLAGGED
        assert statuses["dual_basis.F_2[i=2]"] == CheckStatus.FLAGGED
        assert not report.failed
        assert "F_1 and F_2" in next(c.detail for c in report.checks if c.name == "curve_cone")

    def test_n6_includes_system_checks(self):
        report = run_family_suite(6, (1, 1, 1, 1, 1, 1))
        assert not report.failed
        assert report.statuses()["n6.inequality_cone"] == CheckStatus.PASS

    def test_n6_deeper_model_runs_in_a_minute(self):
        """The biduality check on (6, (1,1,1,1,1,2)) does not dualize the nef cone again."""
        report = run_family_suite(6, (1, 1, 1, 1, 1, 2))
        assert report.statuses()["biduality"] == CheckStatus.PASS
        assert not report.failed
        assert report.elapsed < 60

    def test_elapsed_recorded(self):
        assert run_family_suite(3, (1, 1, 1)).elapsed > 0

    def test_input_model_matches(self, m3):
        report = run_family_suite(3, (1, 1, 1), model=m3)
        assert report.statuses()["input_model"] == CheckStatus.PASS
        assert not report.failed

    def test_input_model_differs(self, m3):
        """A tampered model is reported, not silently replaced."""
        f = m3.curve("F")
        tampered = replace(m3, inventory=(f,) + tuple(r for r in m3.inventory if r.label != "F"))
        report = run_family_suite(3, (1, 1, 1), model=tampered)
        assert report.statuses()["input_model"] == CheckStatus.FAIL
        assert report.failed

    def test_invalid_input(self):
        with pytest.raises(InvalidDepth):
            run_family_suite(3, (1, 1))
        with pytest.raises(UnsupportedN):
            run_family_suite(7, (1,) * 7)

    def test_plan_without_c_prime(self):
        report = run_family_suite(3, (1, 1, 1), plan=SuitePlan(weyl_samples=5, sigma_samples=2, c_prime=False))
        assert "c_prime" not in report.statuses()
        assert "5 classes" in next(c.detail for c in report.checks if c.name == "weyl.chamber")

    def test_plan_from_settings(self):
        plan = SuitePlan.from_settings(EngineSettings(weyl_samples=7, sigma_samples=3, seed=11))
        assert (plan.weyl_samples, plan.sigma_samples, plan.seed) == (7, 3, 11)

    def test_samples_are_deterministic(self):
        """The sample stream depends on the seed and the model, not on run order."""
        first = run_family_suite(3, (2, 1, 1), plan=SuitePlan(weyl_samples=20))
        second = run_family_suite(3, (2, 1, 1), plan=SuitePlan(weyl_samples=20))
        assert first.checks == second.checks

    def test_chamber_failure_reported(self, monkeypatch):
        monkeypatch.setattr("lcy_cones.harness.is_in_chamber", lambda rs, x: False)
        report = run_family_suite(3, (1, 1, 1), plan=SuitePlan(weyl_samples=3, sigma_samples=0))
        assert report.statuses()["weyl.chamber"] == CheckStatus.FAIL
        assert "outside the chamber" in next(c.detail for c in report.checks if c.name == "weyl.chamber")

    def test_engine_error_carries_model_id(self, monkeypatch):
        """Errors raised inside a suite are wrapped with the model id."""

        def broken(model):
            raise ZeroDivisionError("boom")

        monkeypatch.setattr("lcy_cones.harness.compare_dual_basis", broken)
        with pytest.raises(FamilySuiteError) as excinfo:
            run_family_suite(3, (1, 1, 1))
        assert excinfo.value.model_id == "n=3 p=(1,1,1)"
        assert "n=3 p=(1,1,1)" in str(excinfo.value)


class TestGrid:
    """Test grid runs."""

    def test_ordering(self):
        """Reports come back sorted by (n, p) and deduplicated."""
        grid = [(3, (2, 1, 1)), (1, (3,)), (3, (1, 1, 1)), (1, (3,))]
        reports = run_grid(grid)
        assert [(r.n, r.p) for r in reports] == [(1, (3,)), (3, (1, 1, 1)), (3, (2, 1, 1))]
        assert not any(r.failed for r in reports)

    @pytest.mark.parametrize("n,p", reduced_grid(1))
    def test_minimal_grid(self, n, p):
        """Depth one everywhere (depth three for n=1) passes."""
        assert not run_family_suite(n, p).failed

    @pytest.mark.parametrize("n,p", reduced_grid(1))
    def test_acceptance_plan(self, n, p):
        """Weyl reduction on 1000 classes, sigma(y) at radii 5 and 3, and every C' cone pass."""
        report = run_family_suite(n, p, plan=SuitePlan.acceptance())
        statuses = report.statuses()
        for name in ("weyl.chamber", "sigma.reference", "sigma.chamber", "c_prime"):
            assert statuses[name] == CheckStatus.PASS, name
        assert "1000 classes" in next(c.detail for c in report.checks if c.name == "weyl.chamber")
        assert "radius 5" in next(c.detail for c in report.checks if c.name == "sigma.reference")
        assert not report.failed

    @pytest.mark.skipif(not FULL_GRID, reason="set LCY_CONES_FULL_GRID=1 to run the desk grid")
    def test_desk_grid(self):
        reports = run_grid(desk_grid(EngineSettings()), workers=os.cpu_count() or 1)
        failed = [r.model_id for r in reports if r.failed]
        assert not failed


class TestMdsCertificate:
    """Test the Mori dream space certificate."""

    def test_m3(self):
        cert = mds_certificate(3, (1, 1, 1))
        assert cert.unimodular
        assert cert.picard_item_holds
        assert len(cert.nef_rays) == 4
        assert cert.nef_item_holds
        assert all(w.effective and w.chi.integral for w in cert.nef_rays)
        assert cert.curve_labels[-1] == "F"

    def test_ranks(self):
        cert = mds_certificate(4, (1, 2, 1, 2))
        assert cert.base_rank == 2
        assert cert.rank == 2 + 6
        assert cert.picard_item_holds

    def test_semiample_is_cited(self):
        assert "not machine-checked" in mds_certificate(3, (1, 1, 1)).semiample

    def test_h_has_chi_three(self):
        cert = mds_certificate(3, (1, 1, 1))
        h = next(w for w in cert.nef_rays if w.ray == ClassVector((1, 0, 0, 0)))
        assert h.chi.value == 3

    def test_rank_matches_model(self):
        assert build_family(3, (1, 1, 1)).rank == mds_certificate(3, (1, 1, 1)).rank
