from fractions import Fraction

import pytest

from lcy_cones.exceptions import UnknownLabel
from lcy_cones.lattice import ClassVector
from lcy_cones.models import (
    CheckResult,
    CheckStatus,
    CurveKind,
    EulerCharacteristic,
    MdsCertificate,
    ModelOrigin,
    NefRayWitness,
    SuiteReport,
    ValidationReport,
)


class TestSurfaceModel:
    """Test the lookups on a built model."""

    def test_identity(self, m3):
        assert m3.model_id == "n=3 p=(1,1,1)"
        assert m3.rank == 4
        assert m3.base_rank == 1
        assert m3.origin == ModelOrigin.FAMILY
        assert m3.is_family()

    def test_labels_in_inventory_order(self, m3):
        """Base curves first, then exceptional curves in blowup order."""
        assert m3.labels == ("D_1", "D_2", "D_3", "F", "E_{1,1}", "E_{2,1}", "E_{3,1}")

    def test_curve_lookup(self, m3):
        assert m3.curve("F").kind == CurveKind.INTERIOR_MINUS_TWO
        assert m3.cls("E_{1,1}") == ClassVector((0, 1, 0, 0))

    def test_unknown_label(self, m3):
        with pytest.raises(UnknownLabel) as excinfo:
            m3.curve("G")
        assert excinfo.value.label == "G"

    def test_boundary_is_anticanonical(self, m3, m4):
        assert m3.boundary_sum() == -m3.canonical
        assert m4.boundary_sum() == -m4.canonical

    def test_exceptional_and_central(self, m3):
        assert m3.exceptional_labels() == ["E_{1,1}", "E_{2,1}", "E_{3,1}"]
        assert [r.label for r in m3.central_records()] == ["F"]

    def test_chain_labels(self, m3_222):
        assert m3_222.chain_labels(2) == ["E_{2,1}", "E_{2,2}"]

    def test_records_of_kind(self, m3):
        assert len(m3.records_of_kind(CurveKind.BOUNDARY)) == 3
        assert len(m3.records_of_kind(CurveKind.EXCEPTIONAL_MINUS_ONE)) == 3


class TestReports:
    """Test validation and suite report bookkeeping."""

    def test_validation_report(self):
        report = ValidationReport("m", (CheckResult("a", True), CheckResult("b", False, "why")))
        assert not report.passed
        assert report.failures() == [CheckResult("b", False, "why")]
        assert report.check("a").passed
        assert report.check("missing") is None

    def test_suite_statuses(self):
        report = SuiteReport(2, (1, 1))
        report.add("ok", True)
        report.add("printed", False, "F_2*", flagged=True)
        assert report.statuses() == {"ok": CheckStatus.PASS, "printed": CheckStatus.FLAGGED}
        assert not report.failed
        report.add("broken", False)
        assert report.failed
        assert report.model_id == "n=2 p=(1,1)"


class TestMdsCertificate:
    def test_items(self):
        witness = NefRayWitness(ClassVector((1, 0)), EulerCharacteristic(Fraction(3), True), True, (Fraction(1),))
        cert = MdsCertificate(3, (1,), rank=2, base_rank=1, unimodular=True, curve_rays=(), curve_labels=(), nef_rays=(witness,))
        assert cert.picard_item_holds
        assert cert.nef_item_holds

    def test_no_nef_rays(self):
        cert = MdsCertificate(3, (1,), rank=3, base_rank=1, unimodular=True, curve_rays=(), curve_labels=(), nef_rays=())
        assert not cert.picard_item_holds
        assert not cert.nef_item_holds
