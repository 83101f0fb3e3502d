from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from .exceptions import UnknownLabel
from .lattice import ClassVector, IntersectionForm


class CurveKind(str, Enum):
    BOUNDARY = "Boundary"
    EXCEPTIONAL_MINUS_ONE = "ExceptionalMinusOne"
    INTERIOR_MINUS_TWO = "InteriorMinusTwo"
    INTERIOR_EXTRA = "InteriorExtra"


class CurveClass(str, Enum):
    """Numerical classification of an arbitrary class against the boundary."""

    INTERIOR_MINUS_ONE = "InteriorMinusOne"
    INTERIOR_MINUS_TWO = "InteriorMinusTwo"
    BOUNDARY_LIKE = "BoundaryLike"
    OTHER = "Other"


class ModelOrigin(str, Enum):
    BASE = "base"
    FAMILY = "family"
    CUSTOM = "custom"  # ad-hoc blowups outside the family schedule


@dataclass(frozen=True)
class CurveRecord:
    label: str
    cls: ClassVector
    kind: CurveKind


@dataclass(frozen=True)
class BlowupStep:
    incident_labels: tuple[str, ...]
    new_label: str


@dataclass(frozen=True)
class SurfaceModel:
    n: int
    p: tuple[int, ...]
    form: IntersectionForm
    canonical: ClassVector
    boundary: tuple[CurveRecord, ...]  # cyclic order
    inventory: tuple[CurveRecord, ...]  # every curve, boundary included
    history: tuple[BlowupStep, ...] = ()
    base_rank: int = 0
    origin: ModelOrigin = ModelOrigin.BASE

    @property
    def rank(self) -> int:
        return self.form.rank

    @property
    def model_id(self) -> str:
        return f"n={self.n} p=({','.join(str(x) for x in self.p)})"

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(r.label for r in self.inventory)

    def curve(self, label: str) -> CurveRecord:
        for record in self.inventory:
            if record.label == label:
                return record
        raise UnknownLabel(label, self.labels)

    def cls(self, label: str) -> ClassVector:
        return self.curve(label).cls

    def boundary_classes(self) -> list[ClassVector]:
        return [r.cls for r in self.boundary]

    def boundary_sum(self) -> ClassVector:
        total = ClassVector.zero(self.rank)
        for record in self.boundary:
            total = total + record.cls
        return total

    def exceptional_labels(self) -> list[str]:
        return [step.new_label for step in self.history]

    def central_records(self) -> list[CurveRecord]:
        """Curves that are neither boundary components nor exceptional curves of a blowup."""
        skip = {r.label for r in self.boundary} | set(self.exceptional_labels())
        return [r for r in self.inventory if r.label not in skip]

    def chain_labels(self, i: int) -> list[str]:
        return [f"E_{{{i},{j}}}" for j in range(1, self.p[i - 1] + 1)]

    def records_of_kind(self, kind: CurveKind) -> list[CurveRecord]:
        return [r for r in self.inventory if r.kind == kind]

    def is_family(self) -> bool:
        return self.origin == ModelOrigin.FAMILY


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    model_id: str
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str) -> Optional[CheckResult]:
        return next((c for c in self.checks if c.name == name), None)


@dataclass(frozen=True)
class EulerCharacteristic:
    """chi(L) = 1 + (L^2 + L.D)/2; ``integral`` is False when L^2 + L.D is odd."""

    value: Fraction
    integral: bool


class CheckStatus(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    FLAGGED = "Flagged"  # known, documented discrepancy in a closed-form formula


@dataclass(frozen=True)
class SuiteCheck:
    name: str
    status: CheckStatus
    detail: str = ""


@dataclass
class SuiteReport:
    n: int
    p: tuple[int, ...]
    checks: list[SuiteCheck] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def model_id(self) -> str:
        return f"n={self.n} p=({','.join(str(x) for x in self.p)})"

    @property
    def failed(self) -> bool:
        return any(c.status == CheckStatus.FAIL for c in self.checks)

    def statuses(self) -> dict[str, CheckStatus]:
        return {c.name: c.status for c in self.checks}

    def add(self, name: str, passed: bool, detail: str = "", flagged: bool = False) -> None:
        if flagged:
            status = CheckStatus.FLAGGED
        else:
            status = CheckStatus.PASS if passed else CheckStatus.FAIL
        self.checks.append(SuiteCheck(name, status, detail))


@dataclass(frozen=True)
class NefRayWitness:
    """A nef-cone ray together with the evidence that it is effective."""

    ray: ClassVector
    chi: EulerCharacteristic
    effective: bool
    coefficients: tuple  # nonnegative Fractions over the curve-cone generators


@dataclass(frozen=True)
class MdsCertificate:
    n: int
    p: tuple[int, ...]
    rank: int
    base_rank: int
    unimodular: bool
    curve_rays: tuple[ClassVector, ...]
    curve_labels: tuple[str, ...]
    nef_rays: tuple[NefRayWitness, ...]
    semiample: str = "cited: nef implies semiample for these surfaces; not machine-checked"

    @property
    def model_id(self) -> str:
        return f"n={self.n} p=({','.join(str(x) for x in self.p)})"

    @property
    def picard_item_holds(self) -> bool:
        return self.unimodular and self.rank == self.base_rank + sum(self.p)

    @property
    def nef_item_holds(self) -> bool:
        return bool(self.nef_rays) and all(w.effective for w in self.nef_rays)
