"""JSON files and the wire codecs of every exchanged object.

Integers are written as decimal strings and rationals as "num/den" strings, so values
of any size survive JSON readers that use floats.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

from .coxeter import ExtraGenerator, validate_generator
from .exceptions import LatticeError, ModelFormatError
from .lattice import ClassVector, IntersectionForm, RationalClassVector
from .models import (
    BlowupStep,
    CurveKind,
    CurveRecord,
    MdsCertificate,
    ModelOrigin,
    SuiteReport,
    SurfaceModel,
    ValidationReport,
)
from .polyhedral import RationalCone

logger = logging.getLogger(__name__)


def write_json(path: Path, data: Any) -> None:
    if is_dataclass(data) and not isinstance(data, type):
        data = asdict(data)  # type: ignore[arg-type]
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)


def read_json(path: Path, default: Optional[Any] = None) -> Any:
    """Read JSON from file with fallback to default."""
    if not path.exists():
        return default

    try:
        with path.open("r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        logger.error(f"Failed to parse JSON from {path}: {e}")
        return default
    except IOError as e:
        logger.error(f"Failed to read file {path}: {e}")
        return default


def read_text(path: Path) -> str:
    with path.open("r", encoding="utf-8") as f:
        return f.read()


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        f.write(text)


def dumps(data: Any) -> str:
    """Text form used for every JSON output."""
    return json.dumps(data, indent=2, ensure_ascii=False)


# Scalars


def encode_int(value: int) -> str:
    return str(int(value))


def encode_rational(value) -> str:
    q = Fraction(value)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def decode_int(text: Any) -> int:
    if isinstance(text, bool):
        raise ModelFormatError(f"expected an integer, got {text!r}")
    if isinstance(text, int):
        return text
    try:
        return int(str(text).strip())
    except ValueError:
        raise ModelFormatError(f"expected an integer string, got {text!r}")


def decode_rational(text: Any) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ModelFormatError(f"expected a rational string, got {text!r}")


def encode_vector(v: ClassVector) -> list[str]:
    return [encode_int(c) for c in v.coords]


def encode_rational_vector(v: RationalClassVector) -> list[str]:
    return [encode_rational(c) for c in v.coords]


def decode_vector(values: Sequence[Any]) -> ClassVector:
    if not isinstance(values, (list, tuple)):
        raise ModelFormatError(f"expected a coordinate list, got {values!r}")
    return ClassVector(tuple(decode_int(x) for x in values))


# Forms and models


def form_to_dict(form: IntersectionForm) -> dict:
    return {
        "rank": encode_int(form.rank),
        "basis_labels": list(form.basis_labels),
        "gram": [[encode_int(x) for x in row] for row in form.gram],
    }


def form_from_dict(data: dict, source: Optional[str] = None) -> IntersectionForm:
    try:
        gram = tuple(tuple(decode_int(x) for x in row) for row in data["gram"])
        labels = tuple(str(x) for x in data["basis_labels"])
        if "rank" in data and decode_int(data["rank"]) != len(gram):
            raise ModelFormatError(f"rank {data['rank']} does not match a {len(gram)}x{len(gram)} gram", source)
    except (KeyError, TypeError) as e:
        raise ModelFormatError(f"bad form: {type(e).__name__}: {e}", source)
    return IntersectionForm(gram, labels)


def model_to_dict(model: SurfaceModel) -> dict:
    return {
        "n": encode_int(model.n),
        "p": [encode_int(x) for x in model.p],
        **form_to_dict(model.form),
        "canonical": encode_vector(model.canonical),
        "boundary": [r.label for r in model.boundary],
        "curves": [
            {"label": r.label, "kind": r.kind.value, "coords": encode_vector(r.cls)}
            for r in model.inventory
        ],
        "history": [{"incident": list(step.incident_labels), "new_label": step.new_label} for step in model.history],
        "origin": model.origin.value,
        "base_rank": encode_int(model.base_rank),
    }


def model_from_dict(data: dict, source: Optional[str] = None) -> SurfaceModel:
    """Parse model JSON; every structural problem becomes ModelFormatError."""
    if not isinstance(data, dict):
        raise ModelFormatError("top level must be an object", source)
    try:
        form = form_from_dict(data, source)
        inventory = tuple(
            CurveRecord(str(c["label"]), decode_vector(c["coords"]), CurveKind(c["kind"])) for c in data["curves"]
        )
        by_label = {r.label: r for r in inventory}
        boundary = tuple(by_label[label] for label in data["boundary"])
        history = tuple(
            BlowupStep(tuple(str(x) for x in step["incident"]), str(step["new_label"])) for step in data.get("history", [])
        )
        model = SurfaceModel(
            n=decode_int(data["n"]),
            p=tuple(decode_int(x) for x in data["p"]),
            form=form,
            canonical=decode_vector(data["canonical"]),
            boundary=boundary,
            inventory=inventory,
            history=history,
            base_rank=decode_int(data.get("base_rank", form.rank - len(history))),
            origin=ModelOrigin(data.get("origin", ModelOrigin.CUSTOM.value)),
        )
    except ModelFormatError:
        raise
    except LatticeError as e:
        raise ModelFormatError(e.message, source)
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"{type(e).__name__}: {e}", source)

    for record in model.inventory:
        if len(record.cls) != form.rank:
            raise ModelFormatError(f"curve {record.label} has {len(record.cls)} coordinates, rank is {form.rank}", source)
    if len(model.canonical) != form.rank:
        raise ModelFormatError("canonical class has the wrong length", source)
    return model


def read_model(path: Path) -> SurfaceModel:
    data = read_json(path)
    if data is None:
        raise ModelFormatError("file is missing or not valid JSON", str(path))
    return model_from_dict(data, str(path))


def parse_model(text: str, source: str = "<stdin>") -> SurfaceModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"invalid JSON: {e}", source)
    return model_from_dict(data, source)


# Extra group generators


def generator_to_dict(generator: ExtraGenerator) -> dict:
    return {"label": generator.label, "matrix": [[encode_int(x) for x in row] for row in generator.matrix]}


def generator_from_dict(model: SurfaceModel, data: Any, source: Optional[str] = None) -> ExtraGenerator:
    """Read one {label, matrix} object and admit it as a generator for model."""
    if not isinstance(data, dict) or "label" not in data or "matrix" not in data:
        raise ModelFormatError("each generator needs 'label' and 'matrix'", source, what="generators")
    return validate_generator(model, str(data["label"]), data["matrix"])


def generators_from_json(model: SurfaceModel, data: Any, source: Optional[str] = None) -> list[ExtraGenerator]:
    """A list of generator objects, bare or under a "generators" key."""
    if isinstance(data, dict) and "generators" in data:
        data = data["generators"]
    if not isinstance(data, list):
        raise ModelFormatError("expected a list of generators", source, what="generators")
    generators = [generator_from_dict(model, item, source) for item in data]
    labels = [g.label for g in generators]
    repeated = sorted({label for label in labels if labels.count(label) > 1})
    if repeated:
        raise ModelFormatError(f"repeated generator labels: {', '.join(repeated)}", source, what="generators")
    return generators


def read_generators(path: Path, model: SurfaceModel) -> list[ExtraGenerator]:
    data = read_json(path)
    if data is None:
        raise ModelFormatError("file is missing or not valid JSON", str(path), what="generators")
    return generators_from_json(model, data, str(path))


# Results


def cone_to_dict(cone: RationalCone, include_halfspaces: bool = False) -> dict:
    data: dict[str, Any] = {
        "ambient_rank": encode_int(cone.ambient_rank),
        "rays": [encode_vector(r) for r in cone.rays],
    }
    if cone.labels is not None:
        data["labels"] = list(cone.labels)
    if include_halfspaces:
        data["halfspaces"] = [encode_vector(h) for h in cone.halfspaces]
    return data


def cone_from_dict(data: dict) -> RationalCone:
    try:
        rank = decode_int(data["ambient_rank"])
        rays = [decode_vector(r) for r in data["rays"]]
        labels = data.get("labels")
    except (KeyError, TypeError) as e:
        raise ModelFormatError(f"bad cone: {e}")
    return RationalCone.from_rays(rank, rays, labels)


def certificate_to_dict(cert) -> dict:
    data: dict[str, Any] = {"member": cert.member}
    if cert.coefficients is not None:
        data["coefficients"] = [encode_rational(c) for c in cert.coefficients]
    if cert.separating_functional is not None:
        data["separating_functional"] = encode_vector(cert.separating_functional)
    return data


def trace_to_dict(trace, labels: Sequence[str]) -> dict:
    return {
        "input": encode_vector(trace.input),
        "word": [labels[i] for i in trace.word],
        "output": encode_vector(trace.output),
        "iterations": encode_int(trace.iterations),
    }


def domain_result_to_dict(result) -> dict:
    data: dict[str, Any] = {"status": result.status.value, "radius": encode_int(result.radius)}
    if result.witness is not None:
        data["witness"] = list(result.witness)
    return data


def validation_to_dict(report: ValidationReport) -> dict:
    return {
        "model_id": report.model_id,
        "passed": report.passed,
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in report.checks],
    }


def suite_to_dict(report: SuiteReport, include_timing: bool = False) -> dict:
    data: dict[str, Any] = {
        "n": encode_int(report.n),
        "p": [encode_int(x) for x in report.p],
        "model_id": report.model_id,
        "failed": report.failed,
        "checks": [{"name": c.name, "status": c.status.value, "detail": c.detail} for c in report.checks],
    }
    if include_timing:
        data["elapsed"] = f"{report.elapsed:.3f}"
    return data


def mds_to_dict(cert: MdsCertificate) -> dict:
    return {
        "n": encode_int(cert.n),
        "p": [encode_int(x) for x in cert.p],
        "rank": encode_int(cert.rank),
        "base_rank": encode_int(cert.base_rank),
        "picard": {"unimodular": cert.unimodular, "holds": cert.picard_item_holds},
        "curve_cone": {
            "labels": list(cert.curve_labels),
            "rays": [encode_vector(r) for r in cert.curve_rays],
        },
        "nef": {
            "holds": cert.nef_item_holds,
            "rays": [
                {
                    "ray": encode_vector(w.ray),
                    "chi": encode_rational(w.chi.value),
                    "chi_integral": w.chi.integral,
                    "effective": w.effective,
                    "coefficients": [encode_rational(c) for c in w.coefficients],
                }
                for w in cert.nef_rays
            ],
        },
        "semiample": cert.semiample,
    }


def dual_rows_to_dict(rows) -> list[dict]:
    return [
        {
            "element": r.element,
            "variant": r.variant,
            "printed": encode_vector(r.printed),
            "computed": encode_rational_vector(r.computed),
            "status": r.status.value,
        }
        for r in rows
    ]
