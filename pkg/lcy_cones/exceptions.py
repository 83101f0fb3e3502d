"""Custom exceptions for LCY Cones with user-friendly error messages."""

from __future__ import annotations

import logging
from typing import Any, Optional, Sequence

logger = logging.getLogger(__name__)


class LcyConesError(Exception):
    """Base exception for all LCY Cones errors."""

    def __init__(
        self,
        message: str,
        user_message: Optional[str] = None,
        help_text: Optional[str] = None,
    ):
        """Initialize error with technical and user-friendly messages.

        Args:
            message: Technical error message for logs
            user_message: User-friendly message to display
            help_text: Optional help/suggestion text
        """
        super().__init__(message)
        self.message = message
        self.user_message = user_message or message
        self.help_text = help_text

        self._log_error()

    def _log_error(self):
        """Log error with user-friendly formatting."""
        logger.error(f"❌ {self.user_message}")
        if self.help_text:
            logger.info(f"💡 {self.help_text}")
        logger.debug(f"Technical details: {self.message}")


# Lattice errors


class LatticeError(LcyConesError):
    """Base class for lattice arithmetic errors."""


class DimensionMismatch(LatticeError):
    """Vector or matrix sizes disagree with the form."""

    def __init__(self, expected: int, actual: int, what: str = "vector"):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"{what} has length {actual}, expected {expected}",
            user_message=f"Dimension mismatch: {what} has {actual} coordinates, the lattice has rank {expected}",
            help_text="Give classes in ambient-basis coordinates, one integer per basis label",
        )


class NotSymmetric(LatticeError):
    """Gram matrix is not symmetric or not square."""

    def __init__(self, details: Optional[str] = None):
        message = "matrix is not symmetric"
        if details:
            message += f": {details}"
        super().__init__(
            message,
            user_message="The intersection matrix must be square and symmetric",
        )


class SingularGram(LatticeError):
    """The Gram matrix of a proposed basis is not invertible."""

    def __init__(self, size: int):
        super().__init__(
            f"Gram matrix of {size} vectors is singular",
            user_message="The given vectors are not a rational basis of the lattice",
            help_text="Check that the basis has as many independent classes as the lattice rank",
        )


class CandidateOutsideSublattice(LatticeError):
    """A candidate generator does not lie in the given sublattice."""

    def __init__(self, index: int, reason: str = "outside the span"):
        self.index = index
        super().__init__(
            f"candidate {index} is {reason} of the sublattice basis",
            user_message=f"Candidate #{index} does not belong to the sublattice ({reason})",
        )


# Surface errors


class SurfaceError(LcyConesError):
    """Base class for surface model construction errors."""


class UnsupportedN(SurfaceError):
    """Boundary length outside the supported families."""

    def __init__(self, n: Any):
        self.n = n
        super().__init__(
            f"unsupported boundary length n={n}",
            user_message=f"No family is defined for n={n}",
            help_text="Supported boundary lengths are 1 through 6",
        )


class UnknownLabel(SurfaceError):
    """A curve label is not present in the model inventory."""

    def __init__(self, label: str, known: Optional[Sequence[str]] = None):
        self.label = label
        help_text = None
        if known:
            help_text = f"Known labels include: {', '.join(list(known)[:8])}"
        super().__init__(
            f"unknown curve label '{label}'",
            user_message=f"Curve '{label}' is not part of this model",
            help_text=help_text,
        )


class InconsistentIncidence(SurfaceError):
    """Curves declared to pass through a point cannot meet there."""

    def __init__(self, first: str, second: str, pairing: int):
        self.first = first
        self.second = second
        self.pairing = pairing
        super().__init__(
            f"curves {first} and {second} have pairing {pairing} < 1",
            user_message=f"Curves {first} and {second} do not meet, so they cannot share a blown-up point",
        )


class InvalidDepth(SurfaceError):
    """Blowup depths do not fit the family."""

    def __init__(self, n: int, p: Sequence[int], reason: str):
        self.n = n
        self.p = tuple(p)
        super().__init__(
            f"invalid depths p={tuple(p)} for n={n}: {reason}",
            user_message=f"Invalid blowup depths {tuple(p)} for n={n}",
            help_text=reason,
        )


class ModelNotFromFamily(SurfaceError):
    """Operation requires a model produced by build_family."""

    def __init__(self, origin: str):
        super().__init__(
            f"model origin is '{origin}', expected 'family'",
            user_message="This operation only applies to family models",
            help_text="Build the model with `family n p...` instead of ad-hoc blowups",
        )


# Cone errors


class ConeError(LcyConesError):
    """Base class for cone computation errors."""


class NotDisjoint(ConeError):
    """Interior (-1)-curves passed to c_prime_cone intersect."""

    def __init__(self, first: str, second: str, pairing: int):
        self.first = first
        self.second = second
        self.pairing = pairing
        super().__init__(
            f"curves {first} and {second} have pairing {pairing}, expected 0",
            user_message=f"Curves {first} and {second} are not disjoint",
        )


class NotMinusOne(ConeError):
    """A curve passed to c_prime_cone is not an interior (-1)-curve."""

    def __init__(self, label: str, kind: str):
        super().__init__(
            f"curve {label} classifies as {kind}",
            user_message=f"Curve {label} is not an interior (-1)-curve",
        )


class WrongN(ConeError):
    """Check is specific to another boundary length."""

    def __init__(self, expected: int, actual: int):
        super().__init__(
            f"check requires n={expected}, model has n={actual}",
            user_message=f"This check only applies to n={expected} models",
        )


# Coxeter errors


class CoxeterError(LcyConesError):
    """Base class for Weyl group errors."""


class NotARoot(CoxeterError):
    """Reflection vector does not have square -2."""

    def __init__(self, square: int):
        super().__init__(
            f"vector has square {square}, roots have square -2",
            user_message="Reflections are only defined for classes of square -2",
        )


class MaxIterExceeded(CoxeterError):
    """Chamber reduction did not finish within max_iter reflections."""

    def __init__(self, max_iter: int, trace: Any = None):
        self.max_iter = max_iter
        self.trace = trace
        super().__init__(
            f"chamber reduction exceeded {max_iter} iterations",
            user_message=f"Reduction did not reach the fundamental chamber in {max_iter} steps",
            help_text="Check that the class lies in the positive cone, or raise --max-iter",
        )


class YNotInterior(CoxeterError):
    """Reference class y is not strictly inside the nef cone."""

    def __init__(self, reason: str):
        super().__init__(
            f"y is not interior: {reason}",
            user_message="The reference class y must be ample",
            help_text="Pick y with y.C > 0 for every curve generator and y^2 > 0, or omit it to use the default",
        )


class InvalidGenerator(CoxeterError):
    """User-supplied group generator is not an admissible isometry."""

    def __init__(self, label: str, reason: str):
        self.label = label
        super().__init__(
            f"generator {label} rejected: {reason}",
            user_message=f"Extra generator '{label}' is not admissible ({reason})",
        )


# Ambient errors


class ConfigError(LcyConesError):
    """Settings value out of range."""

    def __init__(self, field: str, value: Any, reason: str):
        self.field = field
        super().__init__(
            f"invalid setting {field}={value!r}: {reason}",
            user_message=f"Setting '{field}' is invalid: {reason}",
            help_text="Fix the value in config.json or the corresponding LCY_CONES_* variable",
        )


class ModelFormatError(LcyConesError):
    """Serialized model, cone or generator list is malformed."""

    _HELP = {
        "model": "Use JSON produced by `lcy-cones family`",
        "generators": 'Give a list of {"label": ..., "matrix": [[...], ...]} objects with integer entries',
    }

    def __init__(self, details: str, source: Optional[str] = None, what: str = "model"):
        self.what = what
        where = f" in {source}" if source else ""
        super().__init__(
            f"malformed {what} JSON{where}: {details}",
            user_message=f"Could not read the {what}{where}",
            help_text=self._HELP.get(what),
        )


class RankLimitExceeded(LcyConesError):
    """Model rank exceeds the configured cost guard."""

    def __init__(self, rank: int, limit: int):
        self.rank = rank
        self.limit = limit
        super().__init__(
            f"model rank {rank} exceeds limit {limit}",
            user_message=f"Model rank {rank} is above the configured limit of {limit}",
            help_text="Raise LCY_CONES_MAX_RANK to allow larger models",
        )


class FamilySuiteError(LcyConesError):
    """An engine failure while running a verification suite."""

    def __init__(self, model_id: str, cause: str):
        self.model_id = model_id
        self.cause = cause
        super().__init__(
            f"[{model_id}] {cause}",
            user_message=f"Verification of {model_id} failed with an engine error",
            help_text=cause,
        )

    def __reduce__(self):
        # grid workers send this back across the process pool
        return (type(self), (self.model_id, self.cause))


def handle_engine_error(error: Exception, model_id: str) -> LcyConesError:
    """Convert an exception raised inside a suite to an error carrying the model id.

    Args:
        error: The original exception
        model_id: Identifier such as "n=3 p=(1,1,1)"

    Returns:
        FamilySuiteError whose messages mention the model id
    """
    if isinstance(error, FamilySuiteError):
        return error
    if isinstance(error, LcyConesError):
        return FamilySuiteError(model_id, f"{type(error).__name__}: {error.message}")
    if isinstance(error, ZeroDivisionError):
        return FamilySuiteError(model_id, f"division by zero in exact arithmetic: {error}")
    return FamilySuiteError(model_id, f"unexpected {type(error).__name__}: {error}")
