"""Exact integer and rational linear algebra over a lattice with a symmetric form.

Everything here is exact: coordinates are Python ``int`` or ``fractions.Fraction``
and matrix work that is not a simple row reduction is delegated to ``sympy``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Iterator, Optional, Sequence, Union

from sympy import Matrix, Rational

from .exceptions import CandidateOutsideSublattice, DimensionMismatch, NotSymmetric, SingularGram

logger = logging.getLogger(__name__)

IntMatrix = list[list[int]]
Number = Union[int, Fraction]


def to_fraction(value) -> Fraction:
    """Convert an int, Fraction or sympy rational to a Fraction."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    q = Rational(value)
    return Fraction(int(q.p), int(q.q))


@dataclass(frozen=True)
class ClassVector:
    """Integer coordinates of a divisor class in the ambient basis."""

    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @classmethod
    def zero(cls, rank: int) -> ClassVector:
        return cls((0,) * rank)

    @classmethod
    def unit(cls, rank: int, index: int) -> ClassVector:
        return cls(tuple(1 if i == index else 0 for i in range(rank)))

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[int]:
        return iter(self.coords)

    def __getitem__(self, index: int) -> int:
        return self.coords[index]

    def _same_length(self, other: ClassVector) -> None:
        if len(other) != len(self):
            raise DimensionMismatch(len(self), len(other))

    def __add__(self, other: ClassVector) -> ClassVector:
        self._same_length(other)
        return ClassVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: ClassVector) -> ClassVector:
        self._same_length(other)
        return ClassVector(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> ClassVector:
        return ClassVector(tuple(-a for a in self.coords))

    def __mul__(self, k: int) -> ClassVector:
        return ClassVector(tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def content(self) -> int:
        """gcd of the coordinates (0 for the zero vector)."""
        return reduce(gcd, self.coords, 0)

    def primitive(self) -> ClassVector:
        g = self.content()
        if g <= 1:
            return self
        return ClassVector(tuple(a // g for a in self.coords))

    def extended(self, extra: int = 1) -> ClassVector:
        """Same class with ``extra`` zero coordinates appended (pullback under blowup)."""
        return ClassVector(self.coords + (0,) * extra)

    def __str__(self) -> str:
        return "(" + ", ".join(str(a) for a in self.coords) + ")"


@dataclass(frozen=True)
class RationalClassVector:
    """Rational coordinates, kept in lowest terms with positive denominators."""

    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(to_fraction(c) for c in self.coords))

    @classmethod
    def from_class_vector(cls, v: ClassVector) -> RationalClassVector:
        return cls(tuple(Fraction(a) for a in v.coords))

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coords)

    def __getitem__(self, index: int) -> Fraction:
        return self.coords[index]

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def denominator(self) -> int:
        return reduce(lcm, (c.denominator for c in self.coords), 1)

    def to_class_vector(self) -> ClassVector:
        if not self.is_integral():
            raise ValueError(f"vector {self} is not integral")
        return ClassVector(tuple(c.numerator for c in self.coords))

    def scaled_to_integral(self) -> ClassVector:
        """Smallest positive multiple with integer coordinates."""
        d = self.denominator()
        return ClassVector(tuple(int(c * d) for c in self.coords))

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class IntersectionForm:
    """Symmetric integer Gram matrix of a labelled ambient basis."""

    gram: tuple[tuple[int, ...], ...]
    basis_labels: tuple[str, ...]

    def __post_init__(self):
        gram = tuple(tuple(int(x) for x in row) for row in self.gram)
        labels = tuple(str(label) for label in self.basis_labels)
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "basis_labels", labels)

        size = len(gram)
        for row in gram:
            if len(row) != size:
                raise NotSymmetric(f"row of length {len(row)} in a {size}-row matrix")
        if len(labels) != size:
            raise DimensionMismatch(size, len(labels), "basis label list")
        for i in range(size):
            for j in range(i + 1, size):
                if gram[i][j] != gram[j][i]:
                    raise NotSymmetric(f"entries ({i},{j}) and ({j},{i}) differ")

    @property
    def rank(self) -> int:
        return len(self.gram)

    def check(self, v: Union[ClassVector, RationalClassVector], what: str = "vector") -> None:
        if len(v) != self.rank:
            raise DimensionMismatch(self.rank, len(v), what)

    def index_of(self, label: str) -> int:
        return self.basis_labels.index(label)

    def basis_vector(self, label: str) -> ClassVector:
        return ClassVector.unit(self.rank, self.index_of(label))

    def vector(self, **coefficients: int) -> ClassVector:
        """Build a class from keyword coefficients on basis labels (``H=1, e_1=-1``)."""
        coords = [0] * self.rank
        for label, value in coefficients.items():
            coords[self.index_of(label)] = value
        return ClassVector(tuple(coords))

    def matrix(self) -> Matrix:
        return Matrix(self.rank, self.rank, [x for row in self.gram for x in row])

    def extended(self, label: str, self_intersection: int = -1) -> IntersectionForm:
        """Orthogonal sum with one new basis vector."""
        gram = tuple(row + (0,) for row in self.gram)
        gram += (tuple([0] * self.rank + [self_intersection]),)
        return IntersectionForm(gram, self.basis_labels + (label,))


class Definiteness(str, Enum):
    NEGATIVE_DEFINITE = "NegativeDefinite"
    NEGATIVE_SEMIDEFINITE = "NegativeSemidefinite"
    OTHER = "Other"


@dataclass(frozen=True)
class GenerationCertificate:
    """Outcome of a generation test: the index of span(candidates) in the sublattice.

    ``index`` is None when the candidates do not span a full-rank sublattice.
    """

    generated: bool
    index: Optional[int]
    rank: int
    sublattice_discriminant: Optional[int] = None
    candidate_discriminant: Optional[int] = None


def _dot(u: Sequence[Number], v: Sequence[Number]) -> Number:
    return sum(a * b for a, b in zip(u, v) if a and b)


def _form_times(form: IntersectionForm, v: Sequence[Number]) -> list[Number]:
    """gram . v"""
    return [_dot(row, v) for row in form.gram]


def pair(form: IntersectionForm, u: ClassVector, v: ClassVector) -> int:
    """Intersection number u . v."""
    form.check(u)
    form.check(v)
    return _dot(u.coords, _form_times(form, v.coords))


def rational_pair(
    form: IntersectionForm,
    u: Union[ClassVector, RationalClassVector],
    v: Union[ClassVector, RationalClassVector],
) -> Fraction:
    form.check(u)
    form.check(v)
    return Fraction(_dot(list(u), _form_times(form, list(v))))


def square(form: IntersectionForm, v: ClassVector) -> int:
    return pair(form, v, v)


def functional_of(form: IntersectionForm, v: ClassVector) -> ClassVector:
    """Coordinates of x -> x . v as a row functional in the ambient basis."""
    form.check(v)
    return ClassVector(tuple(_form_times(form, v.coords)))


def classes_of_functionals(form: IntersectionForm, functionals: Sequence[ClassVector]) -> list[ClassVector]:
    """Inverse of functional_of up to positive scaling: primitive y with x . y proportional to h . x."""
    g = form.matrix()
    if g.det(method="bareiss") == 0:
        raise SingularGram(form.rank)
    inverse = g.inv()
    out = []
    for h in functionals:
        form.check(h, "functional")
        y = inverse * Matrix(list(h.coords))
        out.append(RationalClassVector(tuple(to_fraction(x) for x in y)).scaled_to_integral().primitive())
    return out


def gram_of(form: IntersectionForm, vectors: Sequence[ClassVector]) -> IntMatrix:
    """Matrix of pairings [v_i . v_j]."""
    for v in vectors:
        form.check(v)
    images = [_form_times(form, v.coords) for v in vectors]
    return [[_dot(u.coords, image) for image in images] for u in vectors]


def _square_rows(matrix) -> list[list[Fraction]]:
    if isinstance(matrix, Matrix):
        rows = [[to_fraction(matrix[i, j]) for j in range(matrix.cols)] for i in range(matrix.rows)]
    else:
        rows = [[to_fraction(x) for x in row] for row in matrix]
    size = len(rows)
    if any(len(row) != size for row in rows):
        raise NotSymmetric("matrix is not square")
    return rows


def _symmetric_rows(matrix) -> list[list[Fraction]]:
    rows = _square_rows(matrix)
    size = len(rows)
    for i in range(size):
        for j in range(i + 1, size):
            if rows[i][j] != rows[j][i]:
                raise NotSymmetric(f"entries ({i},{j}) and ({j},{i}) differ")
    return rows


def determinant(matrix) -> Fraction:
    rows = _square_rows(matrix)
    if not rows:
        return Fraction(1)
    return to_fraction(Matrix(rows).det(method="bareiss"))


def is_unimodular(matrix) -> bool:
    """True iff the determinant is +1 or -1."""
    try:
        det = determinant(matrix)
    except NotSymmetric:
        return False
    return abs(det) == 1


def signature(matrix) -> tuple[int, int, int]:
    """Inertia (positives, negatives, zeros) by symmetric Gaussian reduction.

    A zero diagonal with a nonzero off-diagonal entry a_ij is handled by the
    congruence row_i += row_j, col_i += col_j, which puts 2 a_ij on the diagonal.
    """
    a = _symmetric_rows(matrix)
    total = len(a)
    positives = negatives = 0
    while a:
        size = len(a)
        pivot = next((i for i in range(size) if a[i][i] != 0), None)
        if pivot is None:
            off = next(((i, j) for i in range(size) for j in range(i + 1, size) if a[i][j] != 0), None)
            if off is None:
                break
            i, j = off
            for k in range(size):
                a[i][k] += a[j][k]
            for k in range(size):
                a[k][i] += a[k][j]
            pivot = i
        d = a[pivot][pivot]
        if d > 0:
            positives += 1
        else:
            negatives += 1
        rest = [k for k in range(size) if k != pivot]
        a = [[a[r][c] - a[r][pivot] * a[pivot][c] / d for c in rest] for r in rest]
    return positives, negatives, total - positives - negatives


def definiteness(matrix) -> Definiteness:
    positives, negatives, zeros = signature(matrix)
    if positives == 0 and zeros == 0:
        return Definiteness.NEGATIVE_DEFINITE
    if positives == 0:
        return Definiteness.NEGATIVE_SEMIDEFINITE
    return Definiteness.OTHER


def dual_basis(form: IntersectionForm, basis: Sequence[ClassVector]) -> list[RationalClassVector]:
    """Gram-inverse dual: returns B* with B*_i . B_j = delta_ij."""
    if len(basis) != form.rank:
        raise DimensionMismatch(form.rank, len(basis), "basis")
    for b in basis:
        form.check(b)
    if not basis:
        return []
    # row i of p is the functional x -> B_i . x, so column i of p^-1 is B*_i
    p = Matrix([_form_times(form, b.coords) for b in basis])
    if p.det(method="bareiss") == 0:
        raise SingularGram(len(basis))
    inverse = p.inv()
    return [
        RationalClassVector(tuple(to_fraction(inverse[k, i]) for k in range(form.rank)))
        for i in range(form.rank)
    ]


def row_reduce(rows: list[list[int]], columns: Iterable[int]) -> int:
    """Unimodular integer row reduction in place, Hermite style.

    Processes ``columns`` in order; each yields at most one pivot row, made positive,
    with the entries above it reduced into [0, pivot). Rows below the returned pivot
    count are zero on every processed column.
    """
    top = 0
    for col in columns:
        if top == len(rows):
            break
        while True:
            nonzero = [i for i in range(top, len(rows)) if rows[i][col] != 0]
            if not nonzero:
                break
            best = min(nonzero, key=lambda i: (abs(rows[i][col]), i))
            rows[top], rows[best] = rows[best], rows[top]
            pivot = rows[top][col]
            cleared = True
            for i in range(top + 1, len(rows)):
                if rows[i][col]:
                    q = rows[i][col] // pivot
                    if q:
                        rows[i] = [a - q * b for a, b in zip(rows[i], rows[top])]
                    if rows[i][col]:
                        cleared = False
            if cleared:
                if pivot < 0:
                    rows[top] = [-a for a in rows[top]]
                for i in range(top):
                    q = rows[i][col] // rows[top][col]
                    if q:
                        rows[i] = [a - q * b for a, b in zip(rows[i], rows[top])]
                top += 1
                break
    return top


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[ClassVector]:
    """Basis of {x in Z^ncols : A x = 0} in Hermite form (saturated by construction)."""
    k = len(rows)
    augmented = [[int(rows[i][j]) for i in range(k)] + [1 if t == j else 0 for t in range(ncols)] for j in range(ncols)]
    top = row_reduce(augmented, range(k))
    kernel = [row[k:] for row in augmented[top:]]
    row_reduce(kernel, range(ncols))
    return [ClassVector(tuple(row)) for row in kernel if any(row)]


def orthogonal_complement(form: IntersectionForm, vectors: Sequence[ClassVector]) -> list[ClassVector]:
    """Basis of the saturated sublattice {x : x . v = 0 for all v}."""
    if not vectors:
        return [ClassVector.unit(form.rank, i) for i in range(form.rank)]
    functionals = [functional_of(form, v).coords for v in vectors]
    basis = integer_kernel(functionals, form.rank)
    logger.debug(f"orthogonal complement of {len(vectors)} vectors has rank {len(basis)}")
    return basis


def discriminant(form: IntersectionForm, vectors: Sequence[ClassVector]) -> int:
    return int(determinant(gram_of(form, vectors)))


def coordinates_in(basis: Sequence[ClassVector], v: ClassVector) -> Optional[list[Fraction]]:
    """Rational coordinates of v in a linearly independent family, or None if outside the span."""
    if not basis:
        return [] if v.is_zero() else None
    columns = Matrix([list(b.coords) for b in basis]).T
    try:
        solution, params = columns.gauss_jordan_solve(Matrix(list(v.coords)))
    except ValueError:
        return None
    if params.shape[0]:
        solution = solution.xreplace({s: 0 for s in params})
    return [to_fraction(x) for x in solution]


def is_generated_by(
    form: IntersectionForm,
    sublattice_basis: Sequence[ClassVector],
    candidates: Sequence[ClassVector],
) -> GenerationCertificate:
    """Decide whether candidates span the sublattice over Z, with the index as certificate."""
    for v in list(sublattice_basis) + list(candidates):
        form.check(v)
    m = len(sublattice_basis)

    coords: list[list[int]] = []
    for idx, candidate in enumerate(candidates):
        solution = coordinates_in(sublattice_basis, candidate)
        if solution is None:
            raise CandidateOutsideSublattice(idx)
        if any(c.denominator != 1 for c in solution):
            raise CandidateOutsideSublattice(idx, "not an integral combination")
        coords.append([c.numerator for c in solution])

    sub_disc = discriminant(form, sublattice_basis) if m else 1
    cand_disc = discriminant(form, candidates) if len(candidates) == m else None

    rank = row_reduce(coords, range(m))
    if rank < m:
        return GenerationCertificate(False, None, rank, sub_disc, cand_disc)
    index = 1
    for i in range(m):
        index *= coords[i][i]
    return GenerationCertificate(index == 1, index, rank, sub_disc, cand_disc)
