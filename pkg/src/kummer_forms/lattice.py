"""
Exact integer lattices with a symmetric bilinear form, and points of P^1.

Everything here is exact: integers are Python ints, rationals are
``fractions.Fraction`` and the point at infinity of P^1 is the projective
point (1:0).  Nothing in the package ever touches a float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

ExactRational = Fraction


class LatticeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# exact linear algebra on small matrices
# ---------------------------------------------------------------------------

def _to_fractions(rows):
    return [[Fraction(x) for x in row] for row in rows]


def determinant(matrix: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction Gaussian elimination."""
    m = _to_fractions(matrix)
    n = len(m)
    if any(len(row) != n for row in m):
        raise LatticeError("determinant of a non-square matrix")
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        p = m[col][col]
        det *= p
        for r in range(col + 1, n):
            factor = m[r][col] / p
            if factor:
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return det


def independent_rows(rows: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal independent subset of ``rows``, greedily in order."""
    echelon: list[tuple[int, list[Fraction]]] = []  # (pivot column, row)
    chosen = []
    for idx, row in enumerate(rows):
        v = [Fraction(x) for x in row]
        for pcol, prow in echelon:
            if v[pcol]:
                f = v[pcol] / prow[pcol]
                v = [a - f * b for a, b in zip(v, prow)]
        pcol = next((k for k, x in enumerate(v) if x), None)
        if pcol is not None:
            echelon.append((pcol, v))
            chosen.append(idx)
    return chosen


def matrix_rank(rows: Sequence[Sequence]) -> int:
    return len(independent_rows(rows))


def solve_in_span(basis: Sequence[Sequence], target: Sequence) -> list[Fraction] | None:
    """Coefficients ``c`` with ``sum c_k basis_k == target`` or None.

    ``basis`` must be linearly independent.
    """
    k = len(basis)
    n = len(target)
    # augmented system: columns are basis vectors
    aug = [[Fraction(basis[j][i]) for j in range(k)] + [Fraction(target[i])] for i in range(n)]
    row = 0
    pivots = []
    for col in range(k):
        pivot = next((r for r in range(row, n) if aug[r][col] != 0), None)
        if pivot is None:
            continue
        aug[row], aug[pivot] = aug[pivot], aug[row]
        p = aug[row][col]
        aug[row] = [x / p for x in aug[row]]
        for r in range(n):
            if r != row and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
    if any(aug[r][k] != 0 for r in range(row, n)):
        return None
    coeffs = [Fraction(0)] * k
    for r, col in enumerate(pivots):
        coeffs[col] = aug[r][k]
    return coeffs


class SpanSolver:
    """Repeated ``solve_in_span`` against one fixed independent basis.

    Row reduction of the basis is done once, recording the row operations,
    so each solve costs one matrix-vector product.
    """

    def __init__(self, basis: Sequence[Sequence]):
        k = len(basis)
        n = len(basis[0]) if basis else 0
        aug = [[Fraction(basis[j][i]) for j in range(k)] + [Fraction(int(i == r)) for r in range(n)]
               for i in range(n)]
        row = 0
        self._pivots = []
        for col in range(k):
            pivot = next((r for r in range(row, n) if aug[r][col] != 0), None)
            if pivot is None:
                raise LatticeError("SpanSolver basis is not independent")
            aug[row], aug[pivot] = aug[pivot], aug[row]
            p = aug[row][col]
            aug[row] = [x / p for x in aug[row]]
            for r in range(n):
                if r != row and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [a - f * b for a, b in zip(aug[r], aug[row])]
            self._pivots.append(col)
            row += 1
        self._k = k
        self._ops = [r[k:] for r in aug]

    def solve(self, target: Sequence) -> list[Fraction] | None:
        t = [Fraction(x) for x in target]
        red = [sum((a * b for a, b in zip(op, t) if a), Fraction(0)) for op in self._ops]
        if any(red[r] != 0 for r in range(self._k, len(red))):
            return None
        return red[:self._k]


def inverse(matrix: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(matrix)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise LatticeError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def matmul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)]


# ---------------------------------------------------------------------------
# lattices and divisor classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GramLattice:
    """A free Z-module with a named basis and a symmetric integer Gram matrix."""

    lattice_id: str
    basis: tuple[str, ...]
    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.gram)
        if n < 1:
            raise LatticeError("lattice rank must be at least 1")
        if any(len(row) != n for row in self.gram):
            raise LatticeError("Gram matrix is not square")
        for i in range(n):
            for j in range(i):
                if self.gram[i][j] != self.gram[j][i]:
                    raise LatticeError(f"Gram matrix not symmetric at ({i}, {j})")
        if len(self.basis) != n:
            raise LatticeError("basis length does not match Gram size")
        if len(set(self.basis)) != n:
            raise LatticeError("basis names must be distinct")

    @classmethod
    def from_rows(cls, lattice_id: str, basis: Iterable[str], gram) -> GramLattice:
        return cls(lattice_id, tuple(basis), tuple(tuple(int(x) for x in row) for row in gram))

    @property
    def rank(self) -> int:
        return len(self.gram)

    def index(self, name: str) -> int:
        try:
            return self.basis.index(name)
        except ValueError:
            raise LatticeError(f"{name!r} is not a basis vector of {self.lattice_id}") from None

    def vector(self, coords: Iterable[int]) -> DivisorClass:
        return DivisorClass(tuple(int(c) for c in coords), self)

    def basis_class(self, name: str) -> DivisorClass:
        coords = [0] * self.rank
        coords[self.index(name)] = 1
        return DivisorClass(tuple(coords), self)

    def zero(self) -> DivisorClass:
        return DivisorClass((0,) * self.rank, self)

    def combination(self, terms: dict[str, int]) -> DivisorClass:
        out = self.zero()
        for name, m in terms.items():
            out = out + m * self.basis_class(name)
        return out


@dataclass(frozen=True, eq=False)
class DivisorClass:
    coords: tuple[int, ...]
    lattice: GramLattice

    def __post_init__(self):
        if len(self.coords) != self.lattice.rank:
            raise LatticeError(
                f"class of length {len(self.coords)} in lattice {self.lattice.lattice_id} "
                f"of rank {self.lattice.rank}")

    @property
    def lattice_id(self) -> str:
        return self.lattice.lattice_id

    def _check(self, other: DivisorClass):
        if self.lattice_id != other.lattice_id:
            raise LatticeError(
                f"classes live in different lattices: {self.lattice_id!r} and {other.lattice_id!r}")

    def __add__(self, other: DivisorClass) -> DivisorClass:
        self._check(other)
        return DivisorClass(tuple(a + b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __sub__(self, other: DivisorClass) -> DivisorClass:
        self._check(other)
        return DivisorClass(tuple(a - b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __neg__(self) -> DivisorClass:
        return DivisorClass(tuple(-a for a in self.coords), self.lattice)

    def __rmul__(self, k: int) -> DivisorClass:
        return DivisorClass(tuple(k * a for a in self.coords), self.lattice)

    __mul__ = __rmul__

    def __eq__(self, other):
        if not isinstance(other, DivisorClass):
            return NotImplemented
        return self.lattice_id == other.lattice_id and self.coords == other.coords

    def __hash__(self):
        return hash((self.lattice_id, self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __repr__(self):
        terms = []
        for c, name in zip(self.coords, self.lattice.basis):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            terms.append(f"{sign} {mag}{name}")
        if not terms:
            return "0"
        s = " ".join(terms)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def pair(a: DivisorClass, b: DivisorClass) -> int:
    """Intersection number a^T G b."""
    a._check(b)
    g = a.lattice.gram
    total = 0
    for i, x in enumerate(a.coords):
        if x:
            row = g[i]
            total += x * sum(gij * y for gij, y in zip(row, b.coords))
    return total


def gram_determinant(lat: GramLattice) -> int:
    det = determinant(lat.gram)
    assert det.denominator == 1
    return int(det)


def _genus(self_int: int, canonical_degree: int) -> int:
    s = self_int + canonical_degree
    if s % 2:
        raise LatticeError(
            f"C^2 + C.K = {s} is odd; not the class of a smooth irreducible curve")
    return 1 + s // 2


def adjunction_genus(c: DivisorClass, canonical: DivisorClass) -> int:
    """Arithmetic genus 1 + (C^2 + C.K)/2."""
    return _genus(pair(c, c), pair(c, canonical))


def restricted_gram(classes: Sequence[DivisorClass]) -> list[list[int]]:
    return [[pair(a, b) for b in classes] for a in classes]


def is_negative_definite(classes: Sequence[DivisorClass]) -> bool:
    """Whether the form is negative definite on the span of ``classes``.

    A basis of the span is extracted by exact row reduction; the restricted
    Gram matrix is then tested by the signs of its leading principal minors.
    The span of only zero classes is the zero space, which counts as definite.
    """
    if not classes:
        raise LatticeError("is_negative_definite needs at least one class")
    for c in classes[1:]:
        classes[0]._check(c)
    basis = [classes[i] for i in independent_rows([c.coords for c in classes])]
    g = restricted_gram(basis)
    for k in range(1, len(basis) + 1):
        minor = determinant([row[:k] for row in g[:k]])
        if (minor > 0) != (k % 2 == 0) or minor == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# points of P^1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class P1Point:
    """A point (x:z) of P^1(Q), normalised to (x:1) or (1:0)."""

    x: Fraction
    z: Fraction

    @classmethod
    def homogeneous(cls, x, z) -> P1Point:
        x, z = Fraction(x), Fraction(z)
        if x == 0 and z == 0:
            raise LatticeError("(0:0) is not a point of P^1")
        if z == 0:
            return cls(Fraction(1), Fraction(0))
        return cls(x / z, Fraction(1))

    @classmethod
    def finite(cls, value) -> P1Point:
        return cls(Fraction(value), Fraction(1))

    @property
    def is_infinity(self) -> bool:
        return self.z == 0

    @property
    def value(self) -> Fraction:
        if self.is_infinity:
            raise LatticeError("the point at infinity has no affine value")
        return self.x

    def __str__(self):
        return "inf" if self.is_infinity else str(self.x)


INF = P1Point(Fraction(1), Fraction(0))


@dataclass(frozen=True)
class Symbol:
    """A symbolic coordinate such as the generic parameter lambda.

    A symbol never equals a concrete point; two symbols are equal only by name.
    """

    name: str

    def __str__(self):
        return self.name


LAMBDA = Symbol("lambda")

Coordinate = Union[P1Point, Symbol]


def coord(value) -> Coordinate:
    """Coerce ints, Fractions, ``"inf"`` and symbols to a coordinate."""
    if isinstance(value, (P1Point, Symbol)):
        return value
    if isinstance(value, str):
        if value in ("inf", "oo", "∞"):
            return INF
        try:
            return P1Point.finite(Fraction(value))
        except ValueError:
            return Symbol(value)
    return P1Point.finite(Fraction(value))


def same_point(p: Coordinate, q: Coordinate) -> bool:
    return type(p) is type(q) and p == q


def format_fraction(x) -> str:
    """Exact ``p/q`` string (integers keep the denominator 1)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"
