"""
Exact Mobius maps, restriction words and automorphism records.

An automorphism is modelled by what is known about it: its sign on the
holomorphic 2-form, a partial permutation of named curves, and its
restriction to curves it maps to themselves.  A restriction is a reduced
word whose letters are either concrete Mobius maps or opaque generators
("ι|F1", "f1|C11") whose coordinates are not known.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .lattice import (
    INF, Coordinate, LatticeError, P1Point, SpanSolver, Symbol, independent_rows, inverse,
    matmul, pair, restricted_gram, transpose,
)
from .surface import KUMMER_BRANCH, SurfaceModel, double_cover_pushforward


class ConsistencyError(AssertionError):
    """Two independent computations of the same quantity disagree."""


# ---------------------------------------------------------------------------
# Mobius maps
# ---------------------------------------------------------------------------

def _canonical(a, b, c, d) -> tuple[int, int, int, int]:
    if all(type(x) is int for x in (a, b, c, d)):
        ints = [a, b, c, d]
        if a * d - b * c == 0:
            raise ValueError("Mobius matrix must have nonzero determinant")
    else:
        entries = [Fraction(x) for x in (a, b, c, d)]
        if entries[0] * entries[3] - entries[1] * entries[2] == 0:
            raise ValueError("Mobius matrix must have nonzero determinant")
        lcm = 1
        for x in entries:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        ints = [int(x * lcm) for x in entries]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    ints = [x // g for x in ints]
    first = next(x for x in ints if x)
    if first < 0:
        ints = [-x for x in ints]
    return tuple(ints)


@dataclass(frozen=True, init=False)
class MobiusMap:
    """x -> (a x + b) / (c x + d), stored as coprime integers with a positive leading entry."""

    a: int
    b: int
    c: int
    d: int

    def __init__(self, a, b, c, d):
        for k, v in zip("abcd", _canonical(a, b, c, d)):
            object.__setattr__(self, k, v)

    @classmethod
    def identity(cls) -> MobiusMap:
        return cls(1, 0, 0, 1)

    @classmethod
    def affine(cls, epsilon, offset) -> MobiusMap:
        return cls(epsilon, offset, 0, 1)

    @classmethod
    def translation(cls, t) -> MobiusMap:
        return cls(1, t, 0, 1)

    @classmethod
    def scaling(cls, u) -> MobiusMap:
        return cls(u, 0, 0, 1)

    @classmethod
    def reflection(cls, centre) -> MobiusMap:
        """x -> centre - x."""
        return cls(-1, centre, 0, 1)

    @property
    def matrix(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a, self.b), (self.c, self.d))

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def is_identity(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d

    def __call__(self, p) -> P1Point:
        return evaluate(self, p)

    def as_affine(self) -> AffineMap | None:
        if self.c != 0:
            return None
        eps = Fraction(self.a, self.d)
        if eps not in (1, -1):
            return None
        return AffineMap(int(eps), Fraction(self.b, self.d))

    def __str__(self):
        if self.c == 0:
            slope, off = Fraction(self.a, self.d), Fraction(self.b, self.d)
            lin = {1: "x", -1: "-x"}.get(slope, f"{slope}x")
            if off == 0:
                return f"x -> {lin}"
            if slope == -1:
                return f"x -> {off} - x"
            return f"x -> {lin} {'+' if off > 0 else '-'} {abs(off)}"
        return f"x -> ({_linear(self.a, self.b)})/({_linear(self.c, self.d)})"


def _linear(p: int, q: int) -> str:
    head = {0: "", 1: "x", -1: "-x"}.get(p, f"{p}x")
    if not head:
        return str(q)
    if q == 0:
        return head
    return f"{head} {'+' if q > 0 else '-'} {abs(q)}"


def compose(f: MobiusMap, g: MobiusMap) -> MobiusMap:
    """f o g."""
    return MobiusMap(f.a * g.a + f.b * g.c, f.a * g.b + f.b * g.d,
                     f.c * g.a + f.d * g.c, f.c * g.b + f.d * g.d)


def invert(f: MobiusMap) -> MobiusMap:
    return MobiusMap(f.d, -f.b, -f.c, f.a)


def evaluate(f: MobiusMap, p) -> P1Point:
    if isinstance(p, Symbol):
        if f.is_identity():
            return p
        raise ValueError(f"cannot evaluate {f} at the symbolic point {p}")
    if not isinstance(p, P1Point):
        p = P1Point.finite(p)
    return P1Point.homogeneous(f.a * p.x + f.b * p.z, f.c * p.x + f.d * p.z)


@dataclass(frozen=True)
class AffineMap:
    """x -> epsilon x + offset with epsilon = +-1."""

    epsilon: int
    offset: Fraction

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")
        object.__setattr__(self, "offset", Fraction(self.offset))

    def to_mobius(self) -> MobiusMap:
        return MobiusMap.affine(self.epsilon, self.offset)

    def __call__(self, x):
        return self.epsilon * Fraction(x) + self.offset

    def compose(self, other: AffineMap) -> AffineMap:
        return AffineMap(self.epsilon * other.epsilon, self.epsilon * other.offset + self.offset)

    def inverse(self) -> AffineMap:
        return AffineMap(self.epsilon, -self.epsilon * self.offset)


@dataclass(frozen=True)
class AlgebraicPoints:
    """Fixed points that are conjugate quadratic irrationalities: roots of c x^2 + m x + n."""

    quadratic: tuple[int, int, int]
    count: int = 2


def fixed_points(f: MobiusMap) -> frozenset[P1Point] | AlgebraicPoints:
    if f.is_identity():
        raise ValueError("every point is fixed by the identity")
    a, b, c, d = f.a, f.b, f.c, f.d
    if c == 0:
        pts = {INF}
        if a != d:
            pts.add(P1Point.finite(Fraction(b, d - a)))
        return frozenset(pts)
    # c x^2 + (d - a) x - b = 0
    m, n = d - a, -b
    disc = m * m - 4 * c * n
    if disc < 0:
        return AlgebraicPoints((c, m, n))
    r = math.isqrt(disc)
    if r * r != disc:
        return AlgebraicPoints((c, m, n))
    return frozenset({P1Point.finite(Fraction(-m + r, 2 * c)), P1Point.finite(Fraction(-m - r, 2 * c))})


def fixed_point_count(f: MobiusMap) -> int:
    pts = fixed_points(f)
    return pts.count if isinstance(pts, AlgebraicPoints) else len(pts)


def grid_rigidity_check(points_a: Iterable[Coordinate], points_b: Iterable[Coordinate]) -> tuple[bool, bool | None]:
    """Whether fixing the grid A x B pointwise forces an automorphism of P^1 x P^1 to be trivial.

    Returns ``(rigid, swap_excluded)``.  A product map fixing >= 3 points on
    each factor is the identity; the factor swap is excluded here only when
    the two coordinate sets differ (``None`` means undecided by this test).
    """
    a, b = set(points_a), set(points_b)
    rigid = len(a) >= 3 and len(b) >= 3
    swap_excluded = True if a != b else None
    return rigid, swap_excluded


# ---------------------------------------------------------------------------
# restriction words
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Opaque:
    """An unknown self-map of a curve; ``order=2`` marks a declared nontrivial involution."""

    name: str
    order: int | None = None
    fixed_count: int | None = None


Letter = Union[MobiusMap, tuple]   # MobiusMap or (Opaque, exponent)


def _push(word: list, letter) -> None:
    if isinstance(letter, MobiusMap):
        if letter.is_identity():
            return
        if word and isinstance(word[-1], MobiusMap):
            merged = compose(word.pop(), letter)
            _push(word, merged)
        else:
            word.append(letter)
        return
    gen, exp = letter
    if gen.order:
        exp %= gen.order
    if exp == 0:
        return
    if word and not isinstance(word[-1], MobiusMap) and word[-1][0] == gen:
        _, e0 = word.pop()
        _push(word, (gen, e0 + exp))
    else:
        word.append((gen, exp))


@dataclass(frozen=True)
class CurveMap:
    """A reduced word in Mobius maps and opaque generators, read as composition left to right = outer to inner."""

    letters: tuple = ()

    @classmethod
    def of(cls, m: MobiusMap | Opaque) -> CurveMap:
        return cls.from_letters([m if isinstance(m, MobiusMap) else (m, 1)])

    @classmethod
    def from_letters(cls, letters) -> CurveMap:
        word: list = []
        for x in letters:
            _push(word, x)
        return cls(tuple(word))

    def then(self, inner: CurveMap) -> CurveMap:
        """self o inner."""
        return CurveMap.from_letters(list(self.letters) + list(inner.letters))

    def inverse(self) -> CurveMap:
        out = []
        for x in reversed(self.letters):
            out.append(invert(x) if isinstance(x, MobiusMap) else (x[0], -x[1]))
        return CurveMap.from_letters(out)

    def is_identity(self) -> bool:
        return not self.letters

    @property
    def mobius(self) -> MobiusMap | None:
        if not self.letters:
            return MobiusMap.identity()
        if len(self.letters) == 1 and isinstance(self.letters[0], MobiusMap):
            return self.letters[0]
        return None

    def fixed_point_count(self) -> int | None:
        """Number of fixed points over C when determined by the data, else None."""
        if self.is_identity():
            return None
        m = self.mobius
        if m is not None:
            return fixed_point_count(m)
        if len(self.letters) == 1:
            gen, exp = self.letters[0]
            if gen.order == 2 and exp % 2 == 1:
                return gen.fixed_count
        return None

    def to_json(self):
        out = []
        for x in self.letters:
            if isinstance(x, MobiusMap):
                out.append([x.a, x.b, x.c, x.d])
            else:
                out.append({"opaque": x[0].name, "power": x[1]})
        return out

    def __str__(self):
        if not self.letters:
            return "id"
        parts = []
        for x in self.letters:
            if isinstance(x, MobiusMap):
                parts.append(f"[{x}]")
            else:
                parts.append(x[0].name if x[1] == 1 else f"{x[0].name}^{x[1]}")
        return " o ".join(parts)


IDENTITY_MAP = CurveMap()


# ---------------------------------------------------------------------------
# automorphism records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedCurve:
    name: str
    self_int: int
    genus: int | None


@dataclass(frozen=True, eq=False)
class AutomorphismRecord:
    name: str
    omega_sign: int
    # None means the identity on every curve
    permutation: Mapping[str, str] | None
    restrictions: Mapping[str, CurveMap] = field(default_factory=dict)
    declared_fixed_curves: tuple[FixedCurve, ...] = ()
    declared_fixed_points: int = 0
    source: str = ""
    factors: tuple = ()

    def __post_init__(self):
        if self.omega_sign not in (-1, 0, 1):
            raise ValueError("omega_sign must be -1, 0 or +1")
        if self.permutation is not None:
            for r in self.restrictions:
                if self.permutation.get(r) != r:
                    raise ValueError(f"{self.name}: restriction on {r}, which is not mapped to itself")

    def image(self, curve: str) -> str | None:
        if self.permutation is None:
            return curve
        return self.permutation.get(curve)

    def restriction(self, curve: str) -> CurveMap | None:
        if self.permutation is None:
            return IDENTITY_MAP
        return self.restrictions.get(curve)

    def is_identity(self) -> bool:
        if self.permutation is None:
            return True
        return all(k == v for k, v in self.permutation.items()) and \
            all(r.is_identity() for r in self.restrictions.values()) and self.omega_sign != -1

    def same_action(self, other: AutomorphismRecord) -> bool:
        return (self.omega_sign == other.omega_sign
                and _perm(self) == _perm(other)
                and dict(self.restrictions) == dict(other.restrictions))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "source": self.source,
            "omega_sign": self.omega_sign,
            "permutation": None if self.permutation is None else dict(self.permutation),
            "restrictions": {k: v.to_json() for k, v in self.restrictions.items()},
            "declared_fixed_curves": [[f.name, f.self_int, f.genus] for f in self.declared_fixed_curves],
        }


def _perm(r: AutomorphismRecord):
    return None if r.permutation is None else dict(r.permutation)


def identity_record(omega_rank: int = 1) -> AutomorphismRecord:
    return AutomorphismRecord("id", 1 if omega_rank else 0, None, source="id")


def compose_records(f: AutomorphismRecord, g: AutomorphismRecord, name: str | None = None) -> AutomorphismRecord:
    """f o g: permutations compose where defined, restrictions on common fixed curves."""
    label = name or f"{f.name}∘{g.name}"
    source = f"{f.source} ∘ {g.source}"
    if f.permutation is None:
        return replace(g, name=label, source=source, factors=(f, g),
                       omega_sign=f.omega_sign * g.omega_sign)
    if g.permutation is None:
        return replace(f, name=label, source=source, factors=(f, g),
                       omega_sign=f.omega_sign * g.omega_sign)
    perm = {}
    for x, y in g.permutation.items():
        if y in f.permutation:
            perm[x] = f.permutation[y]
    restr = {}
    for r, gr in g.restrictions.items():
        fr = f.restrictions.get(r)
        if fr is not None and perm.get(r) == r:
            restr[r] = fr.then(gr)
    return AutomorphismRecord(label, f.omega_sign * g.omega_sign, perm, restr,
                              source=source, factors=(f, g))


def invert_record(f: AutomorphismRecord, name: str | None = None) -> AutomorphismRecord:
    if f.permutation is None:
        return f
    perm = {y: x for x, y in f.permutation.items()}
    restr = {r: m.inverse() for r, m in f.restrictions.items()}
    return AutomorphismRecord(name or f"{f.name}^-1", f.omega_sign, perm, restr,
                              f.declared_fixed_curves, f.declared_fixed_points,
                              source=f"({f.source})^-1")


def power_record(f: AutomorphismRecord, n: int) -> AutomorphismRecord:
    if n == 0:
        return identity_record(f.omega_sign != 0)
    base = f if n > 0 else invert_record(f)
    out = base
    for _ in range(abs(n) - 1):
        out = compose_records(out, base)
    return replace(out, name=f"{f.name}^{n}", source=f"{f.source}^{n}", factors=())


# -- the named automorphisms of S --------------------------------------------

C = "E1"  # the marked curve C = E1 with affine coordinate x

IOTA_ON_C = MobiusMap.reflection(2)
F1_ON_C = MobiusMap.scaling(2)


def _s_curves():
    es = [f"E{j}" for j in range(1, 5)]
    fs = [f"F{i}" for i in range(1, 5)]
    cs = [f"C{i}{j}" for i in range(1, 5) for j in range(1, 5)]
    return es + fs + cs


def make_theta() -> AutomorphismRecord:
    """Involution induced by (1_E, -1_F): fixes E_i, F_j pointwise, every rational curve setwise."""
    names = _s_curves()
    restr = {}
    for n in names:
        # on C_ij the two points on the fixed locus sit at infinity and 0
        restr[n] = IDENTITY_MAP if n[0] in "EF" else CurveMap.of(MobiusMap.scaling(-1))
    fixed = tuple(FixedCurve(n, -2, 0) for n in KUMMER_BRANCH)
    return AutomorphismRecord("theta", -1, {n: n for n in names}, restr, fixed, source="theta")


_IOTA_SWAPS = (("E2", "E3"), ("C12", "C13"), ("F2", "F4"), ("C24", "C44"), ("C21", "C41"))
_IOTA_FIXED = ("E1", "C11", "F1", "C31", "C34", "F3", "E4")


def make_iota() -> AutomorphismRecord:
    """Inversion of the IV* fibration with zero section C31."""
    perm = {n: n for n in _IOTA_FIXED}
    for x, y in _IOTA_SWAPS:
        perm[x], perm[y] = y, x
    restr = {
        C: CurveMap.of(IOTA_ON_C),
        "C11": IDENTITY_MAP,
        "C31": IDENTITY_MAP,
        "C34": IDENTITY_MAP,
    }
    for n in ("F1", "F3", "E4"):
        restr[n] = CurveMap.of(Opaque(f"iota|{n}", order=2, fixed_count=2))
    fixed = (FixedCurve("C11", -2, 0), FixedCurve("C31", -2, 0), FixedCurve("C34", -2, 0),
             FixedCurve("Sigma0", 6, 4))
    return AutomorphismRecord("iota", -1, perm, restr, fixed, source="iota")


F1_FIBER_D1 = ("E1", "C11", "F1", "C12", "E2", "C22", "F2", "C21")


def make_f1() -> AutomorphismRecord:
    """Translation of the I8 fibration by the section C41."""
    perm = {n: n for n in F1_FIBER_D1}
    perm["C31"] = "C41"
    restr = {
        C: CurveMap.of(F1_ON_C),
        "C11": CurveMap.of(Opaque("f1|C11")),
        "F1": CurveMap.of(Opaque("f1|F1")),
    }
    return AutomorphismRecord("f1", 1, perm, restr, source="f1")


def iota_n_centre(n: int) -> Fraction:
    return Fraction(2) ** (1 - n)


def _transported(curves: tuple[FixedCurve, ...], n: int) -> tuple[FixedCurve, ...]:
    if n == 0:
        return curves
    # C11 is fixed by f1, the others are moved to unnamed curves of the same type
    return tuple(c if c.name == "C11" else replace(c, name=f"f1^{-n}({c.name})") for c in curves)


def make_iota_n(n: int) -> AutomorphismRecord:
    """iota_n = f1^-n o iota o f1^n, checked against x -> 2^(1-n) - x on C."""
    f1, iota = make_f1(), make_iota()
    rec = compose_records(power_record(f1, -n), compose_records(iota, power_record(f1, n)))
    on_c = rec.restriction(C).mobius
    expected = MobiusMap.reflection(iota_n_centre(n))
    if on_c != expected:
        raise ConsistencyError(f"iota_{n}|C = {on_c}, closed formula gives {expected}")
    if not rec.restriction("C11").is_identity():
        raise ConsistencyError(f"iota_{n} does not fix C11 pointwise")
    return replace(rec, name=f"iota_{n}", source=f"f1^{-n} ∘ iota ∘ f1^{n}",
                   declared_fixed_curves=_transported(iota.declared_fixed_curves, n), factors=())


def make_f3() -> AutomorphismRecord:
    rec = compose_records(make_iota(), make_iota_n(1), name="f3")
    return replace(rec, source="iota ∘ iota_1")


def conjugate_by_f1_power(f: AutomorphismRecord, n: int) -> AutomorphismRecord:
    f1 = make_f1()
    rec = compose_records(power_record(f1, -n), compose_records(f, power_record(f1, n)))
    return replace(rec, name=f"f1^{-n}∘{f.name}∘f1^{n}", source=f"f1^{-n} ∘ ({f.source}) ∘ f1^{n}",
                   factors=())


def check_marks(rec: AutomorphismRecord, s: SurfaceModel) -> list[str]:
    """Restrictions must carry marked intersection points to the marks of the image curves."""
    problems = []
    for r, m in rec.restrictions.items():
        mob = m.mobius
        if mob is None or not s.has_curve(r):
            continue
        curve = s.curve(r)
        for other, at in curve.marks.items():
            img = rec.image(other)
            if img is None:
                continue
            if img not in curve.marks:
                problems.append(f"{r}: image {img} of {other} does not meet {r}")
            elif evaluate(mob, at) != curve.marks[img]:
                problems.append(f"{r}: {other}@{at} goes to {evaluate(mob, at)}, {img} sits at {curve.marks[img]}")
    return problems


# -- transport to T and X ----------------------------------------------------

def descend_to_T(rec: AutomorphismRecord, s: SurfaceModel, T: SurfaceModel) -> AutomorphismRecord:
    """The induced automorphism of T = S / <theta> (records must commute with theta)."""
    def r(n):
        return f"{n}_T"

    perm = None
    if rec.permutation is not None:
        perm = {r(x): r(y) for x, y in rec.permutation.items() if T.has_curve(r(x)) and T.has_curve(r(y))}
    restr = {}
    for x, m in rec.restrictions.items():
        # restrictions to branch curves are the same maps; on other curves the
        # quotient coordinate differs, so only pointwise-fixed curves survive
        if T.has_curve(r(x)) and (x in KUMMER_BRANCH or m.is_identity()):
            restr[r(x)] = m
    fixed = []
    for c in rec.declared_fixed_curves:
        base = _base_name(c.name)
        si, _ = double_cover_pushforward(s, KUMMER_BRANCH, base)
        fixed.append(FixedCurve(r(c.name), si, 0 if c.genus == 0 else None))
    return AutomorphismRecord(r(rec.name), 0, perm, restr, tuple(fixed), source=f"pi({rec.source})")


def lift_to_X(rec: AutomorphismRecord, T: SurfaceModel, X: SurfaceModel, centre_curve: str = "C11_T") -> AutomorphismRecord:
    """Lift through the blow-up at a point of a pointwise-fixed curve; E_Q goes to itself."""
    def r(n):
        return n[:-2] + "_X" if n.endswith("_T") else n

    if rec.restriction(centre_curve) is None or not rec.restriction(centre_curve).is_identity():
        raise ValueError(f"{rec.name} does not fix {centre_curve} pointwise; the blow-up centre may move")
    perm = None
    if rec.permutation is not None:
        perm = {r(x): r(y) for x, y in rec.permutation.items()}
        perm["EQ"] = "EQ"
    restr = {r(x): m for x, m in rec.restrictions.items()}
    fixed = []
    for c in rec.declared_fixed_curves:
        # only the centre curve passes through Q_T (genericity Q2)
        si = c.self_int - 1 if c.name == centre_curve else c.self_int
        fixed.append(FixedCurve(r(c.name), si, c.genus))
    nontrivial = any(not m.is_identity() for m in rec.restrictions.values()) or bool(
        perm and any(k != v for k, v in perm.items()))
    # a nontrivial involution fixing C11_T pointwise acts on E_Q with two fixed
    # points; one is C11_X . E_Q, the other is isolated
    name = r(rec.name) if rec.name.endswith("_T") else rec.name + "_X"
    return AutomorphismRecord(name, 0, perm, restr, tuple(fixed), 1 if nontrivial else 0,
                              source=f"lift({rec.source})")


def _base_name(name: str) -> str:
    m = re.fullmatch(r".*\((\w+)\)", name)
    return m.group(1) if m else name


# ---------------------------------------------------------------------------
# induced lattice isometries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NSAction:
    """Matrix of an automorphism on the sublattice spanned by the curves it moves.

    ``matrix`` columns are the images of ``basis`` in ``basis`` coordinates;
    ``ambient`` is the matrix on the whole lattice when the span is full rank.
    """

    basis: tuple[str, ...]
    matrix: tuple[tuple[Fraction, ...], ...]
    gram: tuple[tuple[int, ...], ...]
    canonical: tuple[Fraction, ...] | None
    ambient: tuple[tuple[int, ...], ...] | None

    def is_isometry(self) -> bool:
        # M^T G M == G
        m = [list(r) for r in self.matrix]
        return matmul(matmul(transpose(m), [list(r) for r in self.gram]), m) == [list(r) for r in self.gram]

    def fixes_canonical(self) -> bool | None:
        if self.canonical is None:
            return None
        k = self.canonical
        n = len(k)
        return all(sum(self.matrix[i][j] * k[j] for j in range(n)) == k[i] for i in range(n))

    def is_identity(self) -> bool:
        n = len(self.matrix)
        return all(self.matrix[i][j] == (i == j) for i in range(n) for j in range(n))


def ns_action(rec: AutomorphismRecord, s: SurfaceModel) -> NSAction:
    covered = []
    for c in s.curves:
        if c.is_opaque:
            continue
        img = rec.image(c.name)
        if img is None or not s.has_curve(img) or s.curve(img).is_opaque:
            continue
        covered.append(c.name)
    if not covered:
        raise LatticeError(f"{rec.name} moves no curve with a known class on {s.name}")
    cls = {n: s.cls(n) for n in covered}
    for x in covered:
        for y in covered:
            if pair(cls[x], cls[y]) != pair(s.cls(rec.image(x)), s.cls(rec.image(y))):
                raise LatticeError(f"{rec.name}: {x}.{y} is not preserved; no isometry extends the permutation")
    basis = [covered[i] for i in independent_rows([cls[n].coords for n in covered])]
    bvecs = [cls[n].coords for n in basis]
    solve_in_span = SpanSolver(bvecs).solve
    cols = []
    for n in basis:
        coeffs = solve_in_span(s.cls(rec.image(n)).coords)
        if coeffs is None:
            raise LatticeError(f"{rec.name}: image of {n} leaves the spanned sublattice")
        cols.append(coeffs)
    # linear consistency on the dependent curves
    for n in covered:
        src = solve_in_span(cls[n].coords)
        img = solve_in_span(s.cls(rec.image(n)).coords)
        pushed = [sum(src[j] * cols[j][i] for j in range(len(basis))) for i in range(len(basis))]
        if pushed != img:
            raise LatticeError(f"{rec.name}: permutation is not linear on the span (at {n})")
    matrix = tuple(tuple(cols[j][i] for j in range(len(basis))) for i in range(len(basis)))
    gram = tuple(tuple(row) for row in restricted_gram([cls[n] for n in basis]))
    k = solve_in_span(s.canonical.coords)
    ambient = None
    if len(basis) == s.lattice.rank:
        b = [[Fraction(x) for x in v] for v in bvecs]      # rows: basis vectors
        bt = [list(col) for col in zip(*b)]                 # columns: basis vectors
        amb = matmul(matmul(bt, [list(r) for r in matrix]), inverse(bt))
        if all(x.denominator == 1 for row in amb for x in row):
            ambient = tuple(tuple(int(x) for x in row) for row in amb)
    return NSAction(tuple(basis), matrix, gram, None if k is None else tuple(k), ambient)
