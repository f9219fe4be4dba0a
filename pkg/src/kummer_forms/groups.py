"""
Decision procedures for subgroups of the affine group x -> ±x + b over Q.

Translation parts are subgroups of (Q, +) of two kinds: finitely
generated (always cyclic, d·Z) and dyadic closures s·Z[1/2].  Involutions
x -> c - x are identified with their centres c; conjugating by (ε, a)
sends c to εc + 2a, so conjugacy is a congruence question on centres.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence, Union

from .automorphisms import AffineMap, MobiusMap, compose, evaluate, invert
from .lattice import P1Point, coord, format_fraction


class NotInGroupError(ValueError):
    """An involution handed to a conjugacy test violates the group's constraints."""


class UnsupportedError(ValueError):
    pass


# ---------------------------------------------------------------------------
# subgroups of (Q, +)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FinitelyGenerated:
    generators: tuple[Fraction, ...]

    def __init__(self, generators: Iterable):
        object.__setattr__(self, "generators", tuple(Fraction(g) for g in generators))


@dataclass(frozen=True)
class DyadicClosure:
    """{scale · m / 2^k : m in Z, k >= 0}."""

    scale: Fraction

    def __init__(self, scale=1):
        scale = Fraction(scale)
        if scale <= 0:
            raise ValueError("dyadic closure needs a positive scale")
        object.__setattr__(self, "scale", scale)


RationalSubgroup = Union[FinitelyGenerated, DyadicClosure]


def normalize(g: FinitelyGenerated) -> Fraction:
    """The non-negative generator d with <generators> = d·Z."""
    gens = [x for x in g.generators if x != 0]
    if not gens:
        return Fraction(0)
    common = math.lcm(*(x.denominator for x in gens))
    return Fraction(math.gcd(*(x.numerator * (common // x.denominator) for x in gens)), common)


def _is_dyadic(x: Fraction) -> bool:
    q = x.denominator
    return q & (q - 1) == 0


def contains(g: RationalSubgroup, x) -> bool:
    x = Fraction(x)
    if isinstance(g, DyadicClosure):
        return _is_dyadic(x / g.scale)
    d = normalize(g)
    if d == 0:
        return x == 0
    return (x / d).denominator == 1


@dataclass(frozen=True)
class GenerationCertificate:
    finitely_generated: bool
    generator: Fraction | None = None
    # for non-f.g. groups: members s/2^k whose denominators grow without bound
    witness: tuple[Fraction, ...] = ()
    argument: str = ""


def is_finitely_generated(g: RationalSubgroup, witness_length: int = 10) -> tuple[bool, GenerationCertificate]:
    if isinstance(g, FinitelyGenerated):
        d = normalize(g)
        return True, GenerationCertificate(True, d, argument=f"cyclic, generated by {format_fraction(d)}")
    wit = tuple(g.scale / 2 ** k for k in range(1, witness_length + 1))
    return False, GenerationCertificate(
        False, None, wit,
        "any finite subset lies in (s/L)Z with L the lcm of its denominators; "
        "the members s/2^k have unbounded denominators, so one escapes")


def escape_witness(g: DyadicClosure, candidates: Sequence) -> Fraction:
    """A member of ``g`` outside the subgroup generated by ``candidates``."""
    sub = FinitelyGenerated(candidates)
    for c in sub.generators:
        if not contains(g, c):
            raise ValueError(f"{c} is not in the dyadic closure")
    k = 1
    while contains(sub, g.scale / 2 ** k):
        k += 1
    return g.scale / 2 ** k


# ---------------------------------------------------------------------------
# involutions and the affine model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Involution:
    """x -> center - x."""

    center: Fraction

    def __init__(self, center):
        object.__setattr__(self, "center", Fraction(center))

    def to_mobius(self) -> MobiusMap:
        return MobiusMap.reflection(self.center)


def _affine(g) -> AffineMap:
    if isinstance(g, AffineMap):
        return g
    eps, a = g
    return AffineMap(int(eps), Fraction(a))


def conjugate_involution(g, inv: Involution | Fraction) -> Involution:
    """Centre of g ∘ (x -> c - x) ∘ g^-1."""
    g = _affine(g)
    c = inv.center if isinstance(inv, Involution) else Fraction(inv)
    return Involution(g.epsilon * c + 2 * g.offset)


@dataclass(frozen=True)
class AffineGroupModel:
    """Translations by A, optionally reflections x -> b - x for b in b0 + A.

    With ``marked_set`` only the elements that permute it belong to the group.
    ``contains_involutions`` asks that tested involutions themselves be members;
    by default they are outside elements conjugated by the group.
    """

    translations: RationalSubgroup
    reflection_offset: Fraction | None = None
    marked_set: frozenset | None = None
    contains_involutions: bool = False

    def __post_init__(self):
        if self.reflection_offset is not None:
            object.__setattr__(self, "reflection_offset", Fraction(self.reflection_offset))
        if self.marked_set is not None:
            object.__setattr__(self, "marked_set", frozenset(coord(q) for q in self.marked_set))

    def has_affine(self, g: AffineMap) -> bool:
        if g.epsilon == 1:
            ok = contains(self.translations, g.offset)
        else:
            ok = self.reflection_offset is not None and \
                contains(self.translations, g.offset - self.reflection_offset)
        if ok and self.marked_set is not None:
            ok = permutes(g.to_mobius(), self.marked_set)
        return ok


def integer_model() -> AffineGroupModel:
    return AffineGroupModel(FinitelyGenerated([1]), reflection_offset=0)


def dyadic_model() -> AffineGroupModel:
    return AffineGroupModel(DyadicClosure(1))


def permutes(f: MobiusMap, points: Iterable) -> bool:
    pts = {coord(p) for p in points}
    return {evaluate(f, p) for p in pts} == pts


# ---------------------------------------------------------------------------
# finite stabilizers of marked sets
# ---------------------------------------------------------------------------

def _vec(p: P1Point) -> tuple[Fraction, Fraction]:
    return (p.x, p.z)


def _from_standard(p0: P1Point, p1: P1Point, p2: P1Point) -> list[list[Fraction]]:
    """Matrix sending 0, 1, ∞ to p0, p1, p2."""
    u0, u1, u2 = _vec(p0), _vec(p1), _vec(p2)
    det = u2[0] * u0[1] - u0[0] * u2[1]
    alpha = (u1[0] * u0[1] - u0[0] * u1[1]) / det
    beta = (u2[0] * u1[1] - u1[0] * u2[1]) / det
    return [[alpha * u2[0], beta * u0[0]], [alpha * u2[1], beta * u0[1]]]


def mobius_through(src: Sequence, dst: Sequence) -> MobiusMap:
    """The Mobius map sending three distinct points ``src`` to ``dst``."""
    (a, b), (c, d) = _from_standard(*(coord(p) for p in src))
    m_src_inv = MobiusMap(d, -b, -c, a)
    (a, b), (c, d) = _from_standard(*(coord(p) for p in dst))
    return compose(MobiusMap(a, b, c, d), m_src_inv)


def _point_key(p: P1Point):
    return (1, 0) if p.is_infinity else (0, p.x)


def marked_stabilizer(points: Iterable) -> list[MobiusMap]:
    """Every Mobius map permuting a finite set of at least three points."""
    q = sorted({coord(p) for p in points}, key=_point_key)
    if len(q) < 3:
        raise ValueError(f"stabilizer of {len(q)} points is infinite; need at least 3")
    src = q[:3]
    out = []
    for dst in permutations(q, 3):
        f = mobius_through(src, dst)
        if permutes(f, q):
            out.append(f)
    return out


# ---------------------------------------------------------------------------
# conjugacy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConjugacyResult:
    conjugate: bool
    witness: AffineMap | None = None
    obstruction: str = ""

    def __bool__(self):
        return self.conjugate


def _check_member(inv: Involution, G: AffineGroupModel) -> None:
    if G.contains_involutions and not G.has_affine(AffineMap(-1, inv.center)):
        raise NotInGroupError(f"NOT_IN_GROUP: x -> {format_fraction(inv.center)} - x is not in the group")
    if G.marked_set is not None and not permutes(inv.to_mobius(), G.marked_set):
        raise NotInGroupError(
            f"NOT_IN_GROUP: x -> {format_fraction(inv.center)} - x does not preserve the marked set")


def are_conjugate(c: Involution, d: Involution, G: AffineGroupModel) -> ConjugacyResult:
    c = c if isinstance(c, Involution) else Involution(c)
    d = d if isinstance(d, Involution) else Involution(d)
    _check_member(c, G)
    _check_member(d, G)
    A = G.translations
    if G.marked_set is not None:
        for f in marked_stabilizer(G.marked_set):
            g = f.as_affine()
            if g is not None and G.has_affine(g) and conjugate_involution(g, c) == d:
                return ConjugacyResult(True, g)
        return ConjugacyResult(False, obstruction="no element of the finite stabilizer conjugates")
    a = (d.center - c.center) / 2
    if contains(A, a):
        return ConjugacyResult(True, AffineMap(1, a))
    if G.reflection_offset is None:
        return ConjugacyResult(False, obstruction=f"(d - c)/2 = {format_fraction(a)} is not a translation")
    b = (d.center + c.center) / 2
    if contains(A, b - G.reflection_offset):
        return ConjugacyResult(True, AffineMap(-1, b))
    return ConjugacyResult(
        False, obstruction=f"(d - c)/2 = {format_fraction(a)} and (d + c)/2 = {format_fraction(b)} "
                           f"both miss their cosets")


def _affine_json(g: AffineMap) -> dict:
    return {"epsilon": g.epsilon, "offset": format_fraction(g.offset)}


@dataclass(frozen=True)
class Partition:
    centers: tuple[Fraction, ...]
    classes: tuple[tuple[int, ...], ...]
    witnesses: tuple[tuple[int, int, AffineMap], ...]   # (member, representative, g)
    rule_citations: tuple[str, ...] = ()

    @property
    def count(self) -> int:
        return len(self.classes)

    def to_json(self) -> dict:
        return {
            "centers": [format_fraction(c) for c in self.centers],
            "classes": [list(k) for k in self.classes],
            "witnesses": [{"member": m, "representative": r, "conjugator": _affine_json(g)}
                          for m, r, g in self.witnesses],
            "rule_citations": list(self.rule_citations),
        }


def count_conjugacy_classes(centers: Sequence, G: AffineGroupModel) -> Partition:
    cs = tuple(Fraction(c) for c in centers)
    classes: list[list[int]] = []
    witnesses = []
    for i, c in enumerate(cs):
        for k in classes:
            res = are_conjugate(Involution(cs[k[0]]), Involution(c), G)
            if res:
                k.append(i)
                witnesses.append((i, k[0], res.witness))
                break
        else:
            classes.append([i])
    return Partition(cs, tuple(tuple(k) for k in classes), tuple(witnesses),
                     ("conjugacy of x -> c - x by (e, a) gives centre e*c + 2a",))


@dataclass(frozen=True)
class RealFormBound:
    lower_bound: int
    label: str = "MODEL-RULE"
    citation: str = ("trivial Galois action on the automorphism group: pairwise non-conjugate "
                     "involutions give pairwise non-isomorphic real forms (external theorem, not re-proved)")

    def __str__(self):
        return f">= {self.lower_bound} real forms [{self.label}]"


def real_form_classes(partition: Partition | int, galois_action_trivial: bool) -> RealFormBound:
    if not galois_action_trivial:
        raise UnsupportedError("UNSUPPORTED: the counting rule needs a trivial Galois action")
    n = partition if isinstance(partition, int) else partition.count
    return RealFormBound(n)


# ---------------------------------------------------------------------------
# word oracle
# ---------------------------------------------------------------------------

@dataclass
class WordOracle:
    """Breadth-first enumeration of group words, composed as actual Mobius maps.

    Independent of the congruence formulas: conjugation is checked by
    composing g, the reflection and g^-1 and comparing matrices.
    """

    translation_generators: Sequence
    reflection_offset: Fraction | None = None
    depth: int = 8
    _elements: dict = field(default=None, init=False, repr=False)

    def elements(self) -> dict[MobiusMap, int]:
        if self._elements is not None:
            return self._elements
        letters = []
        for t in self.translation_generators:
            if Fraction(t) != 0:
                letters += [MobiusMap.translation(t), MobiusMap.translation(-Fraction(t))]
        if self.reflection_offset is not None:
            letters.append(MobiusMap.reflection(self.reflection_offset))
        seen = {MobiusMap.identity(): 0}
        frontier = deque([MobiusMap.identity()])
        while frontier:
            w = frontier.popleft()
            n = seen[w]
            if n == self.depth:
                continue
            for x in letters:
                v = compose(w, x)
                if v not in seen:
                    seen[v] = n + 1
                    frontier.append(v)
        self._elements = seen
        return seen

    def find_conjugator(self, c, d) -> MobiusMap | None:
        rc, rd = MobiusMap.reflection(c), MobiusMap.reflection(d)
        best = None
        for g, n in self.elements().items():
            if compose(compose(g, rc), invert(g)) == rd and (best is None or n < best[1]):
                best = (g, n)
        return None if best is None else best[0]
