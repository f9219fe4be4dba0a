"""
Graph-level reasoning on curve catalogs.

Weighted divisors are plain ``{curve name: multiplicity}`` dicts.  Fiber
recognition works on the lattice only: square zero, connected support,
every component orthogonal to the divisor, and a weighted dual graph of
affine ADE shape whose multiplicities are the primitive null vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from .automorphisms import AutomorphismRecord
from .lattice import DivisorClass, LatticeError, pair
from .surface import InsufficientData, PointSpec, SurfaceModel

WeightedDivisor = Mapping[str, int]


def D1() -> dict[str, int]:
    return {n: 1 for n in ("E1", "C11", "F1", "C12", "E2", "C22", "F2", "C21")}


def D2() -> dict[str, int]:
    return {"E1": 1, "C11": 2, "E2": 1, "C12": 2, "E3": 1, "C13": 2, "F1": 3}


def D2_prime() -> dict[str, int]:
    return {"F3": 1, "C34": 2, "F2": 1, "C24": 2, "F4": 1, "C44": 2, "E4": 3}


@dataclass(frozen=True)
class IncidenceGraph:
    nodes: tuple[tuple[str, int], ...]
    edges: tuple[tuple[str, str, int], ...]

    def neighbours(self, name: str) -> list[str]:
        out = []
        for a, b, _ in self.edges:
            if a == name:
                out.append(b)
            elif b == name:
                out.append(a)
        return out

    def degree(self, name: str) -> int:
        return len(self.neighbours(name))

    def is_connected(self) -> bool:
        names = [n for n, _ in self.nodes]
        if not names:
            return False
        seen = {names[0]}
        stack = [names[0]]
        while stack:
            for nb in self.neighbours(stack.pop()):
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == len(names)


def incidence_graph(s: SurfaceModel, divisor: WeightedDivisor) -> IncidenceGraph:
    names = list(divisor)
    for n in names:
        if not s.has_curve(n):
            raise KeyError(f"unknown curve {n!r} on {s.name}")
    edges = []
    for i, x in enumerate(names):
        for y in names[i + 1:]:
            m = s.intersection(x, y)
            if m:
                edges.append((x, y, m))
    return IncidenceGraph(tuple((n, divisor[n]) for n in names), tuple(edges))


def divisor_class(s: SurfaceModel, divisor: WeightedDivisor) -> DivisorClass:
    out = s.lattice.zero()
    for n, m in divisor.items():
        out = out + m * s.cls(n)
    return out


class Kodaira(Enum):
    I_n = "I_n"
    II = "II"
    III = "III"
    IV = "IV"
    I_n_star = "I_n*"
    II_star = "II*"
    III_star = "III*"
    IV_star = "IV*"
    SMOOTH = "SMOOTH"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class FiberReport:
    self_int_zero: bool
    connected: bool
    components_orthogonal_to_fiber: bool
    kodaira_type: Kodaira
    n: int | None = None

    @property
    def label(self) -> str:
        if self.kodaira_type is Kodaira.I_n:
            return f"I{self.n}"
        if self.kodaira_type is Kodaira.I_n_star:
            return f"I{self.n}*"
        return self.kodaira_type.value


# primitive null vectors of the star-shaped affine diagrams, keyed by sorted arm lengths;
# each arm lists multiplicities from the centre outwards
_STARS = {
    (2, 2, 2): (Kodaira.IV_star, 3, [2, 1]),
    (1, 3, 3): (Kodaira.III_star, 4, [3, 2, 1]),
    (1, 2, 5): (Kodaira.II_star, 6, [5, 4, 3, 2, 1]),
}


def _arms(g: IncidenceGraph, centre: str) -> list[list[str]]:
    arms = []
    for nb in g.neighbours(centre):
        arm, prev, cur = [nb], centre, nb
        while True:
            nxt = [x for x in g.neighbours(cur) if x != prev]
            if len(nxt) != 1:
                break
            prev, cur = cur, nxt[0]
            arm.append(cur)
        arms.append(arm)
    return arms


def _classify(g: IncidenceGraph) -> tuple[Kodaira, int | None]:
    mult = dict(g.nodes)
    names = list(mult)
    k = len(names)
    if any(m != 1 for _, _, m in g.edges):
        return Kodaira.UNKNOWN, None  # I_2 / III are not told apart by the lattice
    if math.gcd(*mult.values()) != 1:
        return Kodaira.UNKNOWN, None
    degrees = {n: g.degree(n) for n in names}
    n_edges = len(g.edges)
    if n_edges == k and all(d == 2 for d in degrees.values()):
        if k >= 4 and all(m == 1 for m in mult.values()):
            return Kodaira.I_n, k
        return Kodaira.UNKNOWN, None  # a triangle is I_3 or IV
    if n_edges != k - 1:
        return Kodaira.UNKNOWN, None
    branch = [n for n in names if degrees[n] >= 3]
    if len(branch) == 1 and degrees[branch[0]] == 4:
        c = branch[0]
        if k == 5 and mult[c] == 2 and all(mult[n] == 1 for n in g.neighbours(c)):
            return Kodaira.I_n_star, 0
        return Kodaira.UNKNOWN, None
    if len(branch) == 1 and degrees[branch[0]] == 3:
        c = branch[0]
        arms = sorted(_arms(g, c), key=len)
        key = tuple(len(a) for a in arms)
        if key not in _STARS:
            return Kodaira.UNKNOWN, None
        kind, cm, pattern = _STARS[key]
        if mult[c] != cm:
            return Kodaira.UNKNOWN, None
        for arm in arms:
            expected = pattern[len(pattern) - len(arm):]
            if [mult[x] for x in arm] != expected:
                return Kodaira.UNKNOWN, None
        return kind, None
    if len(branch) == 2 and all(degrees[b] == 3 for b in branch):
        # D~_{k-1}: a chain of multiplicity-2 nodes with two leaves at each end
        leaves = [n for n in names if degrees[n] == 1]
        chain = [n for n in names if degrees[n] >= 2]
        if len(leaves) == 4 and all(mult[n] == 1 for n in leaves) and all(mult[n] == 2 for n in chain):
            for b in branch:
                if sum(1 for x in g.neighbours(b) if degrees[x] == 1) != 2:
                    return Kodaira.UNKNOWN, None
            return Kodaira.I_n_star, len(chain) - 1
    return Kodaira.UNKNOWN, None


def check_fiber(s: SurfaceModel, divisor: WeightedDivisor) -> FiberReport:
    for n in divisor:
        if s.curve(n).is_opaque:
            raise InsufficientData(f"fiber component {n} is OPAQUE")
    d = divisor_class(s, divisor)
    g = incidence_graph(s, divisor)
    square_zero = pair(d, d) == 0
    connected = g.is_connected()
    orthogonal = all(pair(s.cls(n), d) == 0 for n in divisor)
    if not (square_zero and connected and orthogonal):
        return FiberReport(square_zero, connected, orthogonal, Kodaira.UNKNOWN)
    if len(divisor) == 1:
        (n, m), = divisor.items()
        c = s.curve(n)
        kind = Kodaira.SMOOTH if (m == 1 and c.genus == 1) else Kodaira.UNKNOWN
        return FiberReport(True, True, True, kind)
    if any(s.curve(n).self_int != -2 or s.curve(n).genus != 0 for n in divisor):
        return FiberReport(True, True, True, Kodaira.UNKNOWN)
    kind, k = _classify(g)
    return FiberReport(True, True, True, kind, k)


def check_section(s: SurfaceModel, curve: str, fiber: WeightedDivisor) -> bool:
    return pair(s.cls(curve), divisor_class(s, fiber)) == 1


# ---------------------------------------------------------------------------
# rigid linear systems
# ---------------------------------------------------------------------------

class NotRigidError(ValueError):
    def __init__(self, message: str, pair: tuple[str, str]):
        super().__init__(message)
        self.pair = pair


@dataclass(frozen=True)
class RigidityCertificate:
    divisor: dict[str, int]
    steps: tuple[dict, ...]
    conclusion: str

    def to_json(self) -> dict:
        return {"divisor": dict(self.divisor), "steps": list(self.steps), "conclusion": self.conclusion}


def _square(s: SurfaceModel, divisor: Mapping[str, int]) -> int:
    names = list(divisor)
    return sum(divisor[x] * divisor[y] * s.intersection(x, y) for x in names for y in names)


def certify_rigid_linear_system(s: SurfaceModel, divisor: WeightedDivisor) -> RigidityCertificate:
    """Certify dim|D| = 0 for D supported on disjoint curves of negative square.

    A negative square forces a fixed component, necessarily a support curve;
    removing it leaves a divisor of the same kind.  The trace removes one
    copy at a time in catalog order until nothing is left.
    """
    support = [n for n in s.curve_names if divisor.get(n, 0)]
    unknown = set(divisor) - set(s.curve_names)
    if unknown:
        raise KeyError(f"unknown curves {sorted(unknown)} on {s.name}")
    if any(m < 0 for m in divisor.values()):
        raise ValueError("divisor is not effective")
    for n in support:
        if s.curve(n).self_int >= 0:
            raise NotRigidError(f"{n} has self-intersection {s.curve(n).self_int} >= 0", (n, n))
    for i, x in enumerate(support):
        for y in support[i + 1:]:
            if s.intersection(x, y) != 0:
                raise NotRigidError(f"{x} and {y} meet", (x, y))

    remaining = {n: divisor[n] for n in support}
    steps = []
    while remaining:
        r = next(iter(remaining))
        remaining[r] -= 1
        if remaining[r] == 0:
            del remaining[r]
        sq = _square(s, remaining)
        if remaining and sq >= 0:
            raise LatticeError("peeling produced a divisor of non-negative square")
        steps.append({"removed": r, "remaining": dict(remaining), "remaining_square": sq})
    return RigidityCertificate(dict(divisor), tuple(steps), "dim|D| = 0")


# ---------------------------------------------------------------------------
# fixed loci
# ---------------------------------------------------------------------------

class FixedComponentError(LookupError):
    def __init__(self, message: str, matches: list[str]):
        super().__init__(message)
        self.matches = matches


def unique_fixed_component_through(s: SurfaceModel, point: PointSpec, fixed_curves: Sequence[str]) -> str:
    through = s.curves_through(point)
    matches = [n for n in through if n in set(fixed_curves)]
    if len(matches) != 1:
        raise FixedComponentError(
            f"{len(matches)} listed curves through {point.label}: {matches}", matches)
    return matches[0]


@dataclass(frozen=True)
class FixedLocusEntry:
    curve: str
    kind: str            # "curve" or "points"
    self_int: int | None = None
    genus: int | None = None
    count: int | None = None


def _pointwise_fixed(rec: AutomorphismRecord) -> list[str]:
    return [c.name for c in rec.declared_fixed_curves
            if rec.restriction(c.name) is not None and rec.restriction(c.name).is_identity()]


def fixed_locus_table(rec: AutomorphismRecord, s: SurfaceModel) -> list[FixedLocusEntry]:
    """Fixed curves (with squares) and isolated fixed points of ``rec``."""
    if rec.is_identity():
        raise ValueError("the identity fixes everything; no finite fixed-locus table")
    if rec.declared_fixed_curves:
        out = [FixedLocusEntry(c.name, "curve", c.self_int, c.genus) for c in rec.declared_fixed_curves]
        if rec.declared_fixed_points:
            out.append(FixedLocusEntry("", "points", count=rec.declared_fixed_points))
        return out
    if len(rec.factors) == 2:
        return _composite_points(rec, s)
    raise LookupError(f"{rec.name} carries no declared fixed-locus data")


def _composite_points(rec: AutomorphismRecord, s: SurfaceModel) -> list[FixedLocusEntry]:
    if rec.omega_sign != 1:
        raise LookupError(f"{rec.name} is not symplectic; isolated-point count is not determined")
    a, b = rec.factors
    # one factor must fix curves pointwise; on those, rec agrees with the other factor
    for fixer, other in ((b, a), (a, b)):
        curves = _pointwise_fixed(fixer)
        if curves and len(curves) == len(fixer.declared_fixed_curves):
            break
    else:
        raise LookupError(f"{rec.name}: no factor has a declared pointwise-fixed locus")
    out = []
    for n in curves:
        img = other.image(n)
        if img is None:
            raise LookupError(f"{rec.name}: action of {other.name} on {n} undeclared")
        if img != n:
            if s.intersection(n, img) != 0:
                raise LookupError(f"{n} meets its image {img}; fixed points not determined")
            continue
        r = other.restriction(n)
        count = None if r is None else r.fixed_point_count()
        if count is None:
            raise LookupError(f"{rec.name}: restriction of {other.name} to {n} has no known fixed points")
        out.append(FixedLocusEntry(n, "points", count=count))
    hosts = [e.curve for e in out]
    for i, x in enumerate(hosts):
        for y in hosts[i + 1:]:
            if s.intersection(x, y) != 0:
                raise LookupError(f"{x} and {y} meet; fixed points may coincide")
    return out


def isolated_point_count(table: Sequence[FixedLocusEntry]) -> int:
    return sum(e.count for e in table if e.kind == "points")


# a symplectic involution of a K3 surface has exactly eight fixed points
NIKULIN_FIXED_POINTS = 8
