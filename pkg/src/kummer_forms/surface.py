"""
Surface models: a named lattice basis, a canonical class and a catalog of curves.

The models built here are

* the quadric P^1 x P^1 (``make_quadric``),
* the Kummer configuration of 24 smooth rational curves on Km(E x F)
  (``build_kummer_config``), kept as a configuration rather than as the full
  Neron-Severi lattice,
* T, the blow-up of the quadric at the 16 grid points (``build_T``),
* X, the blow-up of T at a generic point of C11_T (``build_X``).

Every transformation returns a new model.  Curves whose class is not known
are OPAQUE (``cls is None``) and carry declared numbers instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Sequence

from .lattice import (
    INF, LAMBDA, Coordinate, DivisorClass, GramLattice, LatticeError, P1Point, Symbol,
    adjunction_genus, _genus, coord, determinant, inverse, pair, same_point,
)

# coordinates of the 2-torsion images on C = E1 and on F1
A_COORDS: tuple[Coordinate, ...] = (INF, P1Point.finite(0), P1Point.finite(1), P1Point.finite(2))
B_COORDS: tuple[Coordinate, ...] = (INF, P1Point.finite(0), P1Point.finite(1), LAMBDA)

LAMBDA_GENERIC = "lambda_generic: lambda real and E, F not isogenous (lambda not in {0, 1, 2, inf})"
Q1_GENERIC = "Q1: Aut(S,{Q,theta(Q)}) = Aut(S,C11,{Q,theta(Q)}) = Aut(S,C11,{P,P1,Q,theta(Q)})"
Q2_GENERIC = "Q2: Q_T lies on no curve D_ni (i >= 2) orthogonal to pi(f1^-n(Sigma0))"


class InsufficientData(LookupError):
    """An operation needs the class of an OPAQUE curve or an undeclared incidence."""


class PointError(LookupError):
    pass


@dataclass(frozen=True)
class CurveRecord:
    name: str
    cls: DivisorClass | None
    self_int: int
    genus: int
    declared_incidences: Mapping[str, int] = field(default_factory=dict)
    defined_over_R: bool = True
    # ruling of the base quadric: ("a", v) is {v} x P^1, ("b", v) is P^1 x {v}
    locus: tuple[str, Coordinate] | None = None
    # name of another curve -> coordinate on this curve of the meeting point
    marks: Mapping[str, Coordinate] = field(default_factory=dict)

    @property
    def is_opaque(self) -> bool:
        return self.cls is None


@dataclass(frozen=True)
class PointSpec:
    """A point given on the base quadric, or by a coordinate on a named curve."""

    a: Coordinate | None = None
    b: Coordinate | None = None
    curve: str | None = None
    at: Coordinate | None = None
    label: str = ""

    @classmethod
    def base(cls, a, b, label: str = "") -> PointSpec:
        a, b = coord(a), coord(b)
        return cls(a=a, b=b, label=label or f"({a},{b})")

    @classmethod
    def on(cls, curve: str, at, label: str = "") -> PointSpec:
        at = coord(at)
        return cls(curve=curve, at=at, label=label or f"{curve}@{at}")

    @property
    def on_base(self) -> bool:
        return self.curve is None


@dataclass(frozen=True)
class Step:
    kind: str
    detail: str


@dataclass(frozen=True)
class SurfaceModel:
    name: str
    lattice: GramLattice
    canonical: DivisorClass
    curves: tuple[CurveRecord, ...]
    omega_rank: int = 0
    history: tuple[Step, ...] = ()
    params: Mapping[str, str] = field(default_factory=dict)
    genericity_assumptions: tuple[str, ...] = ()

    def __post_init__(self):
        names = [c.name for c in self.curves]
        if len(set(names)) != len(names):
            raise LatticeError(f"duplicate curve names in {self.name}")

    def curve(self, name: str) -> CurveRecord:
        for c in self.curves:
            if c.name == name:
                return c
        raise KeyError(f"no curve {name!r} on {self.name}")

    def has_curve(self, name: str) -> bool:
        return any(c.name == name for c in self.curves)

    @property
    def curve_names(self) -> list[str]:
        return [c.name for c in self.curves]

    def cls(self, name: str) -> DivisorClass:
        rec = self.curve(name)
        if rec.is_opaque:
            raise InsufficientData(f"insufficient declared data: {name} has no class on {self.name}")
        return rec.cls

    @property
    def blow_up_count(self) -> int:
        return sum(1 for s in self.history if s.kind == "blow_up")

    def intersection(self, x: str, y: str) -> int:
        """Intersection number of two catalog curves (classes or declared data)."""
        cx, cy = self.curve(x), self.curve(y)
        if x == y:
            return cx.self_int
        if cx.cls is not None and cy.cls is not None:
            return pair(cx.cls, cy.cls)
        if y in cx.declared_incidences:
            return cx.declared_incidences[y]
        if x in cy.declared_incidences:
            return cy.declared_incidences[x]
        raise InsufficientData(f"insufficient declared data: {x}.{y} unknown on {self.name}")

    def with_curves(self, curves: Sequence[CurveRecord]) -> SurfaceModel:
        return replace(self, curves=tuple(curves))

    # -- points ------------------------------------------------------------
    def blown_up_centres(self) -> list[str]:
        return [s.detail for s in self.history if s.kind == "blow_up"]

    def curves_through(self, p: PointSpec) -> list[str]:
        """Catalog curves passing through ``p``, in catalog order."""
        if p.on_base:
            key = f"({p.a},{p.b})"
            if any(c.startswith(key) for c in self.blown_up_centres()):
                raise PointError(f"{key} has already been blown up on {self.name}")
            out = []
            for c in self.curves:
                if c.locus is None:
                    continue
                which, v = c.locus
                if same_point(v, p.a if which == "a" else p.b):
                    out.append(c.name)
            return out

        if not self.has_curve(p.curve):
            raise PointError(f"point spec names missing curve {p.curve!r}")
        host = self.curve(p.curve)
        if host.genus != 0:
            raise PointError(f"{p.curve} is not a rational curve; no P^1 coordinate")
        hits = {host.name}
        for other, at in host.marks.items():
            if same_point(at, p.at):
                hits.add(other)
        if host.locus is not None:
            which, v = host.locus
            base = (v, p.at) if which == "a" else (p.at, v)
            key = f"({base[0]},{base[1]})"
            if not any(c.startswith(key) for c in self.blown_up_centres()):
                for c in self.curves:
                    if c.locus is not None and c.locus[0] != which:
                        w = base[0] if c.locus[0] == "a" else base[1]
                        if same_point(c.locus[1], w):
                            hits.add(c.name)
        return [c.name for c in self.curves if c.name in hits]

    # -- serialisation -----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "name": self.name,
            "basis": list(self.lattice.basis),
            "gram": [list(row) for row in self.lattice.gram],
            "canonical": list(self.canonical.coords),
            "omega_rank": self.omega_rank,
            "curves": [_curve_json(c) for c in self.curves],
            "history": [{"kind": s.kind, "detail": s.detail} for s in self.history],
            "params": dict(self.params),
            "assumptions": list(self.genericity_assumptions),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False)


def _curve_json(c: CurveRecord) -> dict:
    return {
        "name": c.name,
        "class": None if c.cls is None else list(c.cls.coords),
        "self_int": c.self_int,
        "genus": c.genus,
        "declared_incidences": dict(c.declared_incidences),
        "defined_over_R": c.defined_over_R,
        "marks": {k: str(v) for k, v in c.marks.items()},
    }


def check_catalog(s: SurfaceModel) -> None:
    """Verify stored self-intersections and genera against the lattice."""
    for c in s.curves:
        if c.cls is not None:
            if pair(c.cls, c.cls) != c.self_int:
                raise LatticeError(f"{c.name}: stored C^2 {c.self_int} != {pair(c.cls, c.cls)}")
            if adjunction_genus(c.cls, s.canonical) != c.genus:
                raise LatticeError(f"{c.name}: stored genus {c.genus} disagrees with adjunction")
        for other, m in c.declared_incidences.items():
            o = s.curve(other)
            if c.name in o.declared_incidences and o.declared_incidences[c.name] != m:
                raise LatticeError(f"declared incidence {c.name}.{other} is not symmetric")


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def make_quadric() -> SurfaceModel:
    lat = GramLattice.from_rows("P1xP1", ("H1", "H2"), [[0, 1], [1, 0]])
    return SurfaceModel(
        name="P1xP1",
        lattice=lat,
        canonical=lat.vector((-2, -2)),
        curves=(),
        history=(Step("base", "P1xP1"),),
    )


def add_curve(s: SurfaceModel, name: str, cls: DivisorClass, *, locus=None,
              marks=None, defined_over_R=True) -> SurfaceModel:
    rec = CurveRecord(name, cls, pair(cls, cls), adjunction_genus(cls, s.canonical),
                      defined_over_R=defined_over_R, locus=locus, marks=dict(marks or {}))
    return s.with_curves(s.curves + (rec,))


def add_ruling(s: SurfaceModel, name: str, which: str, value) -> SurfaceModel:
    """Add the ruling {value} x P^1 (``which='a'``, class H1) or P^1 x {value}."""
    if s.history[0].detail != "P1xP1":
        raise LatticeError("rulings only exist on models built from P1xP1")
    cls = s.lattice.basis_class("H1" if which == "a" else "H2")
    return add_curve(s, name, cls, locus=(which, coord(value)))


def _embed(c: DivisorClass, lat: GramLattice) -> DivisorClass:
    pad = lat.rank - len(c.coords)
    return DivisorClass(tuple(c.coords) + (0,) * pad, lat)


def blow_up(s: SurfaceModel, p: PointSpec, exceptional: str | None = None,
            name: str | None = None) -> SurfaceModel:
    """Blow up ``s`` at ``p``: proper transforms of curves through ``p`` drop by E."""
    through = s.curves_through(p)
    n = s.lattice.rank
    exc = exceptional or f"Ex{s.blow_up_count + 1}"
    if exc in s.lattice.basis or s.has_curve(exc):
        raise LatticeError(f"name {exc!r} already used on {s.name}")
    gram = [list(row) + [0] for row in s.lattice.gram] + [[0] * n + [-1]]
    new_name = name or s.name
    lat = GramLattice.from_rows(f"{new_name}#{n + 1}", s.lattice.basis + (exc,), gram)
    e = lat.basis_class(exc)

    e_marks: dict[str, Coordinate] = {}
    if p.on_base:
        # tangent direction du:dv; vertical rulings at 0, horizontal at infinity
        for c in through:
            which = s.curve(c).locus[0]
            e_marks[c] = P1Point.finite(0) if which == "a" else INF
    else:
        for c in through:
            e_marks[c] = Symbol(f"{exc}/{c}")

    new_curves = []
    for c in s.curves:
        cls = None if c.cls is None else _embed(c.cls, lat)
        marks = dict(c.marks)
        incid = dict(c.declared_incidences)
        si = c.self_int
        if c.name in through:
            si -= 1
            if cls is not None:
                cls = cls - e
            else:
                incid[exc] = 1
            # curves that met at p are separated
            for other in through:
                if other != c.name:
                    marks.pop(other, None)
                    if other in incid:
                        incid[other] -= 1
            marks[exc] = _position_on(s, c, p)
        elif cls is None:
            incid[exc] = 0
        new_curves.append(replace(c, cls=cls, self_int=si, marks=marks, declared_incidences=incid))
    new_curves.append(CurveRecord(exc, e, -1, 0, marks=e_marks))

    out = replace(
        s,
        name=new_name,
        lattice=lat,
        canonical=_embed(s.canonical, lat) + e,
        curves=tuple(new_curves),
        history=s.history + (Step("blow_up", f"{p.label}->{exc}"),),
    )
    return out


def _position_on(s: SurfaceModel, c: CurveRecord, p: PointSpec) -> Coordinate:
    if p.on_base:
        which = c.locus[0]
        return p.b if which == "a" else p.a
    if c.name == p.curve:
        return p.at
    host = s.curve(p.curve)
    if c.name in host.marks and p.curve in c.marks:
        return c.marks[p.curve]
    if c.locus is not None:
        which = c.locus[0]
        hl = host.locus
        base = (hl[1], p.at) if hl[0] == "a" else (p.at, hl[1])
        return base[1] if which == "a" else base[0]
    return Symbol(f"{c.name}@{p.label}")


def change_basis(s: SurfaceModel, new_basis: Sequence[tuple[str, DivisorClass]],
                 lattice_id: str | None = None) -> tuple[SurfaceModel, list[list[int]]]:
    """Re-express ``s`` in a new Z-basis; returns the model and the base-change matrix.

    The matrix has the old coordinates of the new basis vectors as rows and
    must have determinant +-1.
    """
    rows = [list(c.coords) for _, c in new_basis]
    if len(rows) != s.lattice.rank:
        raise LatticeError("new basis has the wrong size")
    det = determinant(rows)
    if abs(det) != 1:
        raise LatticeError(f"base change has determinant {det}, not unimodular")
    # unimodular, so the inverse is integral
    inv = [[int(x) for x in row] for row in inverse(rows)]
    old = s.lattice.gram
    gram = [[sum(rows[i][k] * old[k][l] * rows[j][l] for k in range(len(old)) for l in range(len(old)))
             for j in range(len(rows))] for i in range(len(rows))]
    lat = GramLattice.from_rows(lattice_id or f"{s.lattice.lattice_id}'",
                                [n for n, _ in new_basis], gram)

    def convert(c: DivisorClass) -> DivisorClass:
        return lat.vector(sum(c.coords[k] * inv[k][j] for k in range(len(rows))) for j in range(len(rows)))

    curves = [replace(c, cls=None if c.cls is None else convert(c.cls)) for c in s.curves]
    out = replace(s, lattice=lat, canonical=convert(s.canonical), curves=tuple(curves),
                  history=s.history + (Step("basis", ",".join(lat.basis)),))
    return out, rows


def rename_curves(s: SurfaceModel, mapping: Mapping[str, str]) -> SurfaceModel:
    def r(n):
        return mapping.get(n, n)

    curves = [replace(c, name=r(c.name),
                      marks={r(k): v for k, v in c.marks.items()},
                      declared_incidences={r(k): v for k, v in c.declared_incidences.items()})
              for c in s.curves]
    return replace(s, curves=tuple(curves))


def _kummer_names():
    es = [f"E{j}" for j in range(1, 5)]
    fs = [f"F{i}" for i in range(1, 5)]
    cs = [f"C{i}{j}" for i in range(1, 5) for j in range(1, 5)]
    return es, fs, cs


def build_kummer_config() -> SurfaceModel:
    """The 24 curves E_j, F_i, C_ij on S = Km(E x F).

    C_ij meets F_i and E_j once each; nothing else meets.  On E_j the curve
    C_ij sits at x = a_i, on F_i at x' = b_j; on C_ij the E_j-point is at
    infinity and the F_i-point at 0.
    """
    es, fs, cs = _kummer_names()
    basis = es + fs + cs
    idx = {n: k for k, n in enumerate(basis)}
    n = len(basis)
    gram = [[0] * n for _ in range(n)]
    for k in range(n):
        gram[k][k] = -2
    for i in range(1, 5):
        for j in range(1, 5):
            c = idx[f"C{i}{j}"]
            for other in (f"F{i}", f"E{j}"):
                o = idx[other]
                gram[c][o] = gram[o][c] = 1
    lat = GramLattice.from_rows("S", basis, gram)
    curves = []
    for j in range(1, 5):
        marks = {f"C{i}{j}": A_COORDS[i - 1] for i in range(1, 5)}
        curves.append(CurveRecord(f"E{j}", lat.basis_class(f"E{j}"), -2, 0, marks=marks))
    for i in range(1, 5):
        marks = {f"C{i}{j}": B_COORDS[j - 1] for j in range(1, 5)}
        curves.append(CurveRecord(f"F{i}", lat.basis_class(f"F{i}"), -2, 0, marks=marks))
    for i in range(1, 5):
        for j in range(1, 5):
            marks = {f"E{j}": INF, f"F{i}": P1Point.finite(0)}
            curves.append(CurveRecord(f"C{i}{j}", lat.basis_class(f"C{i}{j}"), -2, 0, marks=marks))
    curves.append(CurveRecord(
        "Sigma0", None, 6, 4, declared_incidences={"C11": 0, "C31": 0, "C34": 0}))
    assert _genus(6, 0) == 4
    return SurfaceModel(
        name="S",
        lattice=lat,
        canonical=lat.zero(),
        curves=tuple(curves),
        omega_rank=1,
        history=(Step("base", "Km(ExF) configuration"),),
        params={"lambda": "symbolic", "E": "y^2 = x(x-1)(x-2)", "F": "y'^2 = x'(x'-1)(x'-lambda)"},
        genericity_assumptions=(LAMBDA_GENERIC,),
    )


class CoverCase(Enum):
    IN_BRANCH = "IN_BRANCH"
    INVARIANT_2TO1 = "INVARIANT_2TO1"
    SWAPPED_PAIR = "SWAPPED_PAIR"


def double_cover_pushforward(s: SurfaceModel, branch: Sequence[str], curve: str,
                             swapped: Mapping[str, str] | None = None) -> tuple[int, CoverCase]:
    """Self-intersection of the image of ``curve`` in S / <theta>.

    ``branch`` lists the (pairwise disjoint) fixed curves of the involution.
    Any curve not in ``branch`` and not listed in ``swapped`` is taken to be
    invariant, mapping 2:1 onto its image.
    """
    for x in branch:
        for y in branch:
            if x < y and s.intersection(x, y) != 0:
                raise LatticeError(f"branch curves {x} and {y} meet")
    r = s.curve(curve)
    if curve in branch:
        return 2 * r.self_int, CoverCase.IN_BRANCH
    if swapped and curve in swapped:
        return r.self_int + s.intersection(curve, swapped[curve]), CoverCase.SWAPPED_PAIR
    if r.self_int % 2:
        raise LatticeError(f"{curve} has odd square {r.self_int}; inconsistent 2:1 cover data")
    return r.self_int // 2, CoverCase.INVARIANT_2TO1


KUMMER_BRANCH = tuple(f"E{j}" for j in range(1, 5)) + tuple(f"F{i}" for i in range(1, 5))


def build_T() -> SurfaceModel:
    """Blow-up of P^1 x P^1 = C x F1 at the 16 points (a_i, b_j).

    The exceptional curve over (a_i, b_j) is C_ij,T; the ruling {a_i} x P^1 is
    F_i,T and P^1 x {b_j} is E_j,T, the images of the branch curves.
    """
    s = make_quadric()
    for i in range(1, 5):
        s = add_ruling(s, f"F{i}_T", "a", A_COORDS[i - 1])
    for j in range(1, 5):
        s = add_ruling(s, f"E{j}_T", "b", B_COORDS[j - 1])
    for i in range(1, 5):
        for j in range(1, 5):
            p = PointSpec.base(A_COORDS[i - 1], B_COORDS[j - 1])
            s = blow_up(s, p, exceptional=f"C{i}{j}_T", name="T")
    lat = GramLattice(  # stable id for later use
        "T", s.lattice.basis, s.lattice.gram)
    s = _relabel_lattice(s, lat)
    return replace(
        s,
        name="T",
        params={"lambda": "symbolic", "identification": "P1xP1 = C x F1"},
        genericity_assumptions=(LAMBDA_GENERIC,),
    )


def _relabel_lattice(s: SurfaceModel, lat: GramLattice) -> SurfaceModel:
    def move(c):
        return None if c is None else DivisorClass(c.coords, lat)

    return replace(s, lattice=lat, canonical=move(s.canonical),
                   curves=tuple(replace(c, cls=move(c.cls)) for c in s.curves))


def branch_images_T() -> tuple[str, ...]:
    return tuple(f"{n}_T" for n in KUMMER_BRANCH)


def build_X(q: PointSpec | None = None, T: SurfaceModel | None = None) -> SurfaceModel:
    """Blow up T at a generic point Q_T of C11_T and pass to the curve basis.

    The returned basis is H1, H2, the sixteen C_ij,X and E_Q.
    """
    if q is None:
        q = PointSpec.on("C11_T", Symbol("Q_T"), label="Q_T")
    if q.curve != "C11_T":
        raise PointError("the centre of X -> T must be a point of C11_T")
    T = T or build_T()
    host = T.curve("C11_T")
    for other, at in host.marks.items():
        if same_point(at, q.at):
            raise PointError(f"Q_T meets {other} on C11_T; a generic point is required")
    raw = blow_up(T, q, exceptional="EQ", name="X")
    raw = rename_curves(raw, {c.name: c.name[:-2] + "_X" for c in raw.curves if c.name.endswith("_T")})
    new_basis = [("H1", raw.lattice.basis_class("H1")), ("H2", raw.lattice.basis_class("H2"))]
    new_basis += [(f"C{i}{j}_X", raw.cls(f"C{i}{j}_X")) for i in range(1, 5) for j in range(1, 5)]
    new_basis.append(("EQ", raw.cls("EQ")))
    x, _ = change_basis(raw, new_basis, lattice_id="X")
    return replace(x, name="X", genericity_assumptions=(LAMBDA_GENERIC, Q1_GENERIC, Q2_GENERIC),
                   params={**T.params, "Q_T": str(q.at)})


def raw_X(q: PointSpec | None = None) -> SurfaceModel:
    """X in the blow-up basis H1, H2, e_ij, E_Q (no change of basis)."""
    q = q or PointSpec.on("C11_T", Symbol("Q_T"), label="Q_T")
    return blow_up(build_T(), q, exceptional="EQ", name="X")
