"""
Verification suites and their reports.

Each suite is a function of the run options returning ``CheckResult`` rows
in construction order.  Reports serialize with fixed key order and carry
no timestamps, so equal inputs give byte-identical JSON.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import __version__
from .automorphisms import (
    C, MobiusMap, check_marks, compose_records, descend_to_T, grid_rigidity_check, iota_n_centre,
    lift_to_X, make_f1, make_f3, make_iota, make_iota_n, make_theta, conjugate_by_f1_power, ns_action,
)
from .configurations import (
    D1, D2, D2_prime, NIKULIN_FIXED_POINTS, NotRigidError, certify_rigid_linear_system, check_fiber,
    check_section, divisor_class, fixed_locus_table, isolated_point_count, unique_fixed_component_through,
)
from .groups import (
    DyadicClosure, FinitelyGenerated, Involution, UnsupportedError, WordOracle, are_conjugate,
    contains, count_conjugacy_classes, dyadic_model, integer_model, is_finitely_generated, normalize,
    real_form_classes,
)
from .lattice import format_fraction, gram_determinant, matrix_rank, pair
from .surface import (
    A_COORDS, B_COORDS, KUMMER_BRANCH, LAMBDA_GENERIC, Q1_GENERIC, Q2_GENERIC, PointSpec, add_ruling,
    branch_images_T, build_kummer_config, build_T, build_X, check_catalog, double_cover_pushforward,
    make_quadric,
)

PASS, FAIL, ASSUMED = "PASS", "FAIL", "ASSUMED"


@dataclass(frozen=True)
class CheckResult:
    id: str
    status: str
    expected: str
    actual: str
    citation: str

    def to_json(self) -> dict:
        return {"id": self.id, "status": self.status, "expected": self.expected,
                "actual": self.actual, "citation": self.citation}


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    results: tuple[CheckResult, ...]
    toolchain: str = f"kummer_forms {__version__} (python {sys.version_info.major}.{sys.version_info.minor})"

    @property
    def counts(self) -> dict[str, int]:
        out = {"pass": 0, "fail": 0, "assumed": 0}
        for r in self.results:
            out[r.status.lower()] += 1
        return out

    @property
    def ok(self) -> bool:
        return self.counts["fail"] == 0

    def to_json(self) -> dict:
        return {"suite": self.suite, "toolchain": self.toolchain, "counts": self.counts,
                "results": [r.to_json() for r in self.results]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False)

    def table(self) -> str:
        width = max((len(r.id) for r in self.results), default=10)
        lines = [f"suite: {self.suite}"]
        for r in self.results:
            line = f"{r.status:<8} {r.id:<{width}}  {r.actual}"
            if r.status == FAIL:
                line += f"  (expected {r.expected})"
            lines.append(line)
        c = self.counts
        lines.append(f"pass {c['pass']}  fail {c['fail']}  assumed {c['assumed']}")
        return "\n".join(lines)


@dataclass(frozen=True)
class Options:
    n_max: int = 20
    oracle_depth: int = 8


def _s(x) -> str:
    if isinstance(x, bool) or x is None:
        return str(x).lower()
    if isinstance(x, (int, Fraction)):
        return format_fraction(x)
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_s(v) for v in x) + "]"
    return str(x)


class _Collector:
    def __init__(self):
        self.rows: list[CheckResult] = []

    def eq(self, id: str, expected, actual, citation: str):
        ok = expected == actual
        self.rows.append(CheckResult(id, PASS if ok else FAIL, _s(expected), _s(actual), citation))

    def run(self, id: str, expected, thunk: Callable, citation: str):
        """Like ``eq`` but an exception inside ``thunk`` becomes a FAIL row."""
        try:
            actual = thunk()
        except Exception as exc:  # noqa: BLE001 - reported, not swallowed
            self.rows.append(CheckResult(id, FAIL, _s(expected), f"{type(exc).__name__}: {exc}", citation))
            return
        self.eq(id, expected, actual, citation)

    def assumed(self, id: str, statement: str, citation: str):
        self.rows.append(CheckResult(id, ASSUMED, statement, "declared genericity hypothesis", citation))


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def _figure1(opts: Options) -> list[CheckResult]:
    k = _Collector()
    S = build_kummer_config()
    cite = "24-curve double Kummer pencil"
    names = [n for n in S.curve_names if not S.curve(n).is_opaque]
    k.eq("figure1/curve_count", 24, len(names), cite)
    k.eq("figure1/self_intersections", [-2] * 24, [pair(S.cls(n), S.cls(n)) for n in names], cite)
    for i in range(1, 5):
        for j in range(1, 5):
            name = f"C{i}{j}"
            meets = sorted(n for n in names if n != name and pair(S.cls(name), S.cls(n)) != 0)
            k.eq(f"figure1/incidence/{name}", sorted([f"E{j}", f"F{i}"]), meets, cite)
    k.eq("figure1/E_F_disjoint", [0] * 16,
         [pair(S.cls(f"E{i}"), S.cls(f"F{j}")) for i in range(1, 5) for j in range(1, 5)], cite)
    k.eq("figure1/gram_rank", 18, matrix_rank(S.lattice.gram), "rank of the 24x24 intersection matrix")
    k.run("figure1/catalog_consistent", True, lambda: check_catalog(S) is None,
          "adjunction and declared incidences agree with the lattice")
    k.eq("figure1/torsion_coordinates", ["inf", "0", "1", "2", "inf", "0", "1", "lambda"],
         [str(c) for c in A_COORDS + B_COORDS], "Legendre forms of E and F")
    k.assumed("lemma2.4/lambda_generic", LAMBDA_GENERIC, "lambda avoids a countable exceptional set")
    return k.rows


def _fibrations(opts: Options) -> list[CheckResult]:
    k = _Collector()
    S = build_kummer_config()
    cite = "elliptic fibrations given by the divisors D1 and D2"
    divs = {"D1": D1(), "D2": D2(), "D2p": D2_prime()}
    for name, d in divs.items():
        cls = divisor_class(S, d)
        k.eq(f"sec2/{name}_square", 0, pair(cls, cls), cite)
    for name, d in divs.items():
        rep = check_fiber(S, d)
        k.eq(f"sec2/{name}_kodaira", {"D1": "I8"}.get(name, "IV*"), rep.label, cite)
    k.eq("sec2/D2_D2p_orthogonal", 0, pair(divisor_class(S, D2()), divisor_class(S, D2_prime())),
         "D2 and D2' are disjoint fibers of one fibration")
    k.eq("sec2/C31_section_D1", True, check_section(S, "C31", D1()), "C31 meets the fiber once")
    k.eq("sec2/C31_section_D2", True, check_section(S, "C31", D2()), "C31 meets the fiber once")
    k.eq("sec2/C41_section_D2", True, check_section(S, "C41", D2()), "C41 meets only E1 among the components")
    k.eq("sec2/C41_section_D1", True, check_section(S, "C41", D1()), "translation section of the I8 fibration")
    return k.rows


def _iota_T_X():
    S, T, X = build_kummer_config(), build_T(), build_X()
    iota_T = descend_to_T(make_iota(), S, T)
    return S, T, X, iota_T, lift_to_X(iota_T, T, X)


def _quotient(opts: Options) -> list[CheckResult]:
    k = _Collector()
    S, T = build_kummer_config(), build_T()
    branch = branch_images_T()
    k.eq("lemma2.1.1/branch_selfints", [-4] * 8, [T.curve(n).self_int for n in branch],
         "images of the branch curves have self-intersection -4")
    k.eq("lemma2.1.1/pushforward_rule", [-4] * 8,
         [double_cover_pushforward(S, KUMMER_BRANCH, n)[0] for n in KUMMER_BRANCH],
         "a branch curve R has image of square 2 R^2")
    k.eq("lemma2.1.1/C_ij_images", [-1] * 16,
         [double_cover_pushforward(S, KUMMER_BRANCH, f"C{i}{j}")[0] for i in range(1, 5) for j in range(1, 5)],
         "invariant curves map 2:1 with image square R^2 / 2")
    total = T.lattice.zero()
    for n in branch:
        total = total + T.cls(n)
    k.eq("lemma2.1.3/branch_is_minus2K", True, total == -2 * T.canonical, "D lies in |-2K_T|")
    k.eq("lemma2.1.3/K_T_square", -8, pair(T.canonical, T.canonical), "K_T^2 after sixteen blow-ups")

    def rigid():
        cert = certify_rigid_linear_system(T, {n: 1 for n in branch})
        return len(cert.steps), cert.conclusion

    k.run("lemma2.1.3/minus2K_rigid", (8, "dim|D| = 0"), rigid, "|-2K_T| = {D} by peeling fixed components")

    def reject():
        Q = add_ruling(make_quadric(), "H1_ruling", "a", 0)
        try:
            certify_rigid_linear_system(Q, {"H1_ruling": 1})
        except NotRigidError as e:
            return list(e.pair)
        return None

    k.run("lemma2.1.3/non_negative_rejected", ["H1_ruling", "H1_ruling"], reject,
          "a component of square >= 0 blocks the certificate")
    k.eq("lemma2.1/T_rank", 18, T.lattice.rank, "P1 x P1 blown up at 16 points")
    return k.rows


def _ns_x(opts: Options) -> list[CheckResult]:
    k = _Collector()
    X = build_X()
    cite = "NS(X) basis H1, H2, C_ij, E_Q"
    k.eq("lemma3.3.1/rank", 19, X.lattice.rank, cite)
    k.eq("lemma3.3.1/abs_det", 1, abs(gram_determinant(X.lattice)), cite)
    k.eq("lemma3.3.1/C11_square", -2, pair(X.cls("C11_X"), X.cls("C11_X")), "C11 passes through Q_T")
    k.eq("lemma3.3.1/K_X_square", -9, pair(X.canonical, X.canonical), "one further blow-up")
    rigid, swap = grid_rigidity_check(A_COORDS, B_COORDS)
    k.eq("lemma3.3.2/grid_rigidity", True, rigid, "a map fixing three points of each factor is trivial")
    k.eq("lemma3.3.2/grid_swap_excluded", True, swap, "coordinate sets {inf,0,1,2} and {inf,0,1,lambda} differ")
    _, _, _, _, iota_X = _iota_T_X()
    act = ns_action(iota_X, X)
    k.eq("lemma3.3.2/iota_X_isometry", True, act.is_isometry(), "iota_X acts on NS(X) by an isometry")
    k.eq("lemma3.3.2/iota_X_fixes_K", True, act.fixes_canonical(), "automorphisms preserve K_X")
    k.assumed("thm3.4/Q1", Q1_GENERIC, "generic choice of Q")
    k.assumed("thm3.4/Q2", Q2_GENERIC, "generic choice of Q")
    return k.rows


def _formulas(opts: Options) -> list[CheckResult]:
    k = _Collector()
    half = opts.n_max // 2
    for n in range(-half, half + 1):
        k.run(f"lemma2.2.3/iota_n_formula/n={n}", str(MobiusMap.reflection(iota_n_centre(n))),
              lambda n=n: str(make_iota_n(n).restriction(C).mobius),
              "iota_n restricted to C is x -> 1/2^(n-1) - x")
    f3 = make_f3()
    k.eq("thm4.1/f3_formula", "x -> x + 1", str(f3.restriction(C).mobius), "f3 restricted to C is x -> x + 1")
    k.eq("thm4.1/f3_symplectic", 1, f3.omega_sign, "f3 is a product of two anti-symplectic involutions")
    for n in range(0, half + 1):
        k.run(f"thm4.1/f3_conjugate/n={n}", str(MobiusMap.translation(Fraction(1, 2 ** n))),
              lambda n=n: str(conjugate_by_f1_power(f3, n).restriction(C).mobius),
              "conjugates of f3 by f1 powers translate by 1/2^n")
    gens = {"theta": make_theta(), "iota": make_iota(), "f1": make_f1(), "iota_5": make_iota_n(5), "f3": f3}
    table_ok = []
    for a, fa in gens.items():
        for b, fb in gens.items():
            table_ok.append(compose_records(fa, fb).omega_sign == fa.omega_sign * fb.omega_sign)
    k.eq("lemma2.2/omega_signs", [-1, -1, 1, -1, 1], [g.omega_sign for g in gens.values()],
         "action on the holomorphic 2-form")
    k.eq("lemma2.2/omega_multiplicative", [True] * 25, table_ok, "the 2-form sign is a character")
    S = build_kummer_config()
    for name in ("theta", "iota", "f1"):
        k.eq(f"lemma2.2/marks_respected/{name}", [], check_marks(gens[name], S),
             "restrictions carry intersection points to intersection points")
    return k.rows


def _fixed_loci(opts: Options) -> list[CheckResult]:
    k = _Collector()
    S = build_kummer_config()
    iota, theta = make_iota(), make_theta()
    tab = fixed_locus_table(iota, S)
    k.eq("lemma2.2.1/iota_fixed_locus", [["C11", -2, 0], ["C31", -2, 0], ["C34", -2, 0], ["Sigma0", 6, 4]],
         [[e.curve, e.self_int, e.genus] for e in tab], "three rational curves and a genus 4 curve")
    k.eq("lemma2.1.2/theta_fixed_locus", list(KUMMER_BRANCH), [e.curve for e in fixed_locus_table(theta, S)],
         "theta fixes the E_i and F_j pointwise")
    branch = list(KUMMER_BRANCH)
    k.run("lemma2.1.2/component_through_P", "E1",
          lambda: unique_fixed_component_through(S, PointSpec.on("C11", "inf", "P"), branch),
          "unique fixed component through P = C cap C11")
    k.run("lemma2.1.2/component_through_P1", "F1",
          lambda: unique_fixed_component_through(S, PointSpec.on("C11", 0, "P1"), branch),
          "unique fixed component through P1 = F1 cap C11")
    comp = compose_records(iota, theta)
    k.run("thm3.4/iota_theta_fixed_points", NIKULIN_FIXED_POINTS,
          lambda: isolated_point_count(fixed_locus_table(comp, S)),
          "two fixed points on each of C, F1, F3, E4")
    k.eq("thm3.4/iota_theta_symplectic", 1, comp.omega_sign, "product of two anti-symplectic involutions")
    S_, T, X, _, _ = _iota_T_X()
    lists = []
    for n in range(0, 4):
        rec_T = descend_to_T(make_iota_n(n), S_, T)
        rec_X = lift_to_X(rec_T, T, X)
        k.eq(f"thm3.4/fixed_locus_selfints_T/n={n}", [-1, -1, -1, 3],
             [c.self_int for c in rec_T.declared_fixed_curves], "images in T of the fixed curves of iota_n")
        lists.append([c.self_int for c in rec_X.declared_fixed_curves] + [rec_X.declared_fixed_points])
    k.eq("thm3.4/fixed_locus_selfints", [[-2, -1, -1, 3, 1]] * 4, lists,
         "fixed curves of iota_{n,X}, n = 0..3, then the isolated point count on E_Q")
    return k.rows


def _groups(opts: Options) -> list[CheckResult]:
    k = _Collector()
    fg, cert = is_finitely_generated(DyadicClosure(1))
    k.eq("sec4/dyadic_not_fg", False, fg, "Z[1/2] is not finitely generated")
    k.eq("sec4/dyadic_witness", [Fraction(1, 2 ** j) for j in range(1, 11)], list(cert.witness),
         "translations x + 1/2^n have unbounded denominators")
    f3 = make_f3()
    offsets = []
    for n in range(0, opts.n_max // 2 + 1):
        aff = conjugate_by_f1_power(f3, n).restriction(C).mobius.as_affine()
        offsets.append(aff.offset)
    k.eq("sec4/f3_translations_dyadic", True, all(contains(DyadicClosure(1), t) for t in offsets),
         "the translation parts lie in Z[1/2]")
    k.eq("sec4/finite_span_cyclic", Fraction(1, 2 ** (len(offsets) - 1)), normalize(FinitelyGenerated(offsets)),
         "any finite subfamily generates a cyclic group")
    k.eq("sec4/normalize_examples", [Fraction(1, 6), Fraction(1), Fraction(1, 6)],
         [normalize(FinitelyGenerated(g)) for g in
          ([Fraction(1, 2), Fraction(1, 3)], [1], [Fraction(2, 3), Fraction(1, 2), Fraction(5, 6)])],
         "finitely generated subgroups of Q are cyclic")
    return k.rows


def _conjugacy(opts: Options) -> list[CheckResult]:
    k = _Collector()
    centers = [iota_n_centre(n) for n in range(opts.n_max + 1)]
    part = count_conjugacy_classes(centers, integer_model())
    k.eq("lemma3.1/classes_integer", f"classes: {opts.n_max + 1}", f"classes: {part.count}",
         "centres 2^(1-n) are pairwise incongruent mod 2Z up to sign")
    k.eq("lemma3.1/classes_dyadic", "classes: 1",
         f"classes: {count_conjugacy_classes(centers, dyadic_model()).count}",
         "without the integrality constraint the family collapses")
    small = centers[:6]
    oracle = WordOracle([1], Fraction(0), opts.oracle_depth)
    agree = []
    for c in small:
        for d in small:
            decided = bool(are_conjugate(Involution(c), Involution(d), integer_model()))
            agree.append(decided == (oracle.find_conjugator(c, d) is not None))
    k.eq(f"lemma3.1/oracle_agreement/depth={opts.oracle_depth}", [True] * len(agree), agree,
         "word search over the integer affine group")
    return k.rows


def _realforms(opts: Options) -> list[CheckResult]:
    k = _Collector()
    gens = [make_theta(), make_iota(), make_f1(), make_f3()]
    real = all(
        all(isinstance(x, MobiusMap) or isinstance(x, tuple) for x in m.letters)
        for g in gens for m in g.restrictions.values()
    ) and all(c.defined_over_R for c in build_X().curves)
    k.eq("lemma3.3.2/galois_action_trivial", True, real,
         "generators and curves are defined over R, so complex conjugation commutes")
    part = count_conjugacy_classes([iota_n_centre(n) for n in range(opts.n_max + 1)], integer_model())
    k.run("sec3/real_forms_lower_bound", f">= {opts.n_max + 1} real forms [MODEL-RULE]",
          lambda: str(real_form_classes(part, real)), "conjugacy classes of involutions give real forms")

    def guard():
        try:
            real_form_classes(part, False)
        except UnsupportedError:
            return "UNSUPPORTED"
        return "accepted"

    k.run("sec3/nontrivial_galois_unsupported", "UNSUPPORTED", guard, "rule applies only to trivial actions")
    return k.rows


SUITES: dict[str, Callable[[Options], list[CheckResult]]] = {
    "figure1": _figure1,
    "fibrations": _fibrations,
    "quotient": _quotient,
    "ns-x": _ns_x,
    "formulas": _formulas,
    "fixed-loci": _fixed_loci,
    "groups": _groups,
    "conjugacy": _conjugacy,
    "realforms": _realforms,
}


def run_suite(name: str, options: Options | None = None) -> SuiteReport:
    opts = options or Options()
    if name == "all":
        rows = [r for fn in SUITES.values() for r in fn(opts)]
    elif name in SUITES:
        rows = SUITES[name](opts)
    else:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(list(SUITES) + ['all'])}")
    return SuiteReport(name, tuple(rows))


def list_checks(options: Options | None = None) -> list[tuple[str, str]]:
    return [(r.id, r.citation) for r in run_suite("all", options).results]
