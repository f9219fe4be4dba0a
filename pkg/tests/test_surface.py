import json

import pytest
import sympy

from kummer_forms.lattice import LatticeError, Symbol, pair
from kummer_forms.surface import (
    CoverCase, InsufficientData, PointError, PointSpec, add_ruling, blow_up, branch_images_T,
    build_kummer_config, build_T, build_X, change_basis, check_catalog, double_cover_pushforward,
    KUMMER_BRANCH, make_quadric, raw_X,
)


@pytest.fixture(scope="module")
def S():
    return build_kummer_config()


@pytest.fixture(scope="module")
def T():
    return build_T()


@pytest.fixture(scope="module")
def X():
    return build_X()


def test_kummer_gram_rank_matches_sympy(S):
    assert sympy.Matrix(S.lattice.gram).rank() == 18
    check_catalog(S)


def test_kummer_incidences(S):
    names = [n for n in S.curve_names if not S.curve(n).is_opaque]
    assert len(names) == 24
    for i in range(1, 5):
        for j in range(1, 5):
            c = f"C{i}{j}"
            assert {n for n in names if n != c and S.intersection(c, n)} == {f"E{j}", f"F{i}"}
    for i in range(1, 5):
        for j in range(1, 5):
            assert S.intersection(f"E{i}", f"F{j}") == 0


def test_sigma0_is_opaque(S):
    with pytest.raises(InsufficientData, match="Sigma0"):
        S.cls("Sigma0")
    assert S.intersection("Sigma0", "C31") == 0
    with pytest.raises(InsufficientData):
        S.intersection("Sigma0", "E2")


def test_blow_up_lowers_curves_through_centre():
    q = add_ruling(add_ruling(make_quadric(), "A", "a", 0), "B", "b", 0)
    b = blow_up(q, PointSpec.base(0, 0), exceptional="E")
    assert b.curve("A").self_int == -1 and b.curve("B").self_int == -1
    assert b.curve("E").self_int == -1
    assert b.intersection("A", "B") == 0
    assert b.intersection("A", "E") == 1
    assert pair(b.canonical, b.canonical) == 7
    check_catalog(b)
    with pytest.raises(LatticeError):
        blow_up(b, PointSpec.on("A", 5), exceptional="E")


def test_blow_up_off_curves_leaves_them():
    q = add_ruling(make_quadric(), "A", "a", 0)
    b = blow_up(q, PointSpec.base(1, 1))
    assert b.curve("A").self_int == 0
    assert b.blow_up_count == 1


def test_T_invariants(T):
    assert T.lattice.rank == 18
    assert pair(T.canonical, T.canonical) == -8
    assert all(T.curve(n).self_int == -4 for n in branch_images_T())
    assert all(T.curve(f"C{i}{j}_T").self_int == -1 for i in range(1, 5) for j in range(1, 5))
    total = T.lattice.zero()
    for n in branch_images_T():
        total = total + T.cls(n)
    assert total == -2 * T.canonical
    check_catalog(T)


def test_T_marks_on_exceptional_curves(T):
    c = T.curve("C23_T")
    assert str(c.marks["F2_T"]) == "0" and str(c.marks["E3_T"]) == "inf"


def test_X_lattice(X):
    assert X.lattice.rank == 19
    assert abs(sympy.Matrix(X.lattice.gram).det()) == 1
    assert X.intersection("C11_X", "C11_X") == -2
    assert X.intersection("C11_X", "EQ") == 1
    assert X.intersection("C12_X", "EQ") == 0
    assert pair(X.canonical, X.canonical) == -9
    assert X.lattice.basis[:2] == ("H1", "H2") and X.lattice.basis[-1] == "EQ"
    assert len(X.genericity_assumptions) == 3
    check_catalog(X)


def test_X_base_change_matches_raw(X):
    raw = raw_X()
    assert sympy.Matrix(raw.lattice.gram).det() == sympy.Matrix(X.lattice.gram).det()


def test_X_rejects_marked_point(T):
    with pytest.raises(PointError):
        build_X(PointSpec.on("C11_T", "inf"), T)
    with pytest.raises(PointError):
        build_X(PointSpec.on("C12_T", Symbol("Q")), T)


def test_change_basis_requires_unimodular():
    q = make_quadric()
    h1, h2 = q.lattice.basis_class("H1"), q.lattice.basis_class("H2")
    with pytest.raises(LatticeError, match="determinant"):
        change_basis(q, [("a", 2 * h1), ("b", h2)])
    out, rows = change_basis(q, [("a", h1 + h2), ("b", h2)])
    assert out.lattice.gram == ((2, 1), (1, 0))


def test_pushforward_cases(S):
    assert double_cover_pushforward(S, KUMMER_BRANCH, "E1") == (-4, CoverCase.IN_BRANCH)
    assert double_cover_pushforward(S, KUMMER_BRANCH, "C12") == (-1, CoverCase.INVARIANT_2TO1)
    assert double_cover_pushforward(S, KUMMER_BRANCH, "Sigma0") == (3, CoverCase.INVARIANT_2TO1)
    assert double_cover_pushforward(S, KUMMER_BRANCH, "C12", swapped={"C12": "C13"}) == \
        (-2, CoverCase.SWAPPED_PAIR)
    with pytest.raises(LatticeError, match="meet"):
        double_cover_pushforward(S, ["E1", "C11"], "C12")


def test_pushforward_odd_square_rejected():
    q = blow_up(add_ruling(make_quadric(), "A", "a", 0), PointSpec.base(0, 0))
    with pytest.raises(LatticeError, match="odd"):
        double_cover_pushforward(q, [], "A")


def test_json_is_deterministic(T):
    assert build_T().dumps() == T.dumps()
    data = json.loads(T.dumps())
    assert data["basis"][0] == "H1" and len(data["curves"]) == len(T.curves)
