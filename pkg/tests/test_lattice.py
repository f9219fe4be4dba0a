from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from kummer_forms.lattice import (
    INF, LAMBDA, GramLattice, LatticeError, P1Point, Symbol, adjunction_genus, coord, determinant,
    format_fraction, gram_determinant, independent_rows, inverse, is_negative_definite, matmul,
    matrix_rank, pair, same_point, solve_in_span,
)

small_ints = st.integers(-6, 6)


def square(n):
    return st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6).flatmap(square))
def test_determinant_matches_sympy(m):
    assert determinant(m) == sympy.Matrix(m).det()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(small_ints, min_size=n, max_size=n),
                                                    min_size=1, max_size=7)))
def test_rank_matches_sympy(rows):
    assert matrix_rank(rows) == sympy.Matrix(rows).rank()


def test_independent_rows_is_greedy():
    assert independent_rows([[1, 0], [2, 0], [0, 1]]) == [0, 2]


def test_solve_in_span():
    basis = [[1, 0, 1], [0, 1, 1]]
    assert solve_in_span(basis, [2, 3, 5]) == [2, 3]
    assert solve_in_span(basis, [0, 0, 1]) is None


def test_inverse_roundtrip():
    m = [[2, 1], [7, 4]]
    assert matmul(m, inverse(m)) == [[1, 0], [0, 1]]
    with pytest.raises(LatticeError):
        inverse([[1, 2], [2, 4]])


def hyperbolic():
    return GramLattice.from_rows("U", ("H1", "H2"), [[0, 1], [1, 0]])


def test_gram_validation():
    with pytest.raises(LatticeError):
        GramLattice.from_rows("bad", ("a", "b"), [[0, 1], [2, 0]])
    with pytest.raises(LatticeError):
        GramLattice.from_rows("bad", ("a", "a"), [[0, 1], [1, 0]])
    with pytest.raises(LatticeError):
        GramLattice.from_rows("bad", ("a",), [[0, 1], [1, 0]])


def test_pairing_and_arithmetic():
    u = hyperbolic()
    h1, h2 = u.basis_class("H1"), u.basis_class("H2")
    d = 2 * h1 + 3 * h2
    assert pair(d, d) == 12
    assert pair(h1, h2) == 1
    assert d - h1 == u.vector((1, 3))
    assert -h1 == u.vector((-1, 0))
    assert repr(d - 5 * h2) == "2*H1 - 2*H2"
    assert u.combination({"H1": 1, "H2": 1}) == h1 + h2


def test_lattice_mismatch_names_both_ids():
    a = hyperbolic().basis_class("H1")
    b = GramLattice.from_rows("V", ("H1", "H2"), [[0, 1], [1, 0]]).basis_class("H1")
    with pytest.raises(LatticeError, match="'U'.*'V'"):
        pair(a, b)


def test_adjunction_on_quadric():
    u = hyperbolic()
    k = u.vector((-2, -2))
    assert adjunction_genus(u.vector((1, 0)), k) == 0
    assert adjunction_genus(u.vector((2, 2)), k) == 1
    assert adjunction_genus(u.vector((3, 4)), k) == 6
    assert gram_determinant(u) == -1


def test_adjunction_rejects_odd_parity():
    u = GramLattice.from_rows("odd", ("a",), [[-1]])
    with pytest.raises(LatticeError, match="odd"):
        adjunction_genus(u.vector((1,)), u.zero())


def test_negative_definite():
    e8ish = GramLattice.from_rows("A2", ("a", "b"), [[-2, 1], [1, -2]])
    a, b = e8ish.basis_class("a"), e8ish.basis_class("b")
    assert is_negative_definite([a, b, a + b])
    u = hyperbolic()
    assert not is_negative_definite([u.basis_class("H1")])
    with pytest.raises(LatticeError):
        is_negative_definite([])


def test_points_and_symbols():
    assert coord("inf") == INF and INF.is_infinity
    assert coord(2) == P1Point.finite(2)
    assert coord("3/4").value == Fraction(3, 4)
    assert coord("lambda") == LAMBDA
    assert P1Point.homogeneous(2, 4) == P1Point.finite(Fraction(1, 2))
    assert not same_point(Symbol("Q_T"), P1Point.finite(0))
    with pytest.raises(LatticeError):
        INF.value
    with pytest.raises(LatticeError):
        P1Point.homogeneous(0, 0)
    assert format_fraction(3) == "3/1" and format_fraction(Fraction(-1, 4)) == "-1/4"
