from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from abelnet import linalg
from oracles import sympy_divisors, sympy_rank

small_int = st.integers(min_value=-6, max_value=6)


def square(n):
    return st.lists(st.lists(small_int, min_size=n, max_size=n), min_size=n, max_size=n)


def rect():
    return st.integers(1, 4).flatmap(
        lambda r: st.integers(1, 4).flatmap(
            lambda c: st.lists(st.lists(small_int, min_size=c, max_size=c), min_size=r, max_size=r)))


@given(st.integers(1, 4).flatmap(square))
def test_det_matches_sympy(m):
    assert linalg.det(m) == sympy.Matrix(m).det()


@given(rect())
def test_rank_matches_sympy(m):
    assert linalg.rank(m) == sympy_rank(m)


@given(rect())
def test_nullspace_vectors_are_in_kernel(m):
    basis = linalg.nullspace(m)
    assert len(basis) == len(m[0]) - linalg.rank(m)
    for v in basis:
        assert all(x == 0 for x in linalg.mat_vec(m, v))


@given(rect())
def test_smith_form_matches_sympy(m):
    u, s, v = linalg.smith_normal_form(m)
    assert linalg.mat_mul(linalg.mat_mul(u, m), v) == s
    assert abs(linalg.det(u)) == 1 and abs(linalg.det(v)) == 1
    diag, rank = linalg.elementary_divisors(m)
    assert rank == sympy_rank(m)
    assert sorted(d for d in diag if d > 1) == sympy_divisors(m)
    nz = [s[i][i] for i in range(min(len(s), len(s[0]))) if s[i][i]]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@given(st.integers(1, 4).flatmap(square))
def test_inverse_or_singular(m):
    if linalg.det(m) == 0:
        with pytest.raises(ZeroDivisionError):
            linalg.inverse(m)
    else:
        inv = linalg.inverse(m)
        assert linalg.mat_mul(m, inv) == linalg.identity(len(m))


@given(st.integers(1, 4).flatmap(square))
def test_char_poly_matches_sympy(m):
    lam = sympy.Symbol("lam")
    expected = sympy.Poly(sympy.Matrix(m).charpoly(lam).as_expr(), lam).all_coeffs()[::-1]
    assert linalg.char_poly(m) == [Fraction(int(c)) for c in expected]


def test_rational_roots():
    # (t - 1/2)(t + 3)(t^2 + 1)
    t = sympy.Symbol("t")
    poly = sympy.Poly(sympy.expand((2 * t - 1) * (t + 3) * (t**2 + 1)), t)
    coeffs = [int(c) for c in poly.all_coeffs()[::-1]]
    assert sorted(linalg.rational_roots(coeffs)) == [Fraction(-3), Fraction(1, 2)]


def test_primitive_integer_vector():
    assert linalg.primitive_integer_vector([Fraction(-2, 3), Fraction(-4, 3), 0]) == [1, 2, 0]
    assert linalg.primitive_integer_vector([0, Fraction(3, 2), Fraction(-9, 4)]) == [0, 2, -3]


def test_lattice_basis_and_coordinates():
    basis = linalg.lattice_basis([[2, 0], [0, 3], [2, 3]], 2)
    det = abs(linalg.det(basis))
    assert det == 6
    cols = linalg.transpose(basis)
    assert linalg.integer_coordinates(cols, [4, 6]) is not None
    assert linalg.integer_coordinates(cols, [1, 0]) is None
