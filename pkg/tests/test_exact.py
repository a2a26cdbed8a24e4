from fractions import Fraction
import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from degspec.errors import ParameterError
from degspec.exact import (QMatrix, QPolynomial, as_fraction, charpoly, compound_matrix,
                           eigen_spectrum, spectral_radius)

small_ints = st.integers(min_value=-4, max_value=4)


def square_matrices(max_n=4):
    return st.integers(min_value=1, max_value=max_n).flatmap(
        lambda n: st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n))


def test_as_fraction_refuses_floats():
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(5) == 5
    with pytest.raises(TypeError):
        as_fraction(0.5)


def test_matrix_arithmetic():
    a = QMatrix([[1, 2], [3, 4]])
    assert a @ QMatrix.identity(2) == a
    assert a.det() == -2
    assert a @ a.inverse() == QMatrix.identity(2)
    assert a ** -1 == a.inverse()
    assert a.T.tolist() == [[1, 3], [2, 4]]
    assert a.apply([1, 1]) == (3, 7)
    with pytest.raises(ParameterError):
        QMatrix([[1, 2], [2, 4]]).inverse()


def test_charpoly_fibonacci():
    assert charpoly(QMatrix([[2, 1], [1, 1]])).coeffs == (1, -3, 1)


def test_spectrum_fibonacci():
    spec = eigen_spectrum(QMatrix([[2, 1], [1, 1]]))
    assert [e.multiplicity for e in spec] == [1, 1]
    assert spec[0].modulus == pytest.approx((3 + math.sqrt(5)) / 2, abs=1e-9)
    assert spec[1].modulus == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-9)


def test_spectrum_identity_and_rotation():
    spec = eigen_spectrum(QMatrix.identity(3))
    assert len(spec) == 1 and spec[0].multiplicity == 3 and spec[0].modulus == 1
    rot = eigen_spectrum(QMatrix([[1, -1], [1, 1]]))
    assert [e.modulus for e in rot] == pytest.approx([math.sqrt(2)] * 2, abs=1e-9)
    assert not rot[0].is_real


def test_spectrum_plastic_companion():
    spec = eigen_spectrum(QMatrix([[0, 1, 0], [0, 0, 1], [1, 1, 0]]))
    assert spec[0].modulus == pytest.approx(1.324717957244746, abs=1e-9)
    assert spec[1].modulus == pytest.approx(spec[2].modulus)
    assert spec[1].modulus == pytest.approx(0.8688369618327, abs=1e-9)


def test_spectrum_rejects_bad_tol():
    with pytest.raises(ParameterError):
        eigen_spectrum(QMatrix([[1]]), tol=0)


def test_nilpotent_radius_is_zero():
    assert spectral_radius(QMatrix([[0, 1], [0, 0]])) == 0.0


def test_compound_diagonal():
    c = compound_matrix(QMatrix.diagonal([2, 3, 5]), 2)
    assert c == QMatrix.diagonal([6, 10, 15])
    with pytest.raises(ParameterError):
        compound_matrix(QMatrix.identity(2), 3)


def test_squarefree_and_sturm():
    t = QPolynomial([0, 1])
    p = (t - QPolynomial([1])) ** 2 * (t * t + QPolynomial([1]))
    parts = {m: f for f, m in p.squarefree_decomposition()}
    assert parts[2] == t - QPolynomial([1])
    assert parts[1] == t * t + QPolynomial([1])
    assert (t * t - QPolynomial([2])).sturm_real_root_count() == 2
    assert (t * t + QPolynomial([2])).sturm_real_root_count() == 0


@settings(max_examples=60, deadline=None)
@given(square_matrices())
def test_cayley_hamilton(rows):
    m = QMatrix(rows)
    assert charpoly(m).eval_matrix(m).is_zero()


@settings(max_examples=60, deadline=None)
@given(square_matrices())
def test_charpoly_matches_sympy(rows):
    expected = sympy.Matrix(rows).charpoly().all_coeffs()
    assert list(reversed(charpoly(QMatrix(rows)).coeffs)) == [Fraction(int(c)) for c in expected]


def test_multiplicities_sum_to_dimension_over_random_matrices():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(1, 5))
        rows = rng.integers(-3, 4, size=(n, n)).tolist()
        spec = eigen_spectrum(QMatrix(rows))
        assert sum(e.multiplicity for e in spec) == n
        oracle = sorted(np.abs(np.linalg.eigvals(np.array(rows, dtype=float))), reverse=True)
        assert spec[0].modulus == pytest.approx(oracle[0], abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(square_matrices(3))
def test_multiplicities_match_sympy(rows):
    oracle = sorted(sympy.Matrix(rows).eigenvals(multiple=True), key=lambda z: -abs(complex(z)))
    spec = eigen_spectrum(QMatrix(rows))
    moduli = [e.modulus for e in spec for _ in range(e.multiplicity)]
    assert moduli == pytest.approx([abs(complex(z)) for z in oracle], abs=1e-7)


@settings(max_examples=40, deadline=None)
@given(square_matrices(4), st.integers(min_value=1, max_value=4))
def test_compound_radius_is_product_of_top_moduli(rows, p):
    n = len(rows)
    if p > n:
        return
    eig = sorted(np.abs(np.linalg.eigvals(np.array(rows, dtype=float))), reverse=True)
    expected = math.prod(eig[:p])
    assert spectral_radius(compound_matrix(QMatrix(rows), p)) == pytest.approx(expected, rel=1e-6, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(square_matrices(3), square_matrices(3))
def test_compound_is_multiplicative(a, b):
    if len(a) != len(b):
        return
    A, B = QMatrix(a), QMatrix(b)
    for p in range(1, len(a) + 1):
        assert compound_matrix(A @ B, p) == compound_matrix(A, p) @ compound_matrix(B, p)
