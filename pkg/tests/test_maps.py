import random

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from degspec.errors import CapabilityError, DimensionError, IngestionError, NonDominantError
from degspec.exact import QMatrix
from degspec.maps import (MatrixAction, MonomialMap, PolyMap, compose_polymap, load_matrix_action,
                          map_from_dict, map_to_dict, monomial_action_p1k, monomial_degree_pk,
                          monomial_iterate_action, polymap_degree, polymap_iterates)
from degspec.models import make_model


def sympy_pk_degree(A):
    """Independent route: clear denominators of the affine monomial map symbolically."""
    k = len(A)
    X = sympy.symbols(f"X0:{k + 1}")
    comps = [sympy.Integer(1)] + [sympy.Mul(*[(X[j + 1] / X[0]) ** A[i][j] for j in range(k)])
                                  for i in range(k)]
    den = sympy.lcm([sympy.fraction(sympy.together(c))[1] for c in comps])
    nums = [sympy.cancel(c * den) for c in comps]
    g = sympy.gcd_list(nums)
    return sympy.Poly(sympy.cancel(nums[0] / g), *X).total_degree()


def random_det_nonzero(rng, n, lo=-3, hi=3):
    while True:
        rows = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]
        if round(np.linalg.det(np.array(rows, dtype=float))) != 0:
            return rows


def test_monomial_action_examples():
    assert monomial_action_p1k([[2, 1], [1, 1]], 1) == QMatrix([[2, 1], [1, 1]])
    assert monomial_action_p1k([[1, -1], [1, 1]], 1) == QMatrix([[1, 1], [1, 1]])
    assert monomial_action_p1k([[2, 1], [1, 1]], 2) == QMatrix([[1]])
    # column convention: f^* h_i = sum_j |A_ij| h_j lands in column i
    assert monomial_action_p1k([[2, 0], [3, 1]], 1) == QMatrix([[2, 3], [0, 1]])


def test_monomial_action_errors():
    with pytest.raises(NonDominantError):
        monomial_action_p1k([[1, 2], [2, 4]], 1)
    with pytest.raises(CapabilityError):
        monomial_action_p1k([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 2)


def test_iterate_action_examples():
    assert monomial_iterate_action([[1, -1], [1, 1]], 2, 1) == QMatrix([[0, 2], [2, 0]])
    assert monomial_iterate_action([[2, 1], [1, 1]], 2, 1) == QMatrix([[5, 3], [3, 2]])
    assert monomial_iterate_action([[3, 1], [-1, 2]], 1, 1) == monomial_action_p1k([[3, 1], [-1, 2]], 1)


def test_iterate_actions_compose_at_exponent_level():
    rng = random.Random(1)
    for _ in range(20):
        A = random_det_nonzero(rng, 2)
        for m, n in [(1, 2), (2, 3), (3, 3)]:
            lhs = monomial_iterate_action(A, m + n, 1)
            rhs = monomial_action_p1k(QMatrix(A) ** m @ QMatrix(A) ** n, 1)
            assert lhs == rhs


def test_nonnegative_monomial_maps_are_stable():
    rng = random.Random(2)
    for _ in range(10):
        n = rng.choice([2, 3])
        A = random_det_nonzero(rng, n, 0, 3)
        base = monomial_action_p1k(A, 1)
        for t in range(1, 21):
            assert monomial_iterate_action(A, t, 1) == base ** t


def test_degree_pk_examples():
    assert monomial_degree_pk([[-1, 0], [0, -1]]) == 2
    assert monomial_degree_pk([[1, 0], [0, 1]]) == 1
    assert monomial_degree_pk([[2, 0], [0, 2]]) == 2
    with pytest.raises(NonDominantError):
        monomial_degree_pk([[1, 1], [1, 1]])


def test_degree_pk_matches_symbolic_route():
    rng = random.Random(3)
    for _ in range(25):
        A = random_det_nonzero(rng, rng.choice([2, 3]))
        assert monomial_degree_pk(A) == sympy_pk_degree(A)


def test_degree_pk_submultiplicative():
    rng = random.Random(4)
    for _ in range(20):
        A = QMatrix(random_det_nonzero(rng, rng.choice([2, 3])))
        d = {n: monomial_degree_pk(A ** n) for n in range(1, 9)}
        for m in range(1, 8):
            for n in range(1, 9 - m):
                assert d[m + n] <= d[m] * d[n]


def test_cremona_composition():
    s = PolyMap.cremona()
    assert s.degree == 2 and polymap_degree(s) == 2
    ss = s @ s
    assert ss == PolyMap.identity(2) and ss.degree == 1
    assert [f.degree for f in polymap_iterates(s, 8)] == [2, 1] * 4


def test_identity_composition():
    s = PolyMap.cremona()
    assert PolyMap.identity(2) @ s == s
    assert s @ PolyMap.identity(2) == s


def test_cremona_with_permutation_keeps_degree():
    perm = PolyMap.linear([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    assert (PolyMap.cremona() @ perm).degree == 2


def test_conjugate_needs_full_gcd():
    g = PolyMap.linear([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    h = g @ PolyMap.cremona() @ g.linear_inverse()
    assert h.degree == 2
    assert (h @ h).degree == 1


def test_linear_inverse():
    g = PolyMap.linear([[2, 1, 0], [0, 1, 3], [1, 0, 1]])
    assert g @ g.linear_inverse() == PolyMap.identity(2)


def test_polymap_rejects_zero_component():
    with pytest.raises(NonDominantError):
        PolyMap([{(1, 0): 1}, {}])
    with pytest.raises(DimensionError):
        PolyMap([{(1, 0, 0): 1}, {(0, 1, 0): 1}])


def random_quadratic(rng):
    comps = []
    for _ in range(3):
        comp = {}
        for e in [(2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 0), (1, 0, 1), (0, 1, 1)]:
            c = rng.randint(-1, 1)
            if c:
                comp[e] = c
        comps.append(comp or {(1, 1, 0): 1})
    return PolyMap(comps)


def test_composition_is_associative():
    rng = random.Random(5)
    for _ in range(10):
        f = random_quadratic(rng)
        g = PolyMap.linear(random_det_nonzero(rng, 3, -2, 2))
        h = random_quadratic(rng) if rng.random() < 0.5 else PolyMap.cremona()
        try:
            left = compose_polymap(compose_polymap(f, g), h)
            right = compose_polymap(f, compose_polymap(g, h))
        except NonDominantError:
            continue
        assert left == right


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_degree_of_square_at_most_square_of_degree(seed):
    f = random_quadratic(random.Random(seed))
    try:
        ff = f @ f
    except NonDominantError:
        return
    assert ff.degree <= f.degree ** 2


def test_matrix_action_loading():
    m = make_model("P1xP1xK(2)")
    act = load_matrix_action(m, {"M": {"1": [[2, 1], [1, 1]], "2": [[1]]}})
    assert act.action(1) == QMatrix([[2, 1], [1, 1]])
    with pytest.raises(CapabilityError):
        act.action(0)
    with pytest.raises(DimensionError):
        load_matrix_action(make_model("P(2)"), {"M": {"1": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}})
    with pytest.raises(IngestionError):
        load_matrix_action(m, "{not json")
    ident = MatrixAction(m, {p: QMatrix.identity(r) for p, r in enumerate(m.ranks)}, True,
                         {p: True for p in range(3)})
    assert ident.asserted_1_stable


@pytest.mark.parametrize("f", [
    MonomialMap([[2, 1], [1, 1]]),
    MonomialMap([[-1, 0], [0, -1]], "pk"),
    PolyMap.cremona(),
])
def test_map_json_round_trip(f):
    assert map_from_dict(map_to_dict(f)) == f


def test_matrix_action_json_round_trip():
    m = make_model("BlP3line")
    act = MatrixAction(m, {1: QMatrix([[1, 0], [0, 1]])}, True, {1: True})
    back = map_from_dict(map_to_dict(act))
    assert back.action(1) == act.action(1) and back.asserted_1_stable


def test_map_from_dict_errors():
    with pytest.raises(IngestionError):
        map_from_dict({"type": "spiral"})
    with pytest.raises(IngestionError):
        map_from_dict({"type": "monomial"})
    with pytest.raises(NonDominantError):
        map_from_dict({"type": "monomial", "A": [[1, 1], [1, 1]]})
