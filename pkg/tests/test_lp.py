from fractions import Fraction

from hypothesis import given, settings, strategies as st

from degspec.lp import conic_combination, solve_lp


def test_simple_optimum():
    # min x + 2y  s.t. x + y = 3
    res = solve_lp([1, 2], [[1, 1]], [3])
    assert res.status == "optimal"
    assert res.value == 3 and res.x == (3, 0)


def test_infeasible():
    assert solve_lp([1], [[1]], [-1]).status == "infeasible"


def test_unbounded():
    assert solve_lp([-1, 0], [[1, -1]], [0]).status == "unbounded"


def test_conic_combination():
    gens = [(1, 0), (1, -1)]
    assert conic_combination(gens, (2, -1)) is not None
    assert conic_combination(gens, (1, -2)) is None


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=5), min_size=3, max_size=3))
def test_cone_membership_recovers_combination(coefs):
    gens = [(1, 0, 0), (1, 1, 0), (1, 1, 1)]
    target = tuple(sum(c * g[i] for c, g in zip(coefs, gens)) for i in range(3))
    found = conic_combination(gens, target)
    assert found is not None and all(c >= 0 for c in found)
    assert tuple(sum(c * g[i] for c, g in zip(found, gens)) for i in range(3)) == tuple(map(Fraction, target))
