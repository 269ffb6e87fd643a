import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import linprog as scipy_linprog

from switchgame import games, lp
from switchgame.core import ResourceLimitError
from switchgame.matrixgame import (
    matrix_game_value,
    optimal_strategy_vertices,
    pure_minimax,
    solve_matrix_game,
)


def scipy_value(A):
    m, n = A.shape
    # min t s.t. A y <= t, sum y = 1, y >= 0
    c = np.r_[np.zeros(n), 1.0]
    A_ub = np.c_[A, -np.ones(m)]
    A_eq = np.r_[np.ones(n), 0.0][None, :]
    res = scipy_linprog(c, A_ub=A_ub, b_ub=np.zeros(m), A_eq=A_eq, b_eq=[1.0], bounds=[(0, None)] * n + [(None, None)])
    return res.fun


# -- LP ----------------------------------------------------------------------------

def test_lp_small_known():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6
    res = lp.linprog(np.array([-1.0, -1.0]), A_ub=np.array([[1.0, 2], [3, 1]]), b_ub=np.array([4.0, 6]))
    np.testing.assert_allclose(res.x, [1.6, 1.2])
    assert res.fun == pytest.approx(-2.8)


def test_lp_equality_and_negative_rhs():
    res = lp.linprog(np.array([1.0, 1.0]), A_ub=np.array([[-1.0, 0]]), b_ub=np.array([-1.0]), A_eq=np.array([[1.0, -1.0]]), b_eq=np.array([0.5]))
    np.testing.assert_allclose(res.x, [1.0, 0.5])


def test_lp_infeasible_and_unbounded():
    with pytest.raises(lp.Infeasible):
        lp.linprog(np.array([1.0]), A_ub=np.array([[1.0]]), b_ub=np.array([-1.0]))
    with pytest.raises(lp.Unbounded):
        lp.linprog(np.array([-1.0, 0.0]), A_ub=np.array([[0.0, 1.0]]), b_ub=np.array([1.0]))


@given(seed=st.integers(0, 2**32 - 1), m=st.integers(1, 6), n=st.integers(1, 6))
def test_lp_matches_scipy(seed, m, n):
    rng = np.random.default_rng(seed)
    A = rng.integers(-3, 4, size=(m, n)).astype(float)
    b = rng.integers(0, 5, size=m).astype(float)
    c = rng.integers(-3, 4, size=n).astype(float)
    ref = scipy_linprog(c, A_ub=A, b_ub=b, bounds=[(0, None)] * n, method="highs")
    try:
        res = lp.linprog(c, A_ub=A, b_ub=b)
    except lp.Unbounded:
        assert ref.status in (2, 3)  # highs may report an unbounded problem as infeasible-or-unbounded
        return
    assert ref.status == 0
    assert res.fun == pytest.approx(ref.fun, abs=1e-8)
    assert np.all(A @ res.x <= b + 1e-9) and np.all(res.x >= -1e-12)


# -- matrix games -------------------------------------------------------------------

def test_evasion_value():
    sol = solve_matrix_game(games.evasion().A)
    assert sol.value == pytest.approx(6 / 11)
    np.testing.assert_allclose(sol.y_opt, [6 / 11, 3 / 11, 2 / 11], atol=1e-12)
    assert len(sol.y_polytope_vertices) == 1
    np.testing.assert_allclose(sol.y_polytope_vertices[0], [6 / 11, 3 / 11, 2 / 11], atol=1e-12)
    assert not sol.has_pure_optimum


def test_rps_value():
    A = np.array([[0, 1, -1], [-1, 0, 1], [1, -1, 0.0]])
    sol = solve_matrix_game(A)
    assert sol.value == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(sol.y_opt, [1 / 3] * 3, atol=1e-12)
    np.testing.assert_allclose(sol.x_opt, [1 / 3] * 3, atol=1e-12)
    assert pure_minimax(A) == (1.0, (0, 1, 2))


def test_one_by_one():
    sol = solve_matrix_game(np.array([[5.0]]))
    assert sol.value == 5 and sol.x_opt.tolist() == [1.0] and sol.y_opt.tolist() == [1.0]
    assert sol.has_pure_optimum


def test_cyclic_optimal_polytope():
    A = np.array([[1, 0, 1, 0], [0, 1, 0, 1.0]])
    verts = optimal_strategy_vertices(A)
    expect = {(0.5, 0.5, 0, 0), (0, 0.5, 0.5, 0), (0.5, 0, 0, 0.5), (0, 0, 0.5, 0.5)}
    assert {tuple(np.round(v, 12)) for v in verts} == expect
    for v in verts:
        assert v[0] + v[2] == pytest.approx(0.5)


def test_identity_vertices():
    verts = optimal_strategy_vertices(np.eye(2))
    assert len(verts) == 1
    np.testing.assert_allclose(verts[0], [0.5, 0.5])


def test_vertex_cap():
    with pytest.raises(ResourceLimitError, match="cap"):
        optimal_strategy_vertices(np.zeros((1, 8)), cap=3)


def test_pure_minimax_examples():
    assert pure_minimax(games.evasion().A) == (1.0, (0,))
    assert pure_minimax(np.full((2, 3), 4.0)) == (4.0, (0, 1, 2))


int_matrix = arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(1, 4)), elements=st.integers(-5, 5).map(float))


@given(int_matrix)
def test_value_matches_scipy_and_duality(A):
    v, x, y, dual = matrix_game_value(A)
    assert v == pytest.approx(scipy_value(A), abs=1e-9)
    assert dual == pytest.approx(v, abs=1e-9)
    assert (x @ A).min() >= v - 1e-7
    assert (A @ y).max() <= v + 1e-7
    assert A.min(axis=1).max() - 1e-9 <= v <= A.max(axis=0).min() + 1e-9


@given(arrays(np.float64, (3, 3), elements=st.integers(-4, 4).map(float)))
def test_vertices_are_optimal(A):
    sol = solve_matrix_game(A)
    for vert in sol.y_polytope_vertices:
        assert vert.min() >= 0 and vert.sum() == pytest.approx(1.0)
        assert (A @ vert).max() == pytest.approx(sol.value, abs=1e-7)
    rounded = {tuple(np.round(v, 8)) for v in sol.y_polytope_vertices}
    assert len(rounded) == len(sol.y_polytope_vertices)
