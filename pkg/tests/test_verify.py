import numpy as np
import pytest

from switchgame import games
from switchgame.core import StationaryStrategy
from switchgame.staticsolve import static_minimax
from switchgame.stationary import acoe_solve
from switchgame.verify import evaluate_pair_exact, simulate_play


@pytest.mark.parametrize("name", sorted(games.REGRESSION_GAMES))
def test_exact_pair_matches_solver(name):
    g = games.REGRESSION_GAMES[name]()
    for c in (0.0, 0.4, 1.2):
        sol = acoe_solve(g, c)
        assert evaluate_pair_exact(g, c, sol.p1_strategy, sol.p2_strategy).value == pytest.approx(sol.gamma, abs=1e-7)


def test_exact_evasion():
    g = games.evasion()
    sol = acoe_solve(g, 0.3)
    pv = evaluate_pair_exact(g, 0.3, sol.p1_strategy, sol.p2_strategy)
    assert pv.value == pytest.approx(6 / 11 + 72 / 121 * 0.3, abs=1e-12)
    assert not pv.ambiguous


def test_exact_pure_constant():
    g = games.evasion()
    pv = evaluate_pair_exact(g, 5.0, [0, 0, 1.0], [0, 1.0, 0])
    assert pv.value == g.A[2, 1]


def test_exact_cyclic_any_sigma():
    g = games.cyclic_costs()
    tau = acoe_solve(g, 1.0).p2_strategy
    rng = np.random.default_rng(0)
    for _ in range(10):
        sigma = rng.dirichlet(np.ones(2), size=4)
        assert evaluate_pair_exact(g, 1.0, sigma, tau).value <= 0.5 + 1e-12


def test_exact_multiple_classes_flagged():
    g = games.evasion()
    pv = evaluate_pair_exact(g, 1.0, np.eye(3), np.eye(3))
    assert pv.ambiguous
    assert pv.value == 3.0 and sorted(pv.class_values) == [1.0, 2.0, 3.0]


def test_simulation_evasion():
    g = games.evasion()
    c = 0.3
    sol = acoe_solve(g, c)
    exact = evaluate_pair_exact(g, c, sol.p1_strategy, sol.p2_strategy).value
    res = simulate_play(g, c, sol.p1_strategy, sol.p2_strategy, 10**6, 20240611)
    assert abs(res.empirical_mean - exact) <= 2e-3
    assert abs(res.empirical_mean - exact) <= 3 * res.standard_error
    assert res.liminf_diagnostic <= res.empirical_mean + 1e-12
    assert g.A.min() <= res.empirical_mean <= g.A.max() + c * g.S.max()


def test_simulation_pure_constant_is_exact():
    g = games.evasion()
    for T in (1, 7, 1000):
        res = simulate_play(g, 2.0, [0, 1.0, 0], [0, 1.0, 0], T, 3, initial_state=1)
        assert res.empirical_mean == g.A[1, 1]


def test_first_stage_pays_no_switch():
    g = games.evasion()
    res = simulate_play(g, 10.0, [0, 1.0, 0], [0, 1.0, 0], 1, 3, initial_state=0)
    assert res.empirical_mean == g.A[1, 1]


def test_simulation_curved_static():
    # large payoff entries make the stage payoffs noisy, so only the 3-sigma contract is checked
    g = games.curved_static()
    c = 0.1
    res_s = static_minimax(g, c)
    y = StationaryStrategy.static(res_s.y_star, 3)
    sigma = StationaryStrategy.static([1.0, 0.0], 3)
    exact = evaluate_pair_exact(g, c, sigma, y).value
    assert exact == pytest.approx(1 - (1 - 2 * c) ** 2 / (192 * c), abs=1e-9)
    res = simulate_play(g, c, sigma, y, 10**6, 11)
    assert abs(res.empirical_mean - exact) <= 3 * res.standard_error


def test_reproducible():
    g = games.rock_paper_scissors()
    sol = acoe_solve(g, 0.5)
    a = simulate_play(g, 0.5, sol.p1_strategy, sol.p2_strategy, 5000, 42)
    b = simulate_play(g, 0.5, sol.p1_strategy, sol.p2_strategy, 5000, 42)
    np.testing.assert_array_equal(a.running_means, b.running_means)
    c = simulate_play(g, 0.5, sol.p1_strategy, sol.p2_strategy, 5000, 43)
    assert not np.array_equal(a.running_means, c.running_means)


@pytest.mark.parametrize("name", sorted(games.REGRESSION_GAMES))
def test_simulation_converges(name):
    g = games.REGRESSION_GAMES[name]()
    c = 0.4
    sol = acoe_solve(g, c)
    exact = evaluate_pair_exact(g, c, sol.p1_strategy, sol.p2_strategy).value
    res = simulate_play(g, c, sol.p1_strategy, sol.p2_strategy, 200_000, 5)
    assert abs(res.empirical_mean - exact) <= 4 * res.standard_error + 1e-12


def test_horizon_must_be_positive():
    with pytest.raises(ValueError):
        simulate_play(games.evasion(), 0.1, [1, 0, 0.0], [1, 0, 0.0], 0, 1)
