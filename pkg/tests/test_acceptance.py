"""Acceptance suite: one test per criterion, each at its stated tolerance.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from switchgame import games
from switchgame.bounds import build_ledger, check_s_hat_condition
from switchgame.core import SwitchGame, normalize
from switchgame.generalgamma import quarter_bound, stationary_value_G, static_minimax_G
from switchgame.matrixgame import matrix_game_value
from switchgame.staticsolve import (
    SampledCurve,
    grid_oracle,
    static_minimax,
    trace_static_curve,
)
from switchgame.stationary import (
    acoe_solve,
    stationary_value_oracle,
    trace_value_curve,
)
from switchgame.verify import evaluate_pair_exact

from conftest import random_game


def crit(num, title):
    return pytest.mark.criterion(num, title)


def _evasion_v(c):
    if c <= 22 / 31:
        return 6 / 11 + 72 / 121 * c
    if c <= 121 / 156:
        return (156 * c + 198) / 319
    return 1.0


@crit(1, "evasion stationary curve: breakpoints 22/31, 121/156, pieces, < 5 s")
def test_ac01_evasion_curve():
    g = games.evasion()
    t0 = time.perf_counter()
    curve = trace_value_curve(g, 1.5)
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    assert len(curve.interior_breakpoints) == 2
    assert curve.interior_breakpoints[0] == pytest.approx(22 / 31, abs=1e-6)
    assert curve.interior_breakpoints[1] == pytest.approx(121 / 156, abs=1e-6)
    for c in np.linspace(0, 1.5, 61):
        assert abs(curve(c) - _evasion_v(c)) <= 1e-7
    assert curve.slopes[-1] == 0 or abs(curve.slopes[-1]) <= 1e-12


@crit(2, "evasion continuation payoffs (0, 3c/11, 4c/11)")
def test_ac02_evasion_continuation():
    g = games.evasion()
    for c in (0.1, 0.3, 0.6):
        sol = acoe_solve(g, c)
        np.testing.assert_allclose(sol.continuation, [0.0, 3 * c / 11, 4 * c / 11], atol=1e-7)


@crit(3, "evasion static cutoff 55/72")
def test_ac03_evasion_static_cutoff():
    curve = trace_static_curve(games.evasion(), 1.5)
    assert len(curve.interior_breakpoints) == 1
    assert curve.interior_breakpoints[0] == pytest.approx(55 / 72, abs=1e-6)
    # largest static-vs-stationary gap sits at the cutoff; value derived from the piecewise formulas
    c = 55 / 72
    derived = float(1 - Fraction(156 * 55, 72 * 319) - Fraction(198, 319))
    assert derived == pytest.approx(11 / 1914, abs=1e-15)
    assert curve(c) - _evasion_v(c) == pytest.approx(derived, abs=1e-7)
    cs = np.linspace(0, 1.5, 3001)
    assert np.max(curve(cs) - np.array([_evasion_v(x) for x in cs])) <= derived + 1e-7


@crit(4, "non-piecewise static value 1 - (1-2c)^2/(192c) and its minimizer")
def test_ac04_curved_static():
    g = games.curved_static()
    for c in np.linspace(1 / 98, 1 / 2, 20):
        res = static_minimax(g, c)
        assert res.value == pytest.approx(1 - (1 - 2 * c) ** 2 / (192 * c), abs=1e-6)
        p = (1 - 2 * c) / (192 * c)
        assert res.y_star[0] == pytest.approx(p, abs=1e-6)


@crit(5, "cyclic costs: v = 0.5 and static strictly above")
def test_ac05_cyclic_separation():
    g = games.cyclic_costs()
    for c in (0.1, 1.0, 10.0):
        v = acoe_solve(g, c).gamma
        assert v == pytest.approx(0.5, abs=1e-7)
        assert static_minimax(g, c).value - v > 1e-3


@crit(6, "RPS sweep: breakpoints {1,2}, {9/8,9/5}, coincidence at delta = 1")
def test_ac06_rps_sweep():
    c0 = trace_value_curve(games.rock_paper_scissors(0.0), 3.0)
    np.testing.assert_allclose(c0.interior_breakpoints, [1.0, 2.0], atol=1e-6)
    assert c0(1.0) == pytest.approx(2 / 3, abs=1e-6)

    c3 = trace_value_curve(games.rock_paper_scissors(1 / 3), 3.0)
    np.testing.assert_allclose(c3.interior_breakpoints, [9 / 8, 9 / 5], atol=1e-6)
    assert c3(9 / 8) == pytest.approx(3 / 4, abs=1e-6)

    g1 = games.rock_paper_scissors(1.0)
    st = trace_value_curve(g1, 3.0)
    cs = np.linspace(0, 3, 31)
    sv = [static_minimax(g1, c, check=False).value for c in cs]
    np.testing.assert_allclose(st(cs), sv, atol=1e-6)


@crit(7, "identity game: breakpoints 1/6, 3/13 and coincidence after 3/13")
def test_ac07_identity_crossing():
    g = games.identity_crossing()
    curve = trace_value_curve(g, 1.5)
    bps = curve.interior_breakpoints
    assert bps[0] == pytest.approx(1 / 6, abs=1e-6)
    assert bps[1] == pytest.approx(3 / 13, abs=1e-6)
    c_pure = curve.interior_breakpoints[-1]
    assert curve(c_pure) == pytest.approx(1.0, abs=1e-7)
    # static strictly worse just after 1/6, equal from 3/13 up to the pure regime
    mid = 0.5 * (1 / 6 + 3 / 13)
    assert static_minimax(g, mid).value - curve(mid) > 1e-4
    for c in np.linspace(3 / 13, c_pure + 0.3, 15):
        assert static_minimax(g, c).value == pytest.approx(curve(c), abs=1e-6)


@crit(8, "2x2 games: no gap between static and stationary play")
def test_ac08_two_by_two():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(200):
        A = rng.uniform(-1, 1, size=(2, 2))
        S = np.array([[0.0, rng.uniform(0, 2)], [rng.uniform(0, 2), 0.0]])
        g = SwitchGame(A, S)
        for c in rng.uniform(0, 3, size=5):
            gap = static_minimax(g, c, check=False).value - acoe_solve(g, c).gamma
            worst = max(worst, gap)
    assert worst <= 1e-6


def _bound_sweep_games():
    rng = np.random.default_rng(9)
    kinds = ["positive", "symmetric", "uniform", "free"]
    out = []
    while len(out) < 100:
        n = int(rng.integers(2, 5))
        m = int(rng.integers(2, 5))
        out.append(random_game(rng, m, n, kinds[len(out) % 4]))
    return out


@crit(9, "bound domination: every applicable bound covers the gap; quarter ratio >= 1/4")
def test_ac09_bound_domination():
    checked = 0
    for game in _bound_sweep_games():
        norm, _ = normalize(game)
        ledger = build_ledger(norm)
        cb, _ = ledger.c_bar_used
        top = cb if cb is not None and np.isfinite(cb) and cb > 0 else 1.0
        for c in np.linspace(0, 1.25 * top, 8):
            v = acoe_solve(norm, c).gamma
            vt = static_minimax(norm, c, check=False).value
            gap = vt - v
            bounds = [ledger.uniform_loss(c, v), ledger.uniform_S(c, v), ledger.loss(c), ledger.mixture(c)]
            sym = ledger.symmetric_ratio(c, v, vt)
            if sym is not None:
                bounds.append(sym[0])
                assert sym[1], f"symmetric ratio below 1/2 at c={c}"
            for b in bounds:
                if b is not None:
                    assert b >= gap - 1e-7
                    checked += 1
    assert checked > 800

    rng = np.random.default_rng(99)
    tensors = [games.quarter_tight_tensor(), games.two_state_tensor()]
    for _ in range(20):
        n, m = int(rng.integers(2, 4)), int(rng.integers(1, 3))
        r = rng.integers(0, 5, size=(n, m, n)).astype(float)
        if np.ptp(r) == 0:
            continue
        tensors.append((r - r.min()) / np.ptp(r))
    for r in tensors:
        v = stationary_value_G(r).value
        vt = static_minimax_G(r).value
        q = quarter_bound(r, v, vt)
        assert q.ratio_ok
        assert vt - v <= q.delta + 1e-9


@crit(10, "quarter bound tightness: v = 0, static = 3/4, ratio 1/4")
def test_ac10_quarter_tight():
    r = games.quarter_tight_tensor()
    v = stationary_value_G(r).value
    vt = static_minimax_G(r).value
    assert v == pytest.approx(0.0, abs=1e-9)
    assert vt == pytest.approx(0.75, abs=1e-9)
    assert (1 - vt) / (1 - v) == pytest.approx(0.25, abs=1e-9)


@crit(11, "oracle triangulation on all regression games")
def test_ac11_triangulation():
    for name, make in games.REGRESSION_GAMES.items():
        g = make()
        for c in (0.0, 0.3, 0.75, 1.5):
            sol = acoe_solve(g, c)
            aux = stationary_value_oracle(g, c)
            pair = evaluate_pair_exact(g, c, sol.p1_strategy, sol.p2_strategy).value
            assert abs(sol.gamma - aux) <= 1e-6, name
            assert abs(sol.gamma - pair) <= 1e-6, name
            st = static_minimax(g, c, check=False).value
            gr = grid_oracle(g, c, 200)
            assert gr >= st - 1e-9, name
            assert st >= gr - 5e-3, name


@crit(12, "uniform costs: the s > s-hat condition never holds")
def test_ac12_s_hat():
    rng = np.random.default_rng(12)
    for _ in range(100):
        n, m = int(rng.integers(2, 6)), int(rng.integers(2, 6))
        A = rng.uniform(0, 1, size=(m, n))
        A = (A - A.min()) / np.ptp(A)
        g = SwitchGame(A, np.ones((n, n)) - np.eye(n))
        assert check_s_hat_condition(g) is False


@crit(13, "curve shape invariants for stationary and static curves")
def test_ac13_curve_shapes():
    rng = np.random.default_rng(13)
    gs = [make() for make in games.REGRESSION_GAMES.values()]
    gs += [random_game(rng, 3, 3, k) for k in ("positive", "symmetric", "uniform", "free") for _ in range(3)]
    for g in gs:
        st = trace_value_curve(g, 3.0)
        assert st.violations() == []
        sc = trace_static_curve(g, 3.0, samples=24)
        assert sc.violations() == []
        if isinstance(sc, SampledCurve):
            assert np.all(np.diff(sc.values) >= -1e-7)
