import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from switchgame import games
from switchgame.core import (
    AffineMap,
    DegenerateGameError,
    PiecewiseLinearCurve,
    PreconditionError,
    StationaryStrategy,
    StructuralError,
    SwitchGame,
    as_mixed_action,
    dump_game,
    normalize,
    parse_game,
    snap_rational,
    validate,
)
from switchgame.stationary import acoe_solve


def test_evasion_is_valid_not_canonical():
    g = games.evasion()
    assert validate(g) == []
    assert not g.is_canonical
    assert g.is_uniform and g.is_symmetric


def test_validate_names_bad_entries():
    S = np.ones((3, 3)) - np.eye(3)
    S[0, 0] = 0.5
    v = validate(SwitchGame(np.eye(3), S))
    assert len(v) == 1 and "S[1,1]" in v[0]
    S = np.ones((3, 3)) - np.eye(3)
    S[0, 1] = -1
    v = validate(SwitchGame(np.eye(3), S))
    assert len(v) == 1 and "S[1,2]" in v[0]


def test_dimension_mismatch_is_structural():
    with pytest.raises(StructuralError):
        SwitchGame(np.eye(3), np.zeros((2, 2)))
    with pytest.raises(StructuralError):
        SwitchGame(np.eye(2), np.zeros((2, 3)))


def test_normalize_evasion():
    ng, amap = normalize(games.evasion())
    np.testing.assert_allclose(ng.A, games.evasion().A / 3)
    assert amap.a_scale == 3 and amap.a_shift == 0 and amap.s_scale == 1
    assert ng.is_canonical


def test_normalize_idempotent():
    ng, _ = normalize(games.evasion())
    again, amap = normalize(ng)
    assert amap.is_identity
    assert again is ng


def test_normalize_scaled_costs_map_back():
    g = SwitchGame(games.evasion().A, 2 * (np.ones((3, 3)) - np.eye(3)))
    ng, amap = normalize(g)
    np.testing.assert_allclose(ng.S, np.ones((3, 3)) - np.eye(3))
    assert amap.s_scale == 2
    for c in (0.1, 0.3, 0.5):
        direct = acoe_solve(g, c).gamma
        via = amap.value_to_original(acoe_solve(ng, amap.c_to_normalized(c)).gamma)
        assert via == pytest.approx(direct, abs=1e-7)


def test_normalize_errors():
    with pytest.raises(DegenerateGameError):
        normalize(SwitchGame(np.ones((2, 2)), np.ones((2, 2)) - np.eye(2)))
    with pytest.raises(DegenerateGameError):
        normalize(SwitchGame(np.eye(2), np.zeros((2, 2))))
    bad = np.ones((2, 2))
    with pytest.raises(PreconditionError):
        normalize(SwitchGame(np.eye(2), bad))


small = st.integers(2, 4)


@given(m=small, n=small, seed=st.integers(0, 2**32 - 1))
def test_normalized_games_validate_and_map_back(m, n, seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(-5, 6, size=(m, n)).astype(float)
    if np.ptp(A) == 0:
        A[0, 0] += 1
    S = rng.integers(0, 4, size=(n, n)).astype(float)
    np.fill_diagonal(S, 0)
    if not S.any():
        S[0, 1] = 1
    g = SwitchGame(A, S)
    ng, amap = normalize(g)
    assert validate(ng) == []
    assert ng.is_canonical
    c = float(rng.uniform(0, 2))
    direct = acoe_solve(g, c).gamma
    via = amap.value_to_original(acoe_solve(ng, amap.c_to_normalized(c)).gamma)
    assert via == pytest.approx(direct, abs=1e-7 * max(1.0, abs(direct)))


def test_affine_map_roundtrip_and_compose():
    a = AffineMap(3.0, -1.0, 2.0)
    b = AffineMap(0.5, 0.25, 4.0)
    ab = a.compose(b)
    v = 0.3
    assert ab.value_to_original(v) == pytest.approx(a.value_to_original(b.value_to_original(v)))
    assert a.c_to_original(a.c_to_normalized(1.7)) == pytest.approx(1.7)


def test_mixed_action_clamping():
    y = as_mixed_action([0.5, 0.5 + 1e-13, -1e-13])
    assert y.min() == 0 and y.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        as_mixed_action([0.5, 0.6, -0.1])
    with pytest.raises(ValueError):
        as_mixed_action([0.5, 0.4])


def test_stationary_strategy_shape():
    s = StationaryStrategy.static([0.5, 0.5], 3)
    assert s.n_states == 3 and s.is_static
    assert s.supports() == [(0, 1)] * 3
    with pytest.raises(ValueError):
        StationaryStrategy(np.array([[0.5, 0.6]]))


def test_snap_rational():
    assert str(snap_rational(22 / 31)) == "22/31"
    assert str(snap_rational(121 / 156 + 3e-9)) == "121/156"
    assert snap_rational(np.pi) is None


def test_curve_rejects_bad_breakpoints():
    with pytest.raises(StructuralError):
        PiecewiseLinearCurve((0.0, 0.5, 0.5), (0, 0, 0), (0, 0, 0))
    with pytest.raises(StructuralError):
        PiecewiseLinearCurve((0.1,), (0.0,), (0.0,))


def test_curve_violations():
    good = PiecewiseLinearCurve((0.0, 1.0), (0.0, 0.5), (1.0, 0.5))
    assert good.violations() == []
    assert good(2.0) == pytest.approx(1.5)
    jump = PiecewiseLinearCurve((0.0, 1.0), (0.0, 0.7), (1.0, 0.5))
    assert any("discontinuity" in v for v in jump.violations())
    convex = PiecewiseLinearCurve((0.0, 1.0), (0.0, -1.0), (1.0, 2.0))
    assert any("slope increases" in v for v in convex.violations())


def test_game_file_roundtrip():
    g = games.evasion()
    text = dump_game(g, c=0.3)
    gf = parse_game(text)
    np.testing.assert_array_equal(gf.game.A, g.A)
    np.testing.assert_array_equal(gf.game.S, g.S)
    assert gf.c == 0.3 and gf.game.name == "evasion"


@pytest.mark.parametrize(
    "doc, msg",
    [
        ({"A": [[1]], "S": [[0]], "extra": 1}, "unknown keys"),
        ({"A": [[1]]}, "missing key 'S'"),
        ({"A": [[1, 2], [3]], "S": [[0]]}, "different lengths"),
        ({"A": [[1]], "S": [[0]], "c": -1}, "'c'"),
        ({"A": [[1]], "S": [[0]], "c_range": [2, 1]}, "c_range"),
        ({"A": [["x"]], "S": [[0]]}, "only numbers"),
    ],
)
def test_game_file_errors(doc, msg):
    with pytest.raises(StructuralError, match=msg):
        parse_game(json.dumps(doc))


def test_parse_error_has_line_number():
    with pytest.raises(StructuralError, match=r"game.json:2:\d+"):
        parse_game('{"A": [[1]],\n "S": }', "game.json")


@given(arrays(np.float64, (3, 3), elements=st.floats(0, 5)))
def test_symmetric_part(S):
    np.fill_diagonal(S, 0)
    g = SwitchGame(np.eye(3), S)
    np.testing.assert_allclose(g.S_sym, g.S_sym.T)
    y = np.full(3, 1 / 3)
    assert y @ g.S @ y == pytest.approx(y @ g.S_sym @ y)
