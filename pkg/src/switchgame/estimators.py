"""Estimator-style wrappers around the solvers.

``fit(A, S)`` takes the payoff and switching-cost matrices in place of the
usual ``(X, y)``; ``predict`` maps switching-cost weights to values.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .core import SwitchGame
from .staticsolve import static_minimax, trace_static_curve
from .stationary import acoe_solve, stationary_value_oracle, trace_value_curve


def _game(A, S) -> SwitchGame:
    A = check_array(A, ensure_min_samples=1, ensure_min_features=1)
    S = check_array(S, ensure_min_samples=1, ensure_min_features=1)
    return SwitchGame(A, S)


def _weights(c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if np.any(c < 0):
        raise ValueError("switching-cost weights must be nonnegative")
    return c


class StationarySolver(BaseEstimator):
    """Stationary value at a single weight ``c``."""

    def __init__(self, c=0.0, check_oracle=False):
        self.c = c
        self.check_oracle = check_oracle

    def fit(self, A, S):
        game = _game(A, S)
        sol = acoe_solve(game, float(self.c))
        self.game_ = game
        self.value_ = sol.gamma
        self.p2_strategy_ = sol.p2_strategy
        self.p1_strategy_ = sol.p1_strategy
        self.continuation_ = sol.continuation
        self.residual_ = sol.residual
        self.oracle_gap_ = abs(stationary_value_oracle(game, float(self.c)) - sol.gamma) if self.check_oracle else None
        return self

    def predict(self, c=None):
        """Value at the fitted weight, or re-solved at each weight in ``c``."""
        check_is_fitted(self, "value_")
        if c is None:
            return self.value_
        return np.array([acoe_solve(self.game_, float(x)).gamma for x in np.ravel(_weights(c))])


class StaticSolver(BaseEstimator):
    """Static minimax at a single weight ``c``."""

    def __init__(self, c=0.0):
        self.c = c

    def fit(self, A, S):
        game = _game(A, S)
        res = static_minimax(game, float(self.c))
        self.game_ = game
        self.value_ = res.value
        self.y_star_ = res.y_star
        self.best_rows_ = res.best_rows
        return self

    def predict(self, c=None):
        check_is_fitted(self, "value_")
        if c is None:
            return self.value_
        return np.array([static_minimax(self.game_, float(x), check=False).value for x in np.ravel(_weights(c))])


class ValueCurve(BaseEstimator):
    """Traced value curve on ``[0, c_max]``; ``kind`` is ``"stationary"`` or ``"static"``."""

    def __init__(self, c_max=1.0, kind="stationary", samples=64):
        self.c_max = c_max
        self.kind = kind
        self.samples = samples

    def fit(self, A, S):
        if self.kind not in ("stationary", "static"):
            raise ValueError(f"kind must be 'stationary' or 'static', got {self.kind!r}")
        game = _game(A, S)
        if self.kind == "stationary":
            self.curve_ = trace_value_curve(game, float(self.c_max))
        else:
            self.curve_ = trace_static_curve(game, float(self.c_max), samples=self.samples)
        self.breakpoints_ = np.asarray(getattr(self.curve_, "interior_breakpoints", ()), dtype=float)
        return self

    def predict(self, c):
        check_is_fitted(self, "curve_")
        c = _weights(c)
        return np.asarray(self.curve_(c), dtype=float)
