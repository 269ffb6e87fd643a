"""Exact and simulated long-run payoff of a pair of stationary strategies.

Simulation draws from numpy's Philox4x32-10 counter-based generator keyed
directly with the 64-bit seed, so paths can be regenerated elsewhere; see
the README for the exact sampling recipe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._markov import class_averages
from .core import StationaryStrategy, SwitchGame


def _as_strategy(s, n_states: int, owner: str) -> StationaryStrategy:
    if isinstance(s, StationaryStrategy):
        return s
    arr = np.asarray(s, dtype=float)
    if arr.ndim == 1:
        return StationaryStrategy.static(arr, n_states, owner)
    return StationaryStrategy(arr, owner)


@dataclass(frozen=True)
class PairValue:
    value: float
    class_values: tuple[float, ...]
    classes: tuple[tuple[int, ...], ...]
    ambiguous: bool

    def __float__(self):
        return self.value


def stage_payoffs(game: SwitchGame, c: float, sigma, tau) -> np.ndarray:
    """Expected stage payoff in each state."""
    n = game.n
    sigma = _as_strategy(sigma, n, "player-1")
    tau = _as_strategy(tau, n, "player-2")
    X, Y = np.asarray(sigma.per_state), np.asarray(tau.per_state)
    return np.einsum("si,ij,sj->s", X, game.A, Y) + c * np.einsum("sj,sj->s", game.S, Y)


def evaluate_pair_exact(game: SwitchGame, c: float, sigma, tau) -> PairValue:
    n = game.n
    tau = _as_strategy(tau, n, "player-2")
    stage = stage_payoffs(game, c, sigma, tau)
    per = class_averages(np.asarray(tau.per_state), stage)
    vals = tuple(v for _, _, v in per)
    return PairValue(max(vals), vals, tuple(tuple(cls) for cls, _, _ in per), len(per) > 1)


@dataclass(frozen=True)
class SimulationResult:
    empirical_mean: float
    horizon: int
    seed: int
    running_means: np.ndarray
    liminf_diagnostic: float
    sample_std: float

    @property
    def standard_error(self) -> float:
        return self.sample_std / np.sqrt(self.horizon)

    def to_dict(self) -> dict:
        return {
            "empirical_mean": self.empirical_mean,
            "horizon": self.horizon,
            "seed": self.seed,
            "liminf_diagnostic": self.liminf_diagnostic,
            "sample_std": self.sample_std,
            "standard_error": self.standard_error,
        }


def _cdfs(P: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(P, axis=1)
    cdf[:, -1] = 1.0
    return cdf


def simulate_play(game: SwitchGame, c: float, sigma, tau, horizon: int, seed: int, *, initial_state: int = 0) -> SimulationResult:
    """Sample one play path of ``horizon`` stages.

    Stage ``t`` draws two uniforms: the first picks Player 1's row, the
    second Player 2's column, each by inverse CDF of the mixed action for
    the current state. The first stage pays no switching cost.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    n = game.n
    sigma = _as_strategy(sigma, n, "player-1")
    tau = _as_strategy(tau, n, "player-2")
    rng = np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))
    U = rng.random((horizon, 2))
    cdf1 = _cdfs(np.asarray(sigma.per_state))
    cdf2 = _cdfs(np.asarray(tau.per_state))

    # column choice for every (state, stage), then walk the chain
    choice = (U[None, :, 1:2] >= cdf2[:, None, :]).sum(axis=2)
    choice = np.minimum(choice, n - 1)
    rows_of = choice.tolist()
    cols = np.empty(horizon, dtype=np.int64)
    s = int(initial_state)
    for t in range(horizon):
        s = rows_of[s][t]
        cols[t] = s
    states = np.empty(horizon, dtype=np.int64)
    states[0] = initial_state
    states[1:] = cols[:-1]
    rows = (U[:, 0:1] >= cdf1[states]).sum(axis=1)
    rows = np.minimum(rows, game.m - 1)

    pay = game.A[rows, cols] + c * game.S[states, cols]
    pay[0] = game.A[rows[0], cols[0]]
    running = np.cumsum(pay) / np.arange(1, horizon + 1)
    tail = running[int(0.9 * horizon):] if horizon >= 10 else running
    return SimulationResult(
        empirical_mean=float(running[-1]),
        horizon=int(horizon),
        seed=int(seed),
        running_means=running,
        liminf_diagnostic=float(tail.min()),
        sample_std=float(pay.std(ddof=1)) if horizon > 1 else 0.0,
    )
