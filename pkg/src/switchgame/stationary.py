"""Stationary value v(c) of the switching-cost game.

Two independent routes:

* ``acoe_solve``: the average-cost optimality equation. Player 2 controls
  the state, so for a fixed continuation vector ``h`` the game in state ``s``
  is the matrix game ``A + 1 (c S_s + h)^T``. Candidate equalizing mixes for
  Player 2 are the vertices of Player-1 best-response regions of ``A``; a
  policy iteration over those candidates produces ``(gamma, h)`` and each
  state is then re-solved as a matrix game to certify the equation.
* ``stationary_value_oracle``: the one-shot matrix game over pure stationary
  maps, each column reduced to the average over the cycle it settles into.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from ._geometry import best_response_vertices
from ._acoe import policy_iteration
from ._markov import class_averages
from .core import (
    PiecewiseLinearCurve,
    ResourceLimitError,
    SolverFailure,
    StationaryStrategy,
    SwitchGame,
    VALUE_TOL,
)
from .matrixgame import matrix_game_value

AUX_CAP = 10**6
MAX_SEGMENTS = 200


# -- auxiliary matrix game ----------------------------------------------------

def _limit_cycle(tau: tuple[int, ...], start: int = 0) -> tuple[int, ...]:
    seen: dict[int, int] = {}
    path = []
    s = start
    while s not in seen:
        seen[s] = len(path)
        path.append(s)
        s = tau[s]
    return tuple(path[seen[s]:])


@dataclass(frozen=True)
class AuxiliaryMatrixGame:
    """Pure stationary maps of both players; entry ``(k, l)`` pays ``b[k, l] + beta[l] * c``."""

    rows: tuple[tuple[int, ...], ...]
    cols: tuple[tuple[int, ...], ...]
    b: np.ndarray
    beta: np.ndarray
    cycles: tuple[tuple[int, ...], ...]

    def matrix(self, c: float) -> np.ndarray:
        return self.b + c * self.beta[None, :]

    def reduced(self, c: float) -> np.ndarray:
        """Payoff matrix at ``c`` with duplicate rows and columns removed."""
        M = np.unique(self.matrix(c), axis=1)
        return np.unique(M, axis=0)

    def value(self, c: float) -> float:
        return matrix_game_value(self.reduced(c))[0]


def build_auxiliary(game: SwitchGame, cap: int = AUX_CAP) -> AuxiliaryMatrixGame:
    m, n = game.m, game.n
    size = (n**n) * (m**n)
    if size > cap:
        raise ResourceLimitError(f"auxiliary game has {size} entries, cap is {cap}")
    A, S = game.A, game.S
    cols = list(product(range(n), repeat=n))
    rows = list(product(range(m), repeat=n))
    sig = np.array(rows, dtype=int).reshape(len(rows), n)
    b = np.empty((len(rows), len(cols)))
    beta = np.empty(len(cols))
    cycles = []
    for l, tau in enumerate(cols):
        cyc = _limit_cycle(tau)
        cycles.append(cyc)
        beta[l] = np.mean([S[s, tau[s]] for s in cyc])
        cyc_arr = np.array(cyc)
        nxt = np.array([tau[s] for s in cyc])
        b[:, l] = A[sig[:, cyc_arr], nxt].mean(axis=1)
    return AuxiliaryMatrixGame(tuple(rows), tuple(cols), b, beta, tuple(cycles))


def stationary_value_oracle(game: SwitchGame, c: float, aux: AuxiliaryMatrixGame | None = None) -> float:
    if aux is None:
        aux = build_auxiliary(game)
    return aux.value(c)


# -- strategy lines ------------------------------------------------------------

@dataclass(frozen=True)
class StrategyLine:
    """Payoff ``intercept + slope * c`` of a fixed Player-2 stationary strategy against best responses.

    Iterates as ``(intercept, slope)``. ``ambiguous`` is set when the chain has
    several closed classes; the line is then the worst one for Player 2.
    """

    intercept: float
    slope: float
    ambiguous: bool = False
    class_lines: tuple[tuple[float, float], ...] = ()

    def __iter__(self):
        return iter((self.intercept, self.slope))

    def __call__(self, c):
        return self.intercept + self.slope * np.asarray(c, dtype=float)


def strategy_line(game: SwitchGame, tau) -> StrategyLine:
    if not isinstance(tau, StationaryStrategy):
        tau = StationaryStrategy(tau)
    Q = np.asarray(tau.per_state)
    if Q.shape != (game.n, game.n):
        raise ValueError(f"strategy must have shape ({game.n}, {game.n}), got {Q.shape}")
    stage = (game.A @ Q.T).max(axis=0)
    cost = np.einsum("sj,sj->s", game.S, Q)
    lines = []
    for cls, pi, _ in class_averages(Q, stage):
        lines.append((float(pi @ stage), float(pi @ cost)))
    # each class line bounds v from above, so any of them is a valid tangent;
    # report the one worst for Player 2 near c = 0
    worst = max(lines, key=lambda ab: (ab[0], ab[1]))
    return StrategyLine(worst[0], worst[1], len(lines) > 1, tuple(lines))


# -- ACOE ----------------------------------------------------------------------

@dataclass(frozen=True)
class AcoeSolution:
    gamma: float
    continuation: np.ndarray
    p2_strategy: StationaryStrategy
    p1_strategy: StationaryStrategy
    support_signature: tuple[tuple[int, ...], ...]
    residual: float
    iterations: int
    c: float

    def state_game(self, game: SwitchGame, s: int) -> np.ndarray:
        return game.A + (self.c * game.S[s] + self.continuation)[None, :]


class _CandidateMDP:
    """Player 2's control problem with actions restricted to best-response-region vertices."""

    def __init__(self, game: SwitchGame):
        self.game = game
        self.Q = np.array(best_response_vertices(game.A))
        self.base = (game.A @ self.Q.T).max(axis=0)  # per candidate
        self.switch = game.S @ self.Q.T  # state x candidate
        self.scale = max(1.0, float(np.abs(game.A).max()), float(game.S.max(initial=0.0)))

    def costs(self, c: float) -> np.ndarray:
        return self.base[None, :] + c * self.switch

    def initial_policy(self) -> np.ndarray:
        k = int(np.argmin(np.round(self.base / self.scale, 12)))
        return np.full(self.game.n, k)

    def solve(self, c: float):
        R = self.costs(c)
        tol = 1e-10 * self.scale * max(1.0, c)
        n = self.game.n
        return policy_iteration([self.Q] * n, list(R), self.initial_policy(), tol=tol)


def acoe_solve(game: SwitchGame, c: float, *, tol: float = VALUE_TOL, _mdp: _CandidateMDP | None = None) -> AcoeSolution:
    if c < 0:
        raise ValueError("c must be nonnegative")
    mdp = _mdp if _mdp is not None else _CandidateMDP(game)
    policy, g, h, iters = mdp.solve(c)
    if np.ptp(g) > 1e-9 * mdp.scale:
        # every state reaches every other in one step, so the gain is constant
        raise SolverFailure(f"non-constant gain {g}", residual=float(np.ptp(g)))
    gamma = float(g.mean())
    h = h - h[0]
    n = game.n
    Q = mdp.Q[policy]
    xs = []
    residual = 0.0
    for s in range(n):
        G = game.A + (c * game.S[s] + h)[None, :]
        val, x, _, _ = matrix_game_value(G)
        # Player 2's candidate must be optimal and the equation must hold in every state
        residual = max(residual, abs(val - (gamma + h[s])), float((G @ Q[s]).max() - val))
        xs.append(x)
    if residual > tol * mdp.scale * max(1.0, c):
        raise SolverFailure(f"ACOE verification failed, residual {residual:.3g}", residual=residual)
    tau = StationaryStrategy(Q, "player-2")
    return AcoeSolution(
        gamma=gamma,
        continuation=h,
        p2_strategy=tau,
        p1_strategy=StationaryStrategy(np.array(xs), "player-1"),
        support_signature=tuple(tau.supports()),
        residual=residual,
        iterations=iters,
        c=float(c),
    )


# -- curve tracing -------------------------------------------------------------

def _same_line(l1, l2, scale: float) -> bool:
    return abs(l1[0] - l2[0]) <= 1e-9 * scale and abs(l1[1] - l2[1]) <= 1e-9 * scale


def trace_lines(value_and_line, c_max: float, *, scale: float = 1.0, max_segments: int = MAX_SEGMENTS, tol: float = VALUE_TOL):
    """Exact upper envelope tracing for a concave piecewise-linear function.

    ``value_and_line(c)`` returns ``(value, (intercept, slope), payload)``
    where the line touches the function at ``c`` and lies above it elsewhere.
    Two tangent lines that differ meet at a point; if the function reaches
    them there, the point is a breakpoint, otherwise it yields a new tangent
    between them. Returns the ordered list of distinct ``(line, payload)``.
    """
    evals = 0

    def probe(c):
        nonlocal evals
        evals += 1
        if evals > 4 * max_segments + 10:
            raise ResourceLimitError(f"curve needs more than {max_segments} segments")
        return value_and_line(c)

    def refine(lo, Llo, hi, Lhi):
        if _same_line(Llo[0], Lhi[0], scale):
            return [Llo]
        (a1, b1), (a2, b2) = Llo[0], Lhi[0]
        if b1 - b2 <= 1e-14 * scale:
            raise SolverFailure(f"tangent slopes not decreasing on [{lo}, {hi}]")
        cs = (a2 - a1) / (b1 - b2)
        # a tangent taken exactly at a kink can meet its neighbour at the end of the window
        if cs <= lo + 1e-12 * max(1.0, hi):
            return [Lhi]
        if cs >= hi - 1e-12 * max(1.0, hi):
            return [Llo]
        v, line, payload = probe(cs)
        if v >= a1 + b1 * cs - tol * scale:
            return [Llo, Lhi]
        mid = (line, payload)
        left = refine(lo, Llo, cs, mid)
        right = refine(cs, mid, hi, Lhi)
        return left + right

    v0, l0, p0 = probe(0.0)
    v1, l1, p1 = probe(float(c_max))
    lines = refine(0.0, (l0, p0), float(c_max), (l1, p1))
    out = []
    for ln in lines:
        if out and _same_line(out[-1][0], ln[0], scale):
            continue
        out.append(ln)
    if len(out) > max_segments:
        raise ResourceLimitError(f"curve needs more than {max_segments} segments")
    return out


def curve_from_lines(lines, c_max: float, tail_exact: bool) -> PiecewiseLinearCurve:
    bps = [0.0]
    for (l1, _), (l2, _) in zip(lines, lines[1:]):
        (a1, b1), (a2, b2) = l1, l2
        bps.append((a2 - a1) / (b1 - b2))
    return PiecewiseLinearCurve(
        breakpoints=tuple(float(b) for b in bps),
        intercepts=tuple(float(l[0][0]) for l in lines),
        slopes=tuple(float(l[0][1]) for l in lines),
        c_max=float(c_max),
        tail_exact=tail_exact,
        strategies=tuple(p for _, p in lines),
    )


def trace_value_curve(game: SwitchGame, c_max: float, *, max_segments: int = MAX_SEGMENTS) -> PiecewiseLinearCurve:
    if not c_max > 0:
        raise ValueError("c_max must be positive")
    mdp = _CandidateMDP(game)

    def at(c):
        sol = acoe_solve(game, c, _mdp=mdp)
        line = strategy_line(game, sol.p2_strategy)
        if abs(line(c) - sol.gamma) > VALUE_TOL * mdp.scale * max(1.0, c):
            raise SolverFailure(f"strategy line misses the value at c={c}", residual=abs(line(c) - sol.gamma))
        return sol.gamma, (line.intercept, line.slope), sol.p2_strategy

    lines = trace_lines(at, c_max, scale=mdp.scale, max_segments=max_segments)
    tail_exact = abs(lines[-1][0][1]) <= 1e-12 * mdp.scale
    return curve_from_lines(lines, c_max, tail_exact)
