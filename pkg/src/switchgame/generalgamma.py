"""Stochastic games whose state is Player 2's previous action.

The payoff is a tensor ``r[state, row, col]`` and the next state is the
column just played. Switching-cost games are the subclass where
``r(s, i, j) = A[i, j] + S[s, j]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, product
from pathlib import Path

import numpy as np

from ._acoe import policy_iteration
from ._geometry import best_response_vertices, face_stationary_point
from .core import (
    PreconditionError,
    ResourceLimitError,
    SolverFailure,
    StationaryStrategy,
    StructuralError,
    SwitchGame,
    _parse_json,
)
from .matrixgame import matrix_game_value
from .staticsolve import _lattice_chunks
from .stationary import AUX_CAP, _limit_cycle

N_CAP = 6
MEMBER_TOL = 1e-9


@dataclass(frozen=True)
class GeneralGameG:
    r: np.ndarray
    name: str = ""

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.ndim != 3 or r.shape[0] != r.shape[2] or r.shape[1] < 1 or r.shape[0] < 1:
            raise StructuralError(f"tensor must have shape (states, rows, states), got {r.shape}")
        if not np.all(np.isfinite(r)):
            raise StructuralError("tensor entries must be finite")
        r = r.copy()
        r.flags.writeable = False
        object.__setattr__(self, "r", r)

    @property
    def n_states(self) -> int:
        return self.r.shape[0]

    @property
    def n_rows(self) -> int:
        return self.r.shape[1]

    @property
    def is_normalized(self) -> bool:
        return bool(abs(self.r.min()) <= 1e-12 and abs(self.r.max() - 1.0) <= 1e-12)

    def normalized(self) -> tuple["GeneralGameG", float, float]:
        """Rescaled copy with entries spanning [0, 1], plus ``(shift, scale)``."""
        lo, hi = float(self.r.min()), float(self.r.max())
        if hi <= lo:
            return self, lo, 1.0
        return GeneralGameG((self.r - lo) / (hi - lo), self.name), lo, hi - lo

    def to_dict(self) -> dict:
        d = {"r": self.r.tolist()}
        if self.name:
            d["name"] = self.name
        return d


def embed(game: SwitchGame, c: float) -> GeneralGameG:
    """Tensor of a switching-cost game at weight ``c``."""
    r = game.A[None, :, :] + c * game.S[:, None, :]
    return GeneralGameG(r, game.name)


def _tensor(r) -> np.ndarray:
    return r.r if isinstance(r, GeneralGameG) else GeneralGameG(r).r


# -- decomposition ---------------------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    """``r(s, i, j) = A[i, j] + S[s, j]`` with zero diagonal in ``S``."""

    A: np.ndarray
    S: np.ndarray
    cost_model_ok: bool
    notes: tuple[str, ...] = ()

    def as_game(self, name: str = "") -> SwitchGame:
        if not self.cost_model_ok:
            raise PreconditionError("decomposition has negative switching costs")
        return SwitchGame(self.A, self.S, name)


def membership_G_S(r, tol: float = MEMBER_TOL) -> Decomposition | None:
    r = _tensor(r)
    A = r[0].copy()
    D = r[:, 0, :] - r[0, 0, :][None, :]
    recon = A[None, :, :] + D[:, None, :]
    if np.abs(recon - r).max() > tol * max(1.0, float(np.abs(r).max())):
        return None
    diag = np.diag(D).copy()
    A = A + diag[None, :]
    S = D - diag[None, :]
    np.fill_diagonal(S, 0.0)
    notes = []
    if np.any(diag != 0):
        notes.append("column-constant part of the state term folded into A")
    ok = bool(S.min() >= -tol)
    if not ok:
        notes.append("in the additive subclass but outside the switching-cost model (negative off-diagonal cost)")
    else:
        S = np.clip(S, 0.0, None)
    return Decomposition(A, S, ok, tuple(notes))


# -- stationary value --------------------------------------------------------------

@dataclass(frozen=True)
class StationaryResultG:
    value: float
    p2_strategy: StationaryStrategy
    p1_strategy: StationaryStrategy
    continuation: np.ndarray
    oracle_value: float | None = None

    def __iter__(self):
        return iter((self.value, (self.p2_strategy, self.p1_strategy)))


def auxiliary_value_G(r, cap: int = AUX_CAP) -> float:
    r = _tensor(r)
    n, m = r.shape[0], r.shape[1]
    if (n**n) * (m**n) > cap:
        raise ResourceLimitError(f"auxiliary game has {(n**n) * (m**n)} entries, cap is {cap}")
    rows = np.array(list(product(range(m), repeat=n)), dtype=int).reshape(-1, n)
    cols = {}
    for tau in product(range(n), repeat=n):
        cyc = _limit_cycle(tau)
        cols.setdefault(tuple((s, tau[s]) for s in cyc), None)
    M = np.empty((rows.shape[0], len(cols)))
    for l, cyc in enumerate(cols):
        s = np.array([a for a, _ in cyc])
        j = np.array([b for _, b in cyc])
        M[:, l] = r[s[None, :], rows[:, s], j[None, :]].mean(axis=1)
    return matrix_game_value(np.unique(M, axis=0))[0]


def _acoe_G(r):
    n = r.shape[0]
    cands = [np.array(best_response_vertices(r[s])) for s in range(n)]
    costs = [(r[s] @ Q.T).max(axis=0) for s, Q in enumerate(cands)]
    init = [int(np.argmin(np.round(cs, 12))) for cs in costs]
    scale = max(1.0, float(np.abs(r).max()))
    policy, g, h, _ = policy_iteration(cands, costs, init, tol=1e-10 * scale)
    h = h - h[0]
    Q = np.array([cands[s][policy[s]] for s in range(n)])
    gamma = float(g.max())
    xs = []
    residual = float(np.ptp(g))
    for s in range(n):
        G = r[s] + h[None, :]
        val, x, _, _ = matrix_game_value(G)
        residual = max(residual, abs(val - (gamma + h[s])), float((G @ Q[s]).max() - val))
        xs.append(x)
    if residual > 1e-7 * scale:
        raise SolverFailure(f"optimality equation residual {residual:.3g}", residual=residual)
    return gamma, Q, np.array(xs), h


def stationary_value_G(r, *, cap: int = AUX_CAP, oracle: bool = True) -> StationaryResultG:
    """Stationary value with optimal strategies from the optimality equation, checked against the auxiliary game."""
    r = _tensor(r)
    gamma, Q, X, h = _acoe_G(r)
    ov = None
    if oracle:
        ov = auxiliary_value_G(r, cap)
        if abs(ov - gamma) > 1e-6 * max(1.0, float(np.abs(r).max())):
            raise SolverFailure(f"stationary value {gamma} disagrees with auxiliary game {ov}", residual=abs(ov - gamma))
    return StationaryResultG(gamma, StationaryStrategy(Q, "player-2"), StationaryStrategy(X, "player-1"), h, ov)


# -- static minimax ----------------------------------------------------------------

def static_objective_G(r, y) -> float:
    """Player 1's best stationary reply to static ``y``: state ``s`` is visited with frequency ``y_s``."""
    r = _tensor(r)
    y = np.asarray(y, dtype=float)
    return float(y @ (r @ y).max(axis=1))


def _objective_batch(r, Y):
    # per state s: max_i (r[s] @ y)_i, weighted by y_s
    P = np.einsum("sij,kj->ksi", r, Y).max(axis=2)
    return np.einsum("ks,ks->k", Y, P)


def static_grid_G(r, k: int = 60) -> tuple[float, np.ndarray]:
    r = _tensor(r)
    n = r.shape[0]
    if n > 5:
        raise ResourceLimitError("grid check limited to 5 states")
    best_v, best_y = np.inf, None
    for chunk in _lattice_chunks(n, k):
        Y = chunk / float(k)
        vals = _objective_batch(r, Y)
        i = int(np.argmin(vals))
        if vals[i] < best_v:
            best_v, best_y = float(vals[i]), Y[i].copy()
    return best_v, best_y


@dataclass(frozen=True)
class StaticResultG:
    value: float
    y: np.ndarray
    grid_gap: float | None = None

    def __iter__(self):
        return iter((self.value, self.y))


def static_minimax_G(r, *, cap: int = N_CAP, check: bool = True, grid_k: int = 60) -> StaticResultG:
    r = _tensor(r)
    n, m = r.shape[0], r.shape[1]
    if n > cap:
        raise ResourceLimitError(f"static minimax limited to {cap} states, got {n}")
    scale = max(1.0, float(np.abs(r).max()))
    tie_sets = [T for t in range(1, m + 1) for T in combinations(range(m), t)]
    cands = [np.eye(n)[j] for j in range(n)]
    for u in range(1, n + 1):
        for U in combinations(range(n), u):
            for choice in product(tie_sets, repeat=u):
                # on this stratum the objective is y' M y with row s of M the leading tied row of state s
                M = np.zeros((n, n))
                C = [np.ones(n)]
                for s, T in zip(U, choice):
                    M[s] = r[s, T[0]]
                    C.extend(r[s, T[0]] - r[s, t] for t in T[1:])
                C = np.array(C)
                d = np.zeros(C.shape[0])
                d[0] = 1.0
                y = face_stationary_point((M + M.T) / 2.0, np.zeros(n), C, d, U)
                if y is None or y.min() < -1e-10:
                    continue
                y = np.clip(y, 0.0, None)
                y = y / y.sum()
                ok = True
                for s, T in zip(U, choice):
                    p = r[s] @ y
                    if p[list(T)].min() < p.max() - 1e-8 * scale:
                        ok = False
                        break
                if ok:
                    cands.append(y)
    vals = np.array([static_objective_G(r, y) for y in cands])
    best = vals.min()
    close = [y for y, v in zip(cands, vals) if v <= best + 1e-10 * scale]
    y = min(close, key=lambda z: (int(np.sum(z > 1e-12)), tuple(z)))
    value = static_objective_G(r, y)
    gap = None
    if check and n <= 5:
        gv, _ = static_grid_G(r, grid_k)
        gap = gv - value
        if gap < -1e-7 * scale:
            raise SolverFailure(f"grid point beats enumerated static minimum by {-gap:.3g}", residual=-gap)
    return StaticResultG(value, y, gap)


# -- quarter bound -----------------------------------------------------------------

@dataclass(frozen=True)
class QuarterBound:
    delta: float
    ratio_ok: bool
    filter_strategy: np.ndarray
    filter_value: float
    j_star: int
    y_star: np.ndarray
    sharper_delta: float | None = None
    sharper_ok: bool | None = None
    notes: tuple[str, ...] = field(default=())

    def __iter__(self):
        return iter((self.delta, self.ratio_ok, self.filter_strategy))


def quarter_bound(r, v: float, vtilde: float) -> QuarterBound:
    r = _tensor(r)
    if not GeneralGameG(r).is_normalized and not np.ptp(r) == 0:
        raise PreconditionError("quarter bound needs the tensor normalized to [0, 1]")
    n = r.shape[0]
    delta = 0.75 * (1.0 - v)
    ratio_ok = True if v >= 1.0 - 1e-12 else bool((1.0 - vtilde) / (1.0 - v) >= 0.25 - 1e-9)
    # a state whose one-shot game Player 2 can hold to at most v
    vals, ys = [], []
    for s in range(n):
        val, _, y, _ = matrix_game_value(r[s])
        vals.append(val)
        ys.append(y)
    j = int(np.argmin(vals))
    if vals[j] > v + 1e-7:
        raise SolverFailure(f"no state holds Player 1 to the value {v}: best one-shot value {vals[j]}", residual=vals[j] - v)
    filt = 0.5 * ys[j]
    filt[j] += 0.5
    fval = static_objective_G(r, filt)
    notes = []
    sharper = sharper_ok = None
    if n <= 4 and max(vals) <= v + 1e-7:
        sharper = (1.0 - 1.0 / n) * (1.0 - v)
        sharper_ok = bool(vtilde - v <= sharper + 1e-9)
        notes.append("sharper per-state bound is a prose-level claim")
    return QuarterBound(delta, ratio_ok, filt, fval, j, ys[j], sharper, sharper_ok, tuple(notes))


# -- tensor files ------------------------------------------------------------------

def parse_tensor(text: str, source: str = "<string>") -> GeneralGameG:
    data = _parse_json(text, source)
    extra = set(data) - {"r", "name"}
    if extra:
        raise StructuralError(f"{source}: unknown keys {sorted(extra)}")
    if "r" not in data:
        raise StructuralError(f"{source}: missing key 'r'")
    try:
        r = np.array(data["r"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise StructuralError(f"{source}: 'r' must be a rectangular numeric array") from exc
    return GeneralGameG(r, str(data.get("name", "")))


def load_tensor(path) -> GeneralGameG:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise StructuralError(f"{p}: {exc.strerror}") from None
    return parse_tensor(text, str(p))


def dump_tensor(g: GeneralGameG) -> str:
    return json.dumps(g.to_dict())
