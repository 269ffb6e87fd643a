"""Thresholds and loss bounds comparing static play with stationary play.

All evaluators expect the canonical game (payoffs in [0, 1] with both ends
attained, smallest nonzero switching cost 1); the bound constants depend on
that range. Use ``core.normalize`` first and map results back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import lp
from ._geometry import face_stationary_point
from .core import PreconditionError, ResourceLimitError, SwitchGame, VALUE_TOL
from .matrixgame import matrix_game_value, optimal_strategy_vertices, pure_minimax
from .stationary import trace_value_curve

N_CAP = 6


def _require_canonical(game: SwitchGame, what: str) -> None:
    if not game.is_canonical:
        raise PreconditionError(f"{what} needs the canonical game (A in [0, 1], min nonzero S = 1); normalize first")


def asymmetry_xi(S) -> float:
    S = np.asarray(S, dtype=float)
    return float(np.abs(S - S.T).max(initial=0.0))


def _quadratic_candidates(Q, n: int, C_extra=None, d_extra=None, cap: int = N_CAP):
    """Stationary points of y'Qy on every face of the simplex, optionally intersected with ``C_extra y = d_extra``."""
    if n > cap:
        raise ResourceLimitError(f"quadratic enumeration limited to n <= {cap}, got {n}")
    C = np.ones((1, n)) if C_extra is None else np.vstack([np.ones((1, n)), C_extra])
    d = np.ones(1) if d_extra is None else np.concatenate([[1.0], d_extra])
    out = []
    for u in range(1, n + 1):
        for U in combinations(range(n), u):
            y = face_stationary_point(Q, np.zeros(n), C, d, U)
            if y is not None and y.min() >= -1e-10:
                y = np.clip(y, 0.0, None)
                out.append(y / y.sum())
    return out


def max_switch_cost(S, cap: int = N_CAP) -> tuple[float, np.ndarray]:
    """Largest expected per-stage switching cost ``max_y y'Sy`` and a maximizer."""
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    Q = (S + S.T) / 2.0
    cands = list(np.eye(n)) + _quadratic_candidates(Q, n, cap=cap)
    vals = [float(y @ Q @ y) for y in cands]
    k = int(np.argmax(vals))
    return max(vals[k], 0.0), cands[k]


def bound_uniform_loss(game: SwitchGame, c: float, v_c: float) -> float:
    """Gap bound from asymmetry and maximal switching cost; valid for any S."""
    _require_canonical(game, "bound_uniform_loss")
    M, _ = max_switch_cost(game.S)
    return 0.5 * (1.0 - v_c) + c * asymmetry_xi(game.S) / 4.0 + c * M / 4.0


def bound_symmetric_ratio(game: SwitchGame, c: float, v_c: float, vtilde_c: float) -> tuple[float, bool]:
    _require_canonical(game, "bound_symmetric_ratio")
    if not game.is_symmetric:
        raise PreconditionError("symmetric-cost ratio needs S = S^T")
    M, _ = max_switch_cost(game.S)
    delta = 0.5 * (1.0 - v_c) + c * M / 4.0
    den = 1.0 + c * M - v_c
    if den <= 1e-15:
        return delta, True
    return delta, bool((1.0 + c * M - vtilde_c) / den >= 0.5 - 1e-9)


def bound_uniform_S(game: SwitchGame, c: float, v_c: float) -> float:
    _require_canonical(game, "bound_uniform_S")
    if not game.is_uniform:
        raise PreconditionError("uniform-cost bound needs S = ones - identity")
    return 0.5 * (1.0 + c * (1.0 - 1.0 / game.n) - v_c)


# -- lowest-cost optimal mix and the static threshold ----------------------------

def cheapest_optimal_mix(game: SwitchGame, cap: int = N_CAP) -> tuple[np.ndarray, float]:
    """Player-2 optimal mix in A with the least expected switching cost; ties go lexicographically smallest."""
    A = game.A
    m, n = A.shape
    if n > cap:
        raise ResourceLimitError(f"enumeration limited to n <= {cap}, got {n}")
    v = matrix_game_value(A)[0]
    Q = game.S_sym
    scale = max(1.0, float(np.abs(A).max()))
    cands = list(optimal_strategy_vertices(A, v))
    for t in range(0, m + 1):
        for T in combinations(range(m), t):
            C = A[list(T)] if T else None
            d = np.full(len(T), v) if T else None
            for y in _quadratic_candidates(Q, n, C, d, cap):
                if (A @ y).max() <= v + 1e-9 * scale:
                    cands.append(y)
    vals = np.array([float(y @ Q @ y) for y in cands])
    best = vals.min()
    close = [y for y, s in zip(cands, vals) if s <= best + 1e-10]
    y_star = min(close, key=tuple)
    return y_star, float(y_star @ game.S @ y_star)


@dataclass(frozen=True)
class StaticThreshold:
    """Largest c up to which the cheapest optimal mix, played every stage, is optimal.

    Iterates as ``(ubar_c, y_star)``. ``trivial`` means Player 2 has an optimal
    pure action, so switching costs never matter and ``ubar_c`` is infinite.
    """

    ubar_c: float
    y_star: np.ndarray
    s: float
    trivial: bool = False
    per_state: tuple[float, ...] = ()
    note: str = ""

    def __iter__(self):
        return iter((self.ubar_c, self.y_star))


def ubar_c(game: SwitchGame) -> StaticThreshold:
    A, S = game.A, game.S
    m, n = A.shape
    v = matrix_game_value(A)[0]
    y_star, s = cheapest_optimal_mix(game)
    if y_star.max() >= 1.0 - 1e-12:
        return StaticThreshold(np.inf, y_star, 0.0, True, note="optimal pure action: switching costs never bind")
    scale = max(1.0, float(np.abs(A).max()))
    support = y_star > 1e-12
    rows = np.flatnonzero(A @ y_star >= v - 1e-9 * scale)
    Sy = S @ y_star
    bounds = []
    for st in range(n):
        # x over best-response rows and c >= 0 with x A_j = v + c d_j on the support, >= off it
        d = s + Sy[st] - S[st] - Sy
        k = rows.size
        obj = np.zeros(k + 1)
        obj[-1] = -1.0
        A_eq = [np.r_[np.ones(k), 0.0]]
        b_eq = [1.0]
        A_ub, b_ub = [], []
        for j in range(n):
            row = np.r_[A[rows, j], -d[j]]
            if support[j]:
                A_eq.append(row)
                b_eq.append(v)
            else:
                A_ub.append(-row)
                b_ub.append(-v)
        try:
            res = lp.linprog(obj, A_ub=np.array(A_ub).reshape(-1, k + 1), b_ub=np.array(b_ub),
                             A_eq=np.array(A_eq), b_eq=np.array(b_eq))
            bounds.append(float(res.x[-1]))
        except lp.Unbounded:
            bounds.append(np.inf)
        except lp.Infeasible:
            bounds.append(0.0)
    ub = max(0.0, min(bounds))
    note = "" if ub > 1e-12 else "no static strategy attains v(c) for any c > 0"
    return StaticThreshold(ub, y_star, s, False, tuple(bounds), note)


# -- flattening threshold --------------------------------------------------------

@dataclass(frozen=True)
class FlatThreshold:
    c_hat: float | None
    c_bar: float | None
    v_bar: float
    curve: object = field(default=None, repr=False, compare=False)
    note: str = ""


def empirical_c_bar(curve, v_bar: float, tol: float = VALUE_TOL) -> float | None:
    """Start of the first flat piece sitting at the pure minimax value."""
    for b, a, sl in zip(curve.breakpoints, curve.intercepts, curve.slopes):
        if abs(sl) <= tol and abs(a - v_bar) <= tol:
            return float(b)
    return None


def bar_c_upper(game: SwitchGame, curve=None) -> FlatThreshold:
    v_bar = pure_minimax(game.A)[0]
    if game.n == 1:
        return FlatThreshold(0.0, 0.0, v_bar, note="single column: nothing to switch")
    if game.has_free_switches:
        raise PreconditionError("bar-c bound needs strictly positive off-diagonal switching costs")
    _require_canonical(game, "bar_c_upper")
    c_hat = v_bar - float(game.A.min())
    if curve is None:
        curve = trace_value_curve(game, max(c_hat, 1e-6) * 1.05)
    c_bar = empirical_c_bar(curve, v_bar)
    note = ""
    if c_bar is not None and c_bar > c_hat + 1e-7:
        note = f"empirical c-bar {c_bar:.9g} exceeds the bound {c_hat:.9g}"
    return FlatThreshold(c_hat, c_bar, v_bar, curve, note)


# -- ledger ----------------------------------------------------------------------

@dataclass(frozen=True)
class BoundLedger:
    xi: float
    M: float
    v: float
    v_bar: float
    ubar_c: float
    bar_c_upper: float | None
    c_bar: float | None
    c0: float | None
    s: float
    y_star: np.ndarray
    y_bar: tuple[int, ...]
    s_hat: dict = field(default_factory=dict)
    c1: dict = field(default_factory=dict)
    c2: dict = field(default_factory=dict)
    trivial: bool = False
    uniform: bool = False
    symmetric: bool = False
    n: int = 1
    notes: tuple[str, ...] = ()

    @property
    def c_bar_used(self) -> tuple[float | None, bool]:
        """Flattening threshold to plug into the bounds and whether it is only the upper bound."""
        if self.c_bar is not None:
            return self.c_bar, False
        return self.bar_c_upper, self.bar_c_upper is not None

    # evaluators -------------------------------------------------------------
    def uniform_loss(self, c: float, v_c: float) -> float:
        return 0.5 * (1.0 - v_c) + c * self.xi / 4.0 + c * self.M / 4.0

    def symmetric_ratio(self, c: float, v_c: float, vtilde_c: float) -> tuple[float, bool] | None:
        if not self.symmetric:
            return None
        delta = 0.5 * (1.0 - v_c) + c * self.M / 4.0
        den = 1.0 + c * self.M - v_c
        return delta, bool(den <= 1e-15 or (1.0 + c * self.M - vtilde_c) / den >= 0.5 - 1e-9)

    def uniform_S(self, c: float, v_c: float) -> float | None:
        if not self.uniform:
            return None
        return 0.5 * (1.0 + c * (1.0 - 1.0 / self.n) - v_c)

    def loss(self, c: float) -> float | None:
        if self.trivial:
            return 0.0
        cb, _ = self.c_bar_used
        if cb is None or self.c0 is None:
            return None
        lo = self.ubar_c
        if cb <= lo or c <= lo or c >= cb:
            return 0.0
        if c <= self.c0:
            return (c - lo) * (cb - self.c0) / (cb - lo) * self.s
        return (cb - c) * (self.c0 - lo) / (cb - lo) * self.s

    def _line_gap(self, c: float, cb: float) -> float:
        # vertical distance from v-bar down to the chord under v(c)
        return (self.v_bar - self.v - self.ubar_c * self.s) * (cb - c) / (cb - self.ubar_c)

    def mixture_upper(self, c: float) -> float | None:
        """Best payoff bound from mixing the cheapest optimal mix with a pure minimax column."""
        vals = []
        for j, sh in self.s_hat.items():
            if self.s > sh and self.c1[j] <= c <= self.c2[j] and c > 0:
                vals.append(self.v_bar - (c * sh + self.v - self.v_bar) ** 2 / (4.0 * c * (self.s - sh)))
        return min(vals) if vals else None

    def mixture(self, c: float) -> float | None:
        if self.trivial:
            return None
        cb, _ = self.c_bar_used
        if cb is None or not (self.ubar_c < c < cb):
            return None
        f = self.mixture_upper(c)
        if f is None:
            return None
        chord = self.v_bar - self._line_gap(c, cb)
        return f - chord

    def mixture_reason(self, c: float) -> str | None:
        if self.trivial:
            return "optimal pure action: no gap"
        if not any(self.s > sh for sh in self.s_hat.values()):
            return "s <= s_hat (uniform S)" if self.uniform else "s <= s_hat"
        cb, _ = self.c_bar_used
        if cb is None:
            return "flattening threshold unknown"
        if not (self.ubar_c < c < cb):
            return "c outside (ubar_c, c_bar)"
        if self.mixture_upper(c) is None:
            return "c outside [c1, c2]"
        return None

    def to_dict(self) -> dict:
        def f(x):
            if x is None:
                return None
            x = float(x)
            return x if np.isfinite(x) else ("inf" if x > 0 else "-inf")

        cb, approx = self.c_bar_used
        return {
            "xi": f(self.xi),
            "M": f(self.M),
            "v": f(self.v),
            "v_bar": f(self.v_bar),
            "ubar_c": f(self.ubar_c),
            "bar_c_upper": f(self.bar_c_upper),
            "c_bar_empirical": f(self.c_bar),
            "c_bar_used": f(cb),
            "c_bar_is_upper_bound_only": approx,
            "c0": f(self.c0),
            "s": f(self.s),
            "y_star": self.y_star.tolist(),
            "y_bar": list(self.y_bar),
            "s_hat": {str(j): f(v) for j, v in self.s_hat.items()},
            "c1": {str(j): f(v) for j, v in self.c1.items()},
            "c2": {str(j): f(v) for j, v in self.c2.items()},
            "trivial": self.trivial,
            "uniform": self.uniform,
            "symmetric": self.symmetric,
            "notes": list(self.notes),
        }


def build_ledger(game: SwitchGame, curve=None, c_max_free: float = 10.0) -> BoundLedger:
    """All thresholds for a canonical game. ``curve`` is the stationary value curve if already traced."""
    _require_canonical(game, "build_ledger")
    notes = []
    v = matrix_game_value(game.A)[0]
    v_bar, y_bar = pure_minimax(game.A)
    M, _ = max_switch_cost(game.S)
    thr = ubar_c(game)
    if thr.note:
        notes.append(thr.note)
    c_hat = None
    c_bar = None
    if game.has_free_switches:
        notes.append("free switches: no bound on the flattening threshold")
        if curve is None:
            curve = trace_value_curve(game, c_max_free)
        c_bar = empirical_c_bar(curve, v_bar)
    else:
        flat = bar_c_upper(game, curve)
        c_hat, c_bar = flat.c_hat, flat.c_bar
        if flat.note:
            notes.append(flat.note)
    if c_bar is None and c_hat is not None:
        notes.append("bound computed with c-hat >= c-bar, hence looser")
    s = thr.s
    c0 = (v_bar - v) / s if s > 0 else None
    s_hat, c1, c2 = {}, {}, {}
    y = thr.y_star
    for j in y_bar:
        sh = float(y @ game.S[:, j] + game.S[j] @ y)
        s_hat[j] = sh
        if s > sh:
            c1[j] = (v_bar - v) / (2.0 * s - sh)
            c2[j] = (v_bar - v) / sh if sh > 0 else np.inf
    return BoundLedger(
        xi=asymmetry_xi(game.S), M=M, v=v, v_bar=v_bar, ubar_c=thr.ubar_c,
        bar_c_upper=c_hat, c_bar=c_bar, c0=c0, s=s, y_star=y, y_bar=y_bar,
        s_hat=s_hat, c1=c1, c2=c2, trivial=thr.trivial, uniform=game.is_uniform,
        symmetric=game.is_symmetric, n=game.n, notes=tuple(notes),
    )


def bound_loss(game: SwitchGame, c: float, ledger: BoundLedger | None = None) -> float | None:
    return (ledger or build_ledger(game)).loss(c)


def bound_mixture(game: SwitchGame, c: float, ledger: BoundLedger | None = None) -> float | None:
    return (ledger or build_ledger(game)).mixture(c)


def check_s_hat_condition(game: SwitchGame) -> bool:
    """Whether mixing with a pure minimax column could beat the cheapest optimal mix; never true for uniform costs."""
    if not game.is_uniform:
        raise PreconditionError("the s > s-hat observation concerns uniform costs")
    y_star, _ = cheapest_optimal_mix(game)
    _, cols = pure_minimax(game.A)
    for j in cols:
        y_bar = np.zeros(game.n)
        y_bar[j] = 1.0
        if (2.0 * y_bar - y_star) @ y_star > 1.0 + 1e-12:
            return True
    return False
