"""Static minimax: min over a fixed column mix y of max_i A_i y + c y'Sy.

Only the symmetric part of S enters the quadratic term. At desk scale the
global minimum is found by enumerating, for every set T of tied best rows
and every support U, the stationary point of the quadratic restricted to
that stratum, plus the simplex vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from ._geometry import best_response_regions, face_stationary_point
from .core import (
    PiecewiseLinearCurve,
    PreconditionError,
    ResourceLimitError,
    SolverFailure,
    SwitchGame,
    VALUE_TOL,
)

N_CAP = 6
BR_TOL = 1e-8


@dataclass(frozen=True)
class StaticSolveResult:
    value: float
    y_star: np.ndarray
    best_rows: tuple[int, ...]
    method: str
    c: float
    oracle_gap: float | None = None
    candidates: int = 0

    def to_dict(self):
        return {
            "c": self.c,
            "value": self.value,
            "y_star": self.y_star.tolist(),
            "best_rows": list(self.best_rows),
            "method": self.method,
            "oracle_gap": self.oracle_gap,
        }


def static_payoff(game: SwitchGame, c: float, x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(x @ game.A @ y + c * (y @ game.S @ y))


def best_response_value(game: SwitchGame, c: float, y) -> float:
    """Player 1's best payoff against static ``y``."""
    y = np.asarray(y, dtype=float)
    return float((game.A @ y).max() + c * (y @ game.S @ y))


def _best_rows(A, y, scale) -> tuple[int, ...]:
    p = A @ y
    return tuple(int(i) for i in np.flatnonzero(p >= p.max() - BR_TOL * scale))


def _pick(cands, scale):
    """Smallest value; ties go to the smallest support, then lexicographically smallest y."""
    vmin = min(v for v, _ in cands)
    close = [(v, y) for v, y in cands if v <= vmin + 1e-10 * scale]
    return min(close, key=lambda vy: (int(np.sum(vy[1] > 1e-12)), tuple(vy[1])))


def _scale(game: SwitchGame, c: float) -> float:
    return max(1.0, float(np.abs(game.A).max()), c * float(game.S.max(initial=0.0)))


def _clean(y):
    y = np.where(np.abs(y) < 1e-13, 0.0, y)
    y = np.clip(y, 0.0, None)
    return y / y.sum()


def static_candidates(game: SwitchGame, c: float):
    """All candidate minimizers ``(value, y)`` from vertices and tie-set/support stationarity systems."""
    A = game.A
    m, n = A.shape
    Q = c * game.S_sym
    scale = _scale(game, c)
    out = []
    for j in range(n):
        y = np.zeros(n)
        y[j] = 1.0
        out.append((best_response_value(game, c, y), y))
    for t in range(2, m + 1):
        for T in combinations(range(m), t):
            C = np.vstack([np.ones(n)] + [A[T[0]] - A[k] for k in T[1:]])
            d = np.zeros(len(T))
            d[0] = 1.0
            for u in range(1, n + 1):
                for U in combinations(range(n), u):
                    y = face_stationary_point(Q, A[T[0]], C, d, U)
                    if y is None or y.min() < -1e-10:
                        continue
                    y = _clean(y)
                    if not set(T) <= set(_best_rows(A, y, scale)):
                        continue
                    out.append((best_response_value(game, c, y), y))
    return out


def static_minimax(game: SwitchGame, c: float, *, cap: int = N_CAP, check: bool = True, oracle_k: int = 50) -> StaticSolveResult:
    if c < 0:
        raise ValueError("c must be nonnegative")
    if game.n > cap:
        raise ResourceLimitError(f"static minimax enumeration limited to n <= {cap}, got n = {game.n}")
    scale = _scale(game, c)
    cands = static_candidates(game, c)
    value, y = _pick(cands, scale)
    gap = None
    if check and game.n <= 5:
        gap = grid_oracle(game, c, oracle_k) - value
        if gap < -1e-7 * scale:
            raise SolverFailure(f"grid point beats enumerated minimum by {-gap:.3g}", residual=-gap)
    return StaticSolveResult(value, y, _best_rows(game.A, y, scale), "support-enumeration", float(c), gap, len(cands))


def uniform_candidates(game: SwitchGame) -> list[np.ndarray]:
    """Vertices of all Player-1 best-response regions, each tagged with its row."""
    return [(i, y) for i, verts in best_response_regions(game.A) for y in verts]


def static_minimax_uniform(game: SwitchGame, c: float) -> StaticSolveResult:
    if not game.is_uniform:
        raise PreconditionError("uniform-cost path needs S = ones - identity")
    if c < 0:
        raise ValueError("c must be nonnegative")
    scale = _scale(game, c)
    cands = []
    for i, y in uniform_candidates(game):
        y = _clean(y)
        cands.append((float(c + game.A[i] @ y - c * (y @ y)), y))
    value, y = _pick(cands, scale)
    return StaticSolveResult(value, y, _best_rows(game.A, y, scale), "uniform-vertex", float(c), None, len(cands))


# -- grid oracle ---------------------------------------------------------------

def _compositions(n: int, k: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``n`` summing to ``k``."""
    # nondecreasing bar positions 0 <= p_1 <= ... <= p_{n-1} <= k, grown one column at a time
    bars = np.zeros((1, 0), dtype=np.int32)
    for _ in range(n - 1):
        last = bars[:, -1] if bars.shape[1] else np.zeros(bars.shape[0], dtype=np.int32)
        counts = k + 1 - last
        rows = np.repeat(np.arange(bars.shape[0]), counts)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        new = last[rows] + (np.arange(rows.size) - starts)
        bars = np.hstack([bars[rows], new[:, None].astype(np.int32)])
    edges = np.hstack([np.zeros((bars.shape[0], 1), dtype=np.int32), bars, np.full((bars.shape[0], 1), k, dtype=np.int32)])
    return np.diff(edges, axis=1)


def _lattice_chunks(n: int, k: int):
    if n <= 4:
        yield _compositions(n, k)
        return
    for t in range(k + 1):
        rest = _compositions(n - 1, k - t)
        yield np.hstack([np.full((rest.shape[0], 1), t, dtype=np.int32), rest])


def _h_batch(game: SwitchGame, c: float, Y: np.ndarray) -> np.ndarray:
    return (Y @ game.A.T).max(axis=1) + c * np.einsum("ij,jk,ik->i", Y, game.S_sym, Y)


def lipschitz_constant(game: SwitchGame, c: float) -> float:
    """Constant C with ``grid_oracle(k) - static minimum <= C / k``."""
    L1 = float(np.abs(game.A).max()) + 2.0 * c * float(np.abs(game.S_sym).max(initial=0.0))
    return game.n * L1


def grid_search(game: SwitchGame, c: float, k: int = 200) -> tuple[float, np.ndarray]:
    n = game.n
    if n > 5:
        raise ResourceLimitError("grid oracle limited to n <= 5")
    best_v, best_y = np.inf, None
    for chunk in _lattice_chunks(n, k):
        Y = chunk / float(k)
        vals = _h_batch(game, c, Y)
        i = int(np.argmin(vals))
        if vals[i] < best_v:
            best_v, best_y = float(vals[i]), Y[i].copy()

    return _local_lattice(game, c, best_y, 1.0 / k)


_LOCAL_RADIUS = {1: 1, 2: 20, 3: 10, 4: 5, 5: 3}


def _local_lattice(game: SwitchGame, c: float, y: np.ndarray, step: float, tol: float = 1e-11):
    """Shrinking lattice search around ``y``; only feasible points are evaluated.

    A full-dimensional neighbourhood is used because moving along a single
    coordinate pair cannot follow a kink where two rows stay tied.
    """
    n = y.size
    if n == 1:
        return best_response_value(game, c, y), y
    r = _LOCAL_RADIUS[n - 1]
    free = np.array(list(product(range(-r, r + 1), repeat=n - 1)), dtype=float)
    D = np.hstack([free, -free.sum(axis=1, keepdims=True)]) / r
    best = best_response_value(game, c, y)
    for _ in range(400):
        if step < tol:
            break
        Y = y[None, :] + step * D
        Y = Y[(Y >= 0).all(axis=1)]
        vals = _h_batch(game, c, Y)
        i = int(np.argmin(vals))
        if vals[i] < best - 1e-15:
            best, y = float(vals[i]), Y[i]
        else:
            step *= 0.5
    y = np.clip(y, 0.0, None)
    y = y / y.sum()
    return best_response_value(game, c, y), y


def grid_oracle(game: SwitchGame, c: float, k: int = 200) -> float:
    return grid_search(game, c, k)[0]


# -- curves --------------------------------------------------------------------

def lower_envelope(lines, c_max: float = np.inf, scale: float = 1.0):
    """Lower envelope on ``[0, inf)`` of lines ``(intercept, slope, payload)``.

    Returns the ordered pieces as ``(start, intercept, slope, payload)``.
    """
    tol = 1e-12 * scale
    a0 = min(a for a, _, _ in lines)
    cur = min((l for l in lines if l[0] <= a0 + tol), key=lambda l: l[1])
    pieces = [(0.0, cur)]
    c_now = 0.0
    while True:
        nxt, c_hit = None, np.inf
        for l in lines:
            if l[1] < cur[1] - tol:
                x = (l[0] - cur[0]) / (cur[1] - l[1])
                if x < c_hit - 1e-12 or (abs(x - c_hit) <= 1e-12 and l[1] < nxt[1]):
                    nxt, c_hit = l, x
        if nxt is None:
            break
        c_hit = max(c_hit, c_now)
        if c_hit <= c_now + 1e-13:
            pieces[-1] = (pieces[-1][0], nxt)
        else:
            pieces.append((c_hit, nxt))
        cur, c_now = nxt, c_hit
    return [(s, l[0], l[1], l[2]) for s, l in pieces]


@dataclass(frozen=True)
class SampledCurve:
    """Static minimax sampled at ``cs``, with per-interval lower and upper bounds."""

    cs: np.ndarray
    values: np.ndarray
    y_stars: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    tag: str = "semi-algebraic"
    method: str = "support-enumeration"
    notes: tuple[str, ...] = field(default=())

    def __call__(self, c):
        return np.interp(c, self.cs, self.values)

    def violations(self, tol: float = VALUE_TOL) -> list[str]:
        return _sample_violations(self.cs, self.values, tol)


def _sample_violations(cs, vals, tol) -> list[str]:
    out = []
    d = np.diff(vals)
    for k in np.flatnonzero(d < -tol):
        out.append(f"decrease {d[k]:.3g} on [{cs[k]:.6g}, {cs[k + 1]:.6g}]")
    slopes = d / np.diff(cs)
    for k in np.flatnonzero(np.diff(slopes) * np.diff(cs)[1:] > tol):
        out.append(f"concavity broken at c={cs[k + 1]:.6g}")
    return out


def trace_static_curve(game: SwitchGame, c_max: float, samples: int = 64):
    """Exact piecewise-linear curve for uniform costs, sampled curve with bounds otherwise."""
    if samples < 16:
        raise ValueError("need at least 16 samples")
    if not c_max > 0:
        raise ValueError("c_max must be positive")
    scale = _scale(game, c_max)
    if game.is_uniform:
        ys = [_clean(y) for _, y in uniform_candidates(game)]
        lines = [(float((game.A @ y).max()), float(1.0 - y @ y), y) for y in ys]
        pieces = lower_envelope(lines, scale=scale)
        return PiecewiseLinearCurve(
            breakpoints=tuple(p[0] for p in pieces),
            intercepts=tuple(p[1] for p in pieces),
            slopes=tuple(p[2] for p in pieces),
            c_max=float(c_max),
            tail_exact=True,
            strategies=tuple(p[3] for p in pieces),
        )
    cs = np.linspace(0.0, float(c_max), samples)
    res = [static_minimax(game, c, check=False) for c in cs]
    vals = np.array([r.value for r in res])
    ys = np.array([r.y_star for r in res])
    bad = _sample_violations(cs, vals, VALUE_TOL * scale)
    if bad:
        raise SolverFailure("static curve not monotone concave: " + "; ".join(bad))
    # each sampled minimizer gives an upper line valid for every c
    a = (ys @ game.A.T).max(axis=1)
    b = np.einsum("ij,jk,ik->i", ys, game.S_sym, ys)
    upper = np.empty(samples - 1)
    for k in range(samples - 1):
        lo, hi = cs[k], cs[k + 1]
        if abs(b[k] - b[k + 1]) > 1e-15:
            x = (a[k + 1] - a[k]) / (b[k] - b[k + 1])
            x = min(max(x, lo), hi)
        else:
            x = hi
        upper[k] = min(a[k] + b[k] * x, a[k + 1] + b[k + 1] * x)
        upper[k] = max(upper[k], vals[k + 1])
    return SampledCurve(cs, vals, ys, vals[:-1].copy(), upper)
