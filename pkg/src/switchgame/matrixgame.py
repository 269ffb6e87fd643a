"""One-shot zero-sum matrix games: value, optimal strategies, the column player's optimal polytope."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lp
from ._geometry import simplex_face_vertices
from .core import SolverFailure


@dataclass(frozen=True)
class MatrixGameSolution:
    value: float
    x_opt: np.ndarray
    y_opt: np.ndarray
    y_polytope_vertices: tuple[np.ndarray, ...]
    pure_minimax_value: float
    pure_minimax_actions: tuple[int, ...]
    dual_value: float

    @property
    def has_pure_optimum(self) -> bool:
        return any(np.max(v) >= 1.0 - 1e-12 for v in self.y_polytope_vertices)


def _clean(p: np.ndarray) -> np.ndarray:
    p = np.where(p < 0, 0.0, p)
    return p / p.sum()


def matrix_game_value(A) -> tuple[float, np.ndarray, np.ndarray, float]:
    """Value and optimal strategies via the two positive-shift LPs.

    Returns ``(value, x, y, dual_value)`` where ``value`` comes from the
    column player's LP and ``dual_value`` from the row player's.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    shift = A.min() - 1.0
    B = A - shift
    try:
        col = lp.linprog(-np.ones(n), A_ub=B, b_ub=np.ones(m))
        row = lp.linprog(np.ones(m), A_ub=-B.T, b_ub=-np.ones(n))
    except lp.LPError as exc:  # cannot happen for finite A
        raise SolverFailure(f"matrix-game LP failed: {exc}") from exc
    su, sw = col.x.sum(), row.x.sum()
    y = _clean(col.x / su)
    x = _clean(row.x / sw)
    return 1.0 / su + shift, x, y, 1.0 / sw + shift


def pure_minimax(A) -> tuple[float, tuple[int, ...]]:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    col_max = A.max(axis=0)
    best = col_max.min()
    return float(best), tuple(int(j) for j in np.flatnonzero(col_max == best))


def optimal_strategy_vertices(A, value: float | None = None, *, cap: int = 10_000, tol: float = 1e-9):
    """Vertices of the column player's optimal set ``{y in simplex : A y <= value}``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if value is None:
        value = matrix_game_value(A)[0]
    verts = simplex_face_vertices(A, np.full(A.shape[0], value), A.shape[1], cap=cap, tol=tol)
    return [_clean(y) for y in verts]


def solve_matrix_game(A, *, with_vertices: bool = True, vertex_cap: int = 10_000) -> MatrixGameSolution:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    value, x, y, dual = matrix_game_value(A)
    verts = optimal_strategy_vertices(A, value, cap=vertex_cap) if with_vertices else [y]
    pv, pa = pure_minimax(A)
    return MatrixGameSolution(
        value=value,
        x_opt=x,
        y_opt=y,
        y_polytope_vertices=tuple(verts),
        pure_minimax_value=pv,
        pure_minimax_actions=pa,
        dual_value=dual,
    )
