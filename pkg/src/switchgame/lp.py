"""Dense two-phase simplex with Bland's rule.

Problem form::

    minimize    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                x >= 0

Sizes here are tiny (tens of rows, at most a few thousand columns), so a
plain tableau is simpler and more predictable than anything sparse. Bland's
rule makes the pivot sequence, and therefore the returned optimal vertex,
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9
FEASIBILITY_TOL = 1e-9


class LPError(RuntimeError):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    fun: float
    basis: tuple[int, ...]
    iterations: int


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    colv = T[:, col].copy()
    colv[row] = 0.0
    T -= np.outer(colv, T[row])
    T[np.abs(T) < 1e-15] = 0.0


def _run(T: np.ndarray, basis: list[int], n_cols: int, max_iter: int) -> int:
    """Bland's-rule simplex on tableau ``T`` whose last row holds reduced costs.

    Only the first ``n_cols`` columns may enter the basis.
    """
    it = 0
    while True:
        cost = T[-1, :n_cols]
        entering = np.flatnonzero(cost < -PIVOT_TOL)
        if entering.size == 0:
            return it
        col = int(entering[0])
        column = T[:-1, col]
        pos = np.flatnonzero(column > PIVOT_TOL)
        if pos.size == 0:
            raise Unbounded("objective unbounded below")
        ratios = T[pos, -1] / column[pos]
        best = ratios.min()
        tied = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
        row = int(min(tied, key=lambda r: basis[r]))
        _pivot(T, row, col)
        basis[row] = col
        it += 1
        if it > max_iter:
            raise LPError(f"simplex exceeded {max_iter} iterations")


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, max_iter: int = 50_000) -> LPResult:
    c = np.asarray(c, dtype=float).reshape(-1)
    nv = c.size
    A_ub = np.zeros((0, nv)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).reshape(-1)
    A_eq = np.zeros((0, nv)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).reshape(-1)
    if A_ub.shape != (b_ub.size, nv) or A_eq.shape != (b_eq.size, nv):
        raise ValueError("constraint shapes do not match")

    n_ub, n_eq = b_ub.size, b_eq.size
    n_rows = n_ub + n_eq
    # columns: x | slacks | artificials | rhs
    n_struct = nv + n_ub
    T = np.zeros((n_rows + 1, n_struct + n_rows + 1))
    T[:n_ub, :nv] = A_ub
    T[:n_ub, nv:n_struct] = np.eye(n_ub)
    T[:n_ub, -1] = b_ub
    T[n_ub:n_rows, :nv] = A_eq
    T[n_ub:n_rows, -1] = b_eq
    neg = T[:n_rows, -1] < 0
    T[:n_rows][neg] *= -1.0
    # slacks of untouched <= rows start basic; every other row gets an artificial
    need_art = [r for r in range(n_rows) if r >= n_ub or neg[r]]
    n_art = len(need_art)
    T = np.hstack([T[:, :n_struct], np.zeros((n_rows + 1, n_art)), T[:, -1:]])
    basis = [nv + r for r in range(n_rows)]
    for k, r in enumerate(need_art):
        T[r, n_struct + k] = 1.0
        basis[r] = n_struct + k

    # phase 1: minimize the sum of artificials
    it = 0
    if n_art:
        T[-1, :] = 0.0
        T[-1, n_struct:n_struct + n_art] = 1.0
        T[-1] -= T[need_art].sum(axis=0)
        it = _run(T, basis, n_struct, max_iter)
        if -T[-1, -1] > FEASIBILITY_TOL * max(1.0, np.abs(T[:n_rows, -1]).max(initial=0.0)):
            raise Infeasible(f"phase-1 residual {-T[-1, -1]:.3g}")

    # drive remaining artificials out of the basis, dropping redundant rows
    keep = []
    for r in range(n_rows):
        if basis[r] >= n_struct:
            cand = np.flatnonzero(np.abs(T[r, :n_struct]) > 1e-9)
            if cand.size:
                _pivot(T, r, int(cand[0]))
                basis[r] = int(cand[0])
                keep.append(r)
        else:
            keep.append(r)
    T = np.vstack([T[keep], T[-1:]])
    basis = [basis[r] for r in keep]
    T = np.delete(T, np.s_[n_struct:n_struct + n_art], axis=1)

    # phase 2
    T[-1, :] = 0.0
    T[-1, :nv] = c
    for r, b in enumerate(basis):
        if T[-1, b] != 0.0:
            T[-1] -= T[-1, b] * T[r]
    it += _run(T, basis, n_struct, max_iter)

    x = np.zeros(n_struct)
    for r, b in enumerate(basis):
        x[b] = T[r, -1]
    x = x[:nv]
    x[np.abs(x) < 1e-13] = 0.0
    return LPResult(x=x, fun=float(c @ x), basis=tuple(basis), iterations=it)
