"""Multichain policy iteration for an average-cost MDP whose actions are next-state distributions.

State ``s`` offers candidate actions ``cands[s][k]`` (a distribution over
next states) at cost ``costs[s][k]``. This is the control problem Player 2
faces once Player 1's stage best responses are folded into the costs.
"""

from __future__ import annotations

import numpy as np

from ._markov import closed_classes
from .core import SolverFailure


def evaluate_policy(P: np.ndarray, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gain and bias of a fixed policy, bias pinned to 0 at the first state of each closed class."""
    n = P.shape[0]
    I = np.eye(n)
    rows = [np.hstack([I - P, np.zeros((n, n))]), np.hstack([I, I - P])]
    rhs = [np.zeros(n), r]
    for cls in closed_classes(P):
        e = np.zeros((1, 2 * n))
        e[0, n + cls[0]] = 1.0
        rows.append(e)
        rhs.append(np.zeros(1))
    sol, *_ = np.linalg.lstsq(np.vstack(rows), np.concatenate(rhs), rcond=None)
    return sol[:n], sol[n:]


def policy_iteration(cands, costs, init, *, tol: float = 1e-10, max_iter: int = 500):
    """Howard's multichain policy iteration (minimization).

    The current action is kept on ties, so the result depends only on
    ``init`` and the candidate order.
    """
    n = len(cands)
    policy = np.array(init, dtype=int)
    for it in range(1, max_iter + 1):
        P = np.array([cands[s][policy[s]] for s in range(n)])
        r = np.array([costs[s][policy[s]] for s in range(n)])
        g, h = evaluate_policy(P, r)
        new = policy.copy()
        changed = False
        Pg = [cands[s] @ g for s in range(n)]
        for s in range(n):
            if Pg[s][policy[s]] > Pg[s].min() + tol:
                new[s] = int(np.argmin(Pg[s]))
                changed = True
        if not changed:
            for s in range(n):
                ok = Pg[s] <= Pg[s].min() + tol
                vals = np.where(ok, costs[s] + cands[s] @ h, np.inf)
                k = int(np.argmin(vals))
                if vals[policy[s]] > vals[k] + tol:
                    new[s] = k
                    changed = True
        if not changed:
            return policy, g, h, it
        policy = new
    raise SolverFailure(f"policy iteration did not converge in {max_iter} iterations")
