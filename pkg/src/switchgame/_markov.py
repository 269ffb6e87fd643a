"""Finite Markov chain helpers: closed classes and stationary distributions."""

from __future__ import annotations

import numpy as np
from scipy.sparse.csgraph import connected_components


def closed_classes(P, tol: float = 1e-12) -> list[list[int]]:
    """Recurrent classes of the chain, as sorted state lists ordered by smallest member."""
    P = np.asarray(P, dtype=float)
    adj = P > tol
    _, labels = connected_components(adj.astype(int), directed=True, connection="strong")
    out = []
    for lab in np.unique(labels):
        members = np.flatnonzero(labels == lab)
        outside = np.setdiff1d(np.arange(P.shape[0]), members)
        if not adj[np.ix_(members, outside)].any():
            out.append([int(s) for s in members])
    out.sort(key=lambda cls: cls[0])
    return out


def stationary_on_class(P, cls: list[int]) -> np.ndarray:
    """Stationary distribution of the chain restricted to closed class ``cls``, embedded in full length."""
    P = np.asarray(P, dtype=float)
    sub = P[np.ix_(cls, cls)]
    k = len(cls)
    M = np.vstack([sub.T - np.eye(k), np.ones((1, k))])
    rhs = np.zeros(k + 1)
    rhs[-1] = 1.0
    pi_c, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    pi_c = np.clip(pi_c, 0.0, None)
    pi = np.zeros(P.shape[0])
    pi[cls] = pi_c / pi_c.sum()
    return pi


def class_averages(P, stage) -> list[tuple[list[int], np.ndarray, float]]:
    """Long-run average of ``stage`` (per-state reward) on each closed class."""
    stage = np.asarray(stage, dtype=float)
    out = []
    for cls in closed_classes(P):
        pi = stationary_on_class(P, cls)
        out.append((cls, pi, float(pi @ stage)))
    return out
