"""Vertex enumeration and face-restricted quadratic stationarity, for desk-scale polytopes."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .core import ResourceLimitError

DEDUP_TOL = 1e-8


def dedup_points(points, tol: float = DEDUP_TOL) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for p in points:
        if not any(np.max(np.abs(p - q)) <= tol for q in out):
            out.append(p)
    return out


def enumerate_vertices(G, h, E, e, *, tol: float = 1e-9, cap: int = 10_000) -> list[np.ndarray]:
    """Vertices of ``{y : G y <= h, E y = e}`` by brute force over tight sets.

    Returned in lexicographic order of coordinates, duplicates removed.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    h = np.asarray(h, dtype=float).reshape(-1)
    E = np.atleast_2d(np.asarray(E, dtype=float))
    e = np.asarray(e, dtype=float).reshape(-1)
    d = G.shape[1] if G.size else E.shape[1]
    k = d - np.linalg.matrix_rank(E) if E.size else d
    found: list[np.ndarray] = []
    scale = max(1.0, float(np.abs(G).max(initial=0.0)), float(np.abs(h).max(initial=0.0)))
    for tight in combinations(range(G.shape[0]), k):
        M = np.vstack([E, G[list(tight)]]) if E.size else G[list(tight)]
        rhs = np.concatenate([e, h[list(tight)]]) if E.size else h[list(tight)]
        if np.linalg.matrix_rank(M, tol=1e-10 * scale) < d:
            continue
        y, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        if np.max(np.abs(M @ y - rhs), initial=0.0) > tol * scale:
            continue
        if np.any(G @ y - h > tol * scale):
            continue
        y[np.abs(y) < 1e-13] = 0.0
        if not any(np.max(np.abs(y - q)) <= DEDUP_TOL for q in found):
            found.append(y)
            if len(found) > cap:
                raise ResourceLimitError(f"vertex count exceeds cap {cap}")
    found.sort(key=tuple)
    return found


def simplex_face_vertices(G, h, n: int, **kw) -> list[np.ndarray]:
    """Vertices of ``{y in simplex : G y <= h}``."""
    G = np.atleast_2d(np.asarray(G, dtype=float)).reshape(-1, n)
    h = np.asarray(h, dtype=float).reshape(-1)
    G_all = np.vstack([G, -np.eye(n)])
    h_all = np.concatenate([h, np.zeros(n)])
    return enumerate_vertices(G_all, h_all, np.ones((1, n)), [1.0], **kw)


def best_response_regions(A, **kw) -> list[tuple[int, list[np.ndarray]]]:
    """For each row ``i``, the vertices of the set of column mixes against which ``i`` is a best response."""
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    out = []
    for i in range(m):
        G = np.array([A[l] - A[i] for l in range(m) if l != i]).reshape(-1, n)
        out.append((i, simplex_face_vertices(G, np.zeros(G.shape[0]), n, **kw)))
    return out


def best_response_vertices(A, **kw) -> list[np.ndarray]:
    """Union of the best-response region vertices: every candidate equalizing mix of the column player."""
    pts = [v for _, verts in best_response_regions(A, **kw) for v in verts]
    pts = dedup_points(pts)
    # larger supports first, then lexicographic
    pts.sort(key=lambda y: (-int(np.sum(y > 1e-12)), tuple(-y)))
    return pts


def face_stationary_point(Q, lin, C, d, support, *, tol: float = 1e-9):
    """Stationary point of ``lin.y + y'Qy`` on ``{C y = d, y_j = 0 for j not in support}``.

    Returns None when the stationarity system is inconsistent. When it is
    singular but consistent the objective is constant on the stationary set,
    so the least-squares representative is as good as any.
    """
    U = list(support)
    Q = np.asarray(Q, dtype=float)
    lin = np.asarray(lin, dtype=float)
    C = np.atleast_2d(np.asarray(C, dtype=float))
    d = np.asarray(d, dtype=float).reshape(-1)
    k = len(U)
    r = C.shape[0]
    K = np.zeros((k + r, k + r))
    K[:k, :k] = 2.0 * Q[np.ix_(U, U)]
    K[:k, k:] = C[:, U].T
    K[k:, :k] = C[:, U]
    rhs = np.concatenate([-lin[U], d])
    sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    scale = max(1.0, float(np.abs(K).max()), float(np.abs(rhs).max()))
    if np.max(np.abs(K @ sol - rhs)) > tol * scale:
        return None
    y = np.zeros(Q.shape[0])
    y[U] = sol[:k]
    return y
