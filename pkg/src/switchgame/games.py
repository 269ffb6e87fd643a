"""Named small games used as regression fixtures and CLI examples."""

from __future__ import annotations

import numpy as np

from .core import SwitchGame


def uniform_costs(n: int) -> np.ndarray:
    return np.ones((n, n)) - np.eye(n)


def evasion() -> SwitchGame:
    return SwitchGame(np.diag([1.0, 2.0, 3.0]), uniform_costs(3), name="evasion")


def rock_paper_scissors(delta: float = 0.0) -> SwitchGame:
    """Rock-paper-scissors where switching clockwise costs ``1+delta`` and back costs ``1-delta``."""
    A = np.array([[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]])
    hi, lo = 1.0 + delta, 1.0 - delta
    S = np.array([[0.0, hi, hi], [lo, 0.0, hi], [lo, lo, 0.0]])
    return SwitchGame(A, S, name=f"rps(delta={delta:g})")


def cyclic_costs() -> SwitchGame:
    """Staying put or stepping one column to the right is free; everything else costs 1."""
    A = np.array([[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]])
    S = np.array([[0, 0, 1, 1], [1, 0, 0, 1], [1, 1, 0, 0], [0, 1, 1, 0]], dtype=float)
    return SwitchGame(A, S, name="cyclic")


def curved_static() -> SwitchGame:
    """Static minimax is not piecewise linear in c for this game."""
    A = np.array([[-200.0, 1.0, 200.0], [200.0, 1.0, -200.0]])
    S = np.array([[0.0, 1.0, 100.0], [1.0, 0.0, 1.0], [100.0, 1.0, 0.0]])
    return SwitchGame(A, S, name="curved-static")


def identity_crossing() -> SwitchGame:
    A = np.eye(3)
    S = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.0, 0.0]])
    return SwitchGame(A, S, name="identity")


def quarter_tight_tensor(n: int = 5) -> np.ndarray:
    """One-row tensor on ``n`` states: moving one step forward pays 0, anything else pays 1."""
    r = np.ones((n, 1, n))
    for s in range(n):
        r[s, 0, (s + 1) % n] = 0.0
    return r


def two_state_tensor() -> np.ndarray:
    """Two-state game whose Player-1 best reply to a static mix depends on the state."""
    r = np.zeros((2, 2, 2))
    r[0] = [[1.0, 0.0], [1.0, 1.0]]
    r[1] = [[1.0, 1.0], [0.0, 1.0]]
    return r


REGRESSION_GAMES = {
    "evasion": evasion,
    "rps": rock_paper_scissors,
    "rps-third": lambda: rock_paper_scissors(1.0 / 3.0),
    "rps-one": lambda: rock_paper_scissors(1.0),
    "cyclic": cyclic_costs,
    "curved-static": curved_static,
    "identity": identity_crossing,
}
