"""Domain types, validation and normalization shared by every solver."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

FEAS_TOL = 1e-9
VALUE_TOL = 1e-7
CLAMP_TOL = 1e-12


class SwitchGameError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(SwitchGameError, ValueError):
    """Inputs have inconsistent shapes or are not parseable."""


class DegenerateGameError(SwitchGameError, ValueError):
    pass


class PreconditionError(SwitchGameError, ValueError):
    """An operation was called on a game outside its domain."""


class ResourceLimitError(SwitchGameError, RuntimeError):
    pass


class SolverFailure(SwitchGameError, RuntimeError):
    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SwitchGame:
    """Stage payoffs ``A`` (m x n, paid by the column player) and switching costs ``S`` (n x n).

    Construction checks shapes only; use :func:`validate` for the model
    constraints so invalid games can still be inspected and reported.
    """

    A: np.ndarray
    S: np.ndarray
    name: str = ""

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        S = np.atleast_2d(np.asarray(self.S, dtype=float))
        if A.ndim != 2 or S.ndim != 2:
            raise StructuralError("A and S must be 2-dimensional")
        if S.shape[0] != S.shape[1]:
            raise StructuralError(f"S must be square, got shape {S.shape}")
        if A.shape[1] != S.shape[0]:
            raise StructuralError(
                f"A has {A.shape[1]} columns but S is {S.shape[0]}x{S.shape[1]}"
            )
        if A.size == 0:
            raise StructuralError("A must be non-empty")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(S))):
            raise StructuralError("A and S must have finite entries")
        object.__setattr__(self, "A", _readonly(A))
        object.__setattr__(self, "S", _readonly(S))

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def S_sym(self) -> np.ndarray:
        return (self.S + self.S.T) / 2.0

    @property
    def is_canonical(self) -> bool:
        nz = self.S[self.S != 0]
        s_ok = nz.size > 0 and abs(nz.min() - 1.0) <= FEAS_TOL
        return bool(
            s_ok
            and abs(self.A.min()) <= FEAS_TOL
            and abs(self.A.max() - 1.0) <= FEAS_TOL
        )

    @property
    def is_uniform(self) -> bool:
        n = self.n
        return bool(np.allclose(self.S, np.ones((n, n)) - np.eye(n), atol=1e-12, rtol=0))

    @property
    def is_symmetric(self) -> bool:
        return bool(np.allclose(self.S, self.S.T, atol=1e-12, rtol=0))

    @property
    def has_free_switches(self) -> bool:
        off = ~np.eye(self.n, dtype=bool)
        return bool(np.any(self.S[off] <= 0.0))

    def with_S(self, S) -> "SwitchGame":
        return SwitchGame(self.A, S, self.name)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"A": self.A.tolist(), "S": self.S.tolist()}
        if self.name:
            d["name"] = self.name
        return d


def validate(game: SwitchGame) -> list[str]:
    """List every violated model constraint; an empty list means the game is valid.

    Indices in messages are 1-based, matching the usual matrix notation.
    """
    problems = []
    S = game.S
    for j in range(game.n):
        if S[j, j] != 0.0:
            problems.append(f"S[{j + 1},{j + 1}] = {S[j, j]:g}: diagonal must be zero")
    for k in range(game.n):
        for j in range(game.n):
            if k != j and S[k, j] < 0.0:
                problems.append(f"S[{k + 1},{j + 1}] = {S[k, j]:g}: must be nonnegative")
    return problems


@dataclass(frozen=True)
class AffineMap:
    """How a normalized game relates to the original one.

    ``A = a_shift + a_scale * A'`` and ``S = s_scale * S'``, so the original
    game at weight ``c`` is the normalized game at ``c * s_scale / a_scale``,
    with values mapped back through ``a_shift + a_scale * value``.
    """

    a_scale: float = 1.0
    a_shift: float = 0.0
    s_scale: float = 1.0

    @property
    def is_identity(self) -> bool:
        return self.a_scale == 1.0 and self.a_shift == 0.0 and self.s_scale == 1.0

    def c_to_normalized(self, c):
        return c * self.s_scale / self.a_scale

    def c_to_original(self, c_norm):
        return c_norm * self.a_scale / self.s_scale

    def value_to_original(self, value):
        return self.a_shift + self.a_scale * value

    def value_to_normalized(self, value):
        return (value - self.a_shift) / self.a_scale

    def compose(self, inner: "AffineMap") -> "AffineMap":
        # self maps original -> mid, inner maps mid -> normalized
        return AffineMap(
            a_scale=self.a_scale * inner.a_scale,
            a_shift=self.a_shift + self.a_scale * inner.a_shift,
            s_scale=self.s_scale * inner.s_scale,
        )


def normalize(game: SwitchGame) -> tuple[SwitchGame, AffineMap]:
    problems = validate(game)
    if problems:
        raise PreconditionError("cannot normalize an invalid game: " + "; ".join(problems))
    lo, hi = float(game.A.min()), float(game.A.max())
    if hi - lo <= 0.0:
        raise DegenerateGameError("A is constant; the game has no strategic content")
    nz = game.S[game.S != 0]
    if nz.size == 0:
        raise DegenerateGameError("S is all zero; switching costs are vacuous")
    s_scale = float(nz.min())
    a_scale = hi - lo
    if game.is_canonical:
        return game, AffineMap()
    A = (game.A - lo) / a_scale
    S = game.S / s_scale
    return SwitchGame(A, S, game.name), AffineMap(a_scale, lo, s_scale)


def as_mixed_action(probs, *, size: int | None = None, tol: float = FEAS_TOL) -> np.ndarray:
    """Validate a probability vector, clamping LP round-off below zero."""
    p = np.array(probs, dtype=float).reshape(-1)
    if size is not None and p.size != size:
        raise StructuralError(f"mixed action has length {p.size}, expected {size}")
    if np.any(p < -CLAMP_TOL):
        raise ValueError(f"negative probability {p.min():g}")
    p[p < 0] = 0.0
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise ValueError(f"probabilities sum to {total!r}, not 1")
    p = p / total
    p.setflags(write=False)
    return p


def pure_action(j: int, size: int) -> np.ndarray:
    p = np.zeros(size)
    p[j] = 1.0
    p.setflags(write=False)
    return p


@dataclass(frozen=True)
class StationaryStrategy:
    """One mixed action per state, where state = previous column of Player 2."""

    per_state: np.ndarray
    owner: str = "player-2"

    def __post_init__(self):
        rows = [as_mixed_action(r) for r in np.atleast_2d(np.asarray(self.per_state, dtype=float))]
        object.__setattr__(self, "per_state", _readonly(np.vstack(rows)))
        if self.owner not in ("player-1", "player-2"):
            raise ValueError(f"owner must be player-1 or player-2, got {self.owner!r}")

    @classmethod
    def static(cls, y, n_states: int, owner: str = "player-2") -> "StationaryStrategy":
        return cls(np.tile(np.asarray(y, dtype=float), (n_states, 1)), owner)

    @property
    def n_states(self) -> int:
        return self.per_state.shape[0]

    @property
    def is_static(self) -> bool:
        return bool(np.allclose(self.per_state, self.per_state[0], atol=1e-9))

    def __getitem__(self, s: int) -> np.ndarray:
        return self.per_state[s]

    def supports(self, tol: float = 1e-9) -> list[tuple[int, ...]]:
        return [tuple(int(j) for j in np.flatnonzero(row > tol)) for row in self.per_state]

    def to_list(self) -> list[list[float]]:
        return self.per_state.tolist()


def snap_rational(x: float, max_den: int = 10_000, tol: float = 1e-8) -> Fraction | None:
    """Nearby small-denominator rational, or None when nothing is within ``tol``."""
    if not np.isfinite(x):
        return None
    f = Fraction(float(x)).limit_denominator(max_den)
    return f if abs(float(f) - x) <= tol else None


@dataclass(frozen=True)
class PiecewiseLinearCurve:
    """Continuous piecewise-linear function on ``[0, inf)``.

    Piece ``k`` is ``intercepts[k] + slopes[k] * c`` on
    ``[breakpoints[k], breakpoints[k+1]]``; the last piece extends to infinity.
    ``tail_exact`` is False when the last piece was only verified up to ``c_max``.
    """

    breakpoints: tuple[float, ...]
    intercepts: tuple[float, ...]
    slopes: tuple[float, ...]
    c_max: float = float("inf")
    tail_exact: bool = True
    strategies: tuple[Any, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if not (len(self.breakpoints) == len(self.intercepts) == len(self.slopes)):
            raise StructuralError("breakpoints, intercepts and slopes must have equal length")
        if not self.breakpoints or self.breakpoints[0] != 0.0:
            raise StructuralError("breakpoints must start at 0")
        if any(b2 <= b1 for b1, b2 in zip(self.breakpoints, self.breakpoints[1:])):
            raise StructuralError("breakpoints must be strictly ascending")

    @property
    def n_segments(self) -> int:
        return len(self.breakpoints)

    @property
    def interior_breakpoints(self) -> tuple[float, ...]:
        return self.breakpoints[1:]

    def snapped_breakpoints(self) -> list[Fraction | None]:
        return [snap_rational(b) for b in self.interior_breakpoints]

    def segment_index(self, c) -> np.ndarray:
        return np.searchsorted(np.asarray(self.breakpoints), np.asarray(c, dtype=float), side="right") - 1

    def __call__(self, c):
        c_arr = np.asarray(c, dtype=float)
        k = np.clip(self.segment_index(c_arr), 0, None)
        out = np.asarray(self.intercepts)[k] + np.asarray(self.slopes)[k] * c_arr
        return float(out) if np.ndim(out) == 0 else out

    def violations(self, tol: float = VALUE_TOL) -> list[str]:
        """Continuity, monotonicity and concavity checks."""
        out = []
        for k in range(1, self.n_segments):
            b = self.breakpoints[k]
            left = self.intercepts[k - 1] + self.slopes[k - 1] * b
            right = self.intercepts[k] + self.slopes[k] * b
            if abs(left - right) > tol:
                out.append(f"discontinuity {left - right:.3g} at c={b:.9g}")
            if self.slopes[k] > self.slopes[k - 1] + tol:
                out.append(f"slope increases at c={b:.9g}")
        for k, s in enumerate(self.slopes):
            if s < -tol:
                out.append(f"negative slope {s:.3g} on segment {k}")
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "breakpoints": list(self.interior_breakpoints),
            "breakpoints_snapped": [str(f) if f is not None else None for f in self.snapped_breakpoints()],
            "pieces": [
                {"start": b, "intercept": a, "slope": s}
                for b, a, s in zip(self.breakpoints, self.intercepts, self.slopes)
            ],
            "c_max": self.c_max,
            "tail_exact": self.tail_exact,
        }


@dataclass(frozen=True)
class SolveReport:
    value: float
    strategy_p2: Any
    strategy_p1: Any
    method: str
    c: float
    continuation_payoffs: tuple[float, ...] | None = None
    oracle_value: float | None = None
    oracle_gap: float | None = None
    tolerance: float = 1e-6

    @property
    def oracle_ok(self) -> bool | None:
        if self.oracle_gap is None:
            return None
        return self.oracle_gap <= self.tolerance

    def to_dict(self) -> dict[str, Any]:
        def conv(s):
            if s is None:
                return None
            if isinstance(s, StationaryStrategy):
                return s.to_list()
            return np.asarray(s).tolist()

        return {
            "c": self.c,
            "value": self.value,
            "method": self.method,
            "strategy_p2": conv(self.strategy_p2),
            "strategy_p1": conv(self.strategy_p1),
            "continuation_payoffs": list(self.continuation_payoffs) if self.continuation_payoffs is not None else None,
            "oracle_value": self.oracle_value,
            "oracle_gap": self.oracle_gap,
            "oracle_ok": self.oracle_ok,
            "tolerance": self.tolerance,
        }


# -- game files ---------------------------------------------------------------

_GAME_KEYS = {"A", "S", "c", "c_range", "name"}


def _parse_json(text: str, source: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructuralError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise StructuralError(f"{source}: top level must be an object")
    return doc


def _matrix(value, key: str, source: str) -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise StructuralError(f"{source}: {key!r} must be a non-empty array of rows")
    widths = {len(r) for r in value}
    if len(widths) != 1:
        raise StructuralError(f"{source}: rows of {key!r} have different lengths {sorted(widths)}")
    try:
        return np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise StructuralError(f"{source}: {key!r} must contain only numbers") from None


@dataclass(frozen=True)
class GameFile:
    game: SwitchGame
    c: float | None = None
    c_range: tuple[float, float] | None = None


def parse_game(text: str, source: str = "<string>") -> GameFile:
    doc = _parse_json(text, source)
    unknown = set(doc) - _GAME_KEYS
    if unknown:
        raise StructuralError(f"{source}: unknown keys {sorted(unknown)}")
    for key in ("A", "S"):
        if key not in doc:
            raise StructuralError(f"{source}: missing key {key!r}")
    A = _matrix(doc["A"], "A", source)
    S = _matrix(doc["S"], "S", source)
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise StructuralError(f"{source}: 'name' must be a string")
    game = SwitchGame(A, S, name)
    c = doc.get("c")
    if c is not None and (not isinstance(c, (int, float)) or isinstance(c, bool) or c < 0):
        raise StructuralError(f"{source}: 'c' must be a nonnegative number")
    c_range = doc.get("c_range")
    if c_range is not None:
        if (
            not isinstance(c_range, list)
            or len(c_range) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in c_range)
            or not 0 <= c_range[0] < c_range[1]
        ):
            raise StructuralError(f"{source}: 'c_range' must be [lo, hi] with 0 <= lo < hi")
        c_range = (float(c_range[0]), float(c_range[1]))
    return GameFile(game, None if c is None else float(c), c_range)


def load_game(path: str | Path) -> GameFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise StructuralError(f"{path}: {exc.strerror}") from None
    return parse_game(text, str(path))


def dump_game(game: SwitchGame, c: float | None = None, c_range: Sequence[float] | None = None) -> str:
    d = game.to_dict()
    if c is not None:
        d["c"] = c
    if c_range is not None:
        d["c_range"] = list(c_range)
    return json.dumps(d, indent=2)
