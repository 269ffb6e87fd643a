"""Zero-sum repeated games where the minimizer pays to switch actions."""

from .core import (
    AffineMap,
    DegenerateGameError,
    PiecewiseLinearCurve,
    PreconditionError,
    ResourceLimitError,
    SolveReport,
    SolverFailure,
    StationaryStrategy,
    StructuralError,
    SwitchGame,
    load_game,
    normalize,
    parse_game,
)
from .estimators import StaticSolver, StationarySolver, ValueCurve
from .generalgamma import GeneralGameG, membership_G_S, quarter_bound, stationary_value_G, static_minimax_G
from .matrixgame import solve_matrix_game
from .staticsolve import static_minimax, trace_static_curve
from .stationary import acoe_solve, stationary_value_oracle, trace_value_curve
from .verify import evaluate_pair_exact, simulate_play

__version__ = "0.1.0"
