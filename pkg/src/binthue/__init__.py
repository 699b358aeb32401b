"""Small solutions of the binomial Thue equations x^n - m*y^n = +-1."""

from .cf_engine import HAVE_COMPILED, ExpansionResult, Side, expand_root, validate_convergent
from .errors import (
    CheckpointMismatch,
    FixtureParseError,
    PrecisionError,
    PrecisionExhausted,
    ReducibleInputError,
    ThueError,
)
from .numerics import PrecisionPolicy, RealBall, floor_of_ball, integer_nth_root, nth_root_ball
from .oracle import OracleQuery, brute_solve
from .runner import SweepConfig, SweepReport, compare_fixture, packaged_fixture, sweep
from .thue_core import (
    DEFAULT_C,
    BoundSet,
    EquationInstance,
    SolutionTriple,
    c1_of,
    c2_of,
    compute_bounds,
    denominator_bound,
    m_max_for_direct_test,
    small_y_bound,
    solve_instance,
    verify_exact,
)

__version__ = "0.1.0"
