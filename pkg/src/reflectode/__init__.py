"""Linear differential equations and systems with reflection ``u(-t)``.

Modules:
    matfun: series pairs, commuting square roots and logarithms, block determinants.
    opalg: exact algebra of operators ``phi* P(D) + Q(D)`` and their solution bases.
    sysfun: fundamental matrices of ``F u'(t) + G u'(-t) + A u(t) + B u(-t) = 0``.
    varpar: variation of parameters for the forced system.
    green: Green's functions of initial and two-point boundary value problems.
    oracle: verification through the doubled ordinary system.
    cli: command-line front end (``reflectode``).
"""

from .errors import (
    BranchCutError,
    ConvergenceError,
    DegenerateReductionError,
    PreconditionError,
    QuadratureError,
    ReflectionError,
    SingularMatrixError,
    SingularPathError,
    UnsolvableBVPError,
    UnsupportedCaseError,
)
from .exppoly import ExpPoly
from .expression import parse_expression, parse_operator
from .green import (
    PiecewiseGreen,
    green_bvp,
    green_ivp,
    mx_matrix,
    solve_bvp,
    solve_ivp,
)
from .matfun import (
    SeriesPair,
    block_det_commuting,
    commuting_log,
    commuting_sqrt,
    cosh_sinh,
    expm,
    series_pair,
)
from .opalg import (
    ReflectionOperator,
    apply_to_exppoly,
    compose,
    composed_coefficients,
    reduction,
    refined_reduction,
    solution_basis,
)
from .poly import RationalPoly
from .problem import ProblemSpec
from .sysfun import (
    FundamentalPair,
    ReflectionSystem,
    associated_Y,
    block_X,
    companion_system,
    fundamental_closed,
    fundamental_series,
    matrix_E,
    matrix_paf,
    singular_locus,
)
from .varpar import ForcingFunction, even_odd_split, vp_solve, vp_solve_grid

__version__ = "0.1.0"

__all__ = [
    "BranchCutError",
    "ConvergenceError",
    "DegenerateReductionError",
    "PreconditionError",
    "QuadratureError",
    "ReflectionError",
    "SingularMatrixError",
    "SingularPathError",
    "UnsolvableBVPError",
    "UnsupportedCaseError",
    "ExpPoly",
    "parse_expression",
    "parse_operator",
    "PiecewiseGreen",
    "green_bvp",
    "green_ivp",
    "mx_matrix",
    "solve_bvp",
    "solve_ivp",
    "SeriesPair",
    "block_det_commuting",
    "commuting_log",
    "commuting_sqrt",
    "cosh_sinh",
    "expm",
    "series_pair",
    "ReflectionOperator",
    "apply_to_exppoly",
    "compose",
    "composed_coefficients",
    "reduction",
    "refined_reduction",
    "solution_basis",
    "RationalPoly",
    "ProblemSpec",
    "FundamentalPair",
    "ReflectionSystem",
    "associated_Y",
    "block_X",
    "companion_system",
    "fundamental_closed",
    "fundamental_series",
    "matrix_E",
    "matrix_paf",
    "singular_locus",
    "ForcingFunction",
    "even_odd_split",
    "vp_solve",
    "vp_solve_grid",
]
