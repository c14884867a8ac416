"""Gauss and minimal cubature rules for reflection-symmetric weights on
the square and its folded curved domain, with independent moment
certification."""

from .biangle import (
    biangle_moment,
    eval_koornwinder,
    gauss_cubature_biangle,
    in_omega,
    map_x_to_u,
    split_u_to_x,
)
from .composed import (
    OrbitSet,
    composed_op_identity_check,
    composed_rule,
    folding_identity_check,
    orbit_sets,
    preimage_angles,
    w_ell_value,
)
from .opq1d import (
    EigensolverError,
    QuadratureRule1D,
    RecurrenceCoeffs,
    ZeroCountError,
    diagonal_zero_set,
    eval_jacobi_standard,
    eval_jacobi_standard_deriv,
    eval_orthonormal,
    eval_orthonormal_deriv,
    gauss_rule,
    jacobi_recurrence,
    quasi_S,
)
from .oracle import (
    BiangleMomentOracle,
    ComposedMomentOracle,
    OracleConvergenceError,
    SquareMomentOracle,
    angular_moment_ladder,
    certify,
    chebyshev_moment_1d,
    composed_moment,
    composed_moments,
    square_moment,
    square_moments,
)
from .rules import ConstructionError, CubatureRule2D, ExactnessReport, WeightSpec
from .squaremin import (
    eval_Q_basis,
    fold_to_biangle,
    merge_close_nodes,
    minimal_rule_even,
    minimal_rule_odd,
    moller_bound,
    weight_W,
)

__version__ = "0.1.0"

__all__ = [
    "BiangleMomentOracle",
    "ComposedMomentOracle",
    "ConstructionError",
    "CubatureRule2D",
    "EigensolverError",
    "ExactnessReport",
    "OracleConvergenceError",
    "OrbitSet",
    "QuadratureRule1D",
    "RecurrenceCoeffs",
    "WeightSpec",
    "ZeroCountError",
    "angular_moment_ladder",
    "biangle_moment",
    "certify",
    "chebyshev_moment_1d",
    "composed_moment",
    "composed_moments",
    "composed_op_identity_check",
    "composed_rule",
    "diagonal_zero_set",
    "eval_Q_basis",
    "eval_jacobi_standard",
    "eval_jacobi_standard_deriv",
    "eval_koornwinder",
    "eval_orthonormal",
    "eval_orthonormal_deriv",
    "fold_to_biangle",
    "folding_identity_check",
    "gauss_cubature_biangle",
    "gauss_rule",
    "in_omega",
    "jacobi_recurrence",
    "map_x_to_u",
    "merge_close_nodes",
    "minimal_rule_even",
    "minimal_rule_odd",
    "moller_bound",
    "orbit_sets",
    "preimage_angles",
    "quasi_S",
    "split_u_to_x",
    "square_moment",
    "square_moments",
    "w_ell_value",
    "weight_W",
]
