"""Numerical verification of curvature conditions for optimal transport.

The package checks computable necessary conditions for smoothness of
optimal maps induced by mechanical action costs: pointwise cross-
curvature sign conditions, their first- and second-order expansions
along the second argument, and a two-dimensional discriminant
inequality, each evaluated by independent numerical routes (closed-form
tensor contractions, a two-point Jacobi-field method, and direct
finite differencing of the cost).
"""

from .conformal import (
    ConformalSpec,
    classify,
    conformal_factor,
    conformal_metric,
    discriminant_polynomial,
    gauss_closed,
    nonneg_curvature_threshold,
)
from .dynamics import (
    CostResult,
    CurvePath,
    JacobiSolution,
    LemmaCheck,
    ParallelFrame,
    VariationFamily,
    c_exp,
    cost,
    jacobi_bvp,
    jacobi_residual,
    least_action_curve,
    lemma_suite,
    parallel_transport,
    shoot_velocity,
    variation_family,
)
from .errors import (
    CalibrationError,
    ConjugatePointError,
    DegeneratePlaneError,
    DerivativeOrderError,
    DimensionError,
    FieldSyntaxError,
    MetricDegenerateError,
    MtwError,
    NumericalError,
    PreconditionError,
    RankDeficiencyError,
    ShootingError,
)
from .expr import ScalarField, eval_partial, eval_partial_seq, parse_field
from .geometry import (
    GeometryJet,
    MetricField,
    PotentialField,
    christoffel,
    euclidean_metric,
    gram_schmidt,
    harmonic_potential,
    quartic_potential,
    riemann,
    rotate90,
    scale_metric,
    sectional,
    sphere_metric,
)
from .mtw import (
    CalibrationResult,
    CheckReport,
    ConditionVerdict,
    DiscriminantResult,
    MtwEvaluation,
    QuarticCheck,
    SamplingSpec,
    Witness,
    calibrate_normalization,
    check_a3w_necessary,
    discriminant_2d,
    evaluate_condition,
    first_order_vanishing,
    fit_kappa,
    g_quantity,
    mtw_direct_cost,
    mtw_first,
    mtw_jacobi,
    mtw_second,
    mtw_zeroth_general,
    mtw_zeroth_simplified,
    quartic_potential_check,
)

__all__ = [
    "CalibrationError",
    "CalibrationResult",
    "CheckReport",
    "ConditionVerdict",
    "ConformalSpec",
    "ConjugatePointError",
    "CostResult",
    "CurvePath",
    "DegeneratePlaneError",
    "DerivativeOrderError",
    "DimensionError",
    "DiscriminantResult",
    "FieldSyntaxError",
    "GeometryJet",
    "JacobiSolution",
    "LemmaCheck",
    "MetricDegenerateError",
    "MetricField",
    "MtwError",
    "MtwEvaluation",
    "NumericalError",
    "ParallelFrame",
    "PotentialField",
    "PreconditionError",
    "QuarticCheck",
    "RankDeficiencyError",
    "SamplingSpec",
    "ScalarField",
    "ShootingError",
    "VariationFamily",
    "Witness",
    "c_exp",
    "calibrate_normalization",
    "check_a3w_necessary",
    "christoffel",
    "classify",
    "conformal_factor",
    "conformal_metric",
    "cost",
    "discriminant_2d",
    "discriminant_polynomial",
    "euclidean_metric",
    "eval_partial",
    "eval_partial_seq",
    "evaluate_condition",
    "first_order_vanishing",
    "fit_kappa",
    "g_quantity",
    "gauss_closed",
    "gram_schmidt",
    "harmonic_potential",
    "jacobi_bvp",
    "jacobi_residual",
    "least_action_curve",
    "lemma_suite",
    "mtw_direct_cost",
    "mtw_first",
    "mtw_jacobi",
    "mtw_second",
    "mtw_zeroth_general",
    "mtw_zeroth_simplified",
    "nonneg_curvature_threshold",
    "parallel_transport",
    "parse_field",
    "quartic_potential",
    "quartic_potential_check",
    "riemann",
    "rotate90",
    "scale_metric",
    "sectional",
    "shoot_velocity",
    "sphere_metric",
    "variation_family",
]

__version__ = "0.1.0"
