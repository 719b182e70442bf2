"""Optimal tax deduction under a Weibull-type penalisation risk.

A taxpayer deducting ``m`` faces a detection probability driven by the
hazard rate ``a m^{k-1}`` and, on detection, repays the deducted tax scaled
by the effective penalty ``B = beta (1 + z)``.  The expected-income optimum
has a closed form through the principal Lambert W branch:

    m* = ((1 - W k) / a)^{1/k},    W = W0((1 - 1/B) e^{1/k} / k)

The package provides that closed form next to an independent numeric
maximizer, analytic comparative statics checked against finite differences,
a from-scratch W0 evaluator with residual-certified accuracy, batch sweeps,
and a deterministic command-line interface (``deductopt``).
"""
from .errors import (
    DegenerateObjective,
    DomainError,
    ModelError,
    NoInteriorOptimum,
    ParameterError,
    QuadratureFailure,
    SecondOrderViolation,
    SingularHazard,
    SpecError,
    StaticsUnstable,
)
from .lambertw import BRANCH_POINT, LambertResult, w0
from .penalty import (
    HazardParams,
    Problem,
    TaxPolicy,
    cumulative_hazard,
    effective_penalty,
    expected_after_tax_income,
    hazard_rate,
    penalty_cdf,
    penalty_cdf_closed_support,
    penalty_cdf_from_hazard,
    penalty_pdf,
    survival,
)
from .solver import (
    Solution,
    StaticsReport,
    comparative_statics,
    dk_sign,
    foc_residual,
    has_interior_optimum,
    interior_upper_bound,
    lambert_argument,
    min_shape_for_interior,
    soc_margin,
    solve_closed_form,
    solve_numeric,
)
from .sweep import (
    AXIS_ORDER,
    AxisRange,
    CurveSample,
    GridSpec,
    SweepRecord,
    enforcement_shift,
    run_sweep,
    sample_curves,
)

__version__ = "0.1.0"

__all__ = [
    "AXIS_ORDER",
    "AxisRange",
    "BRANCH_POINT",
    "CurveSample",
    "DegenerateObjective",
    "DomainError",
    "GridSpec",
    "HazardParams",
    "LambertResult",
    "ModelError",
    "NoInteriorOptimum",
    "ParameterError",
    "Problem",
    "QuadratureFailure",
    "SecondOrderViolation",
    "SingularHazard",
    "Solution",
    "SpecError",
    "StaticsReport",
    "StaticsUnstable",
    "SweepRecord",
    "TaxPolicy",
    "comparative_statics",
    "cumulative_hazard",
    "dk_sign",
    "effective_penalty",
    "enforcement_shift",
    "expected_after_tax_income",
    "foc_residual",
    "has_interior_optimum",
    "hazard_rate",
    "interior_upper_bound",
    "lambert_argument",
    "min_shape_for_interior",
    "penalty_cdf",
    "penalty_cdf_closed_support",
    "penalty_cdf_from_hazard",
    "penalty_pdf",
    "run_sweep",
    "sample_curves",
    "soc_margin",
    "solve_closed_form",
    "solve_numeric",
    "survival",
    "w0",
    "__version__",
]
