"""Penalisation risk model and the taxpayer's objective.

The probability of being penalised when deducting ``m`` follows a
Weibull-type law induced by the hazard rate ``lambda(m) = a * m**(k-1)``:

* cumulative hazard   ``Lambda(m) = (a/k) * m**k``
* detection cdf       ``F(m) = 1 - exp(-Lambda(m))``
* detection density   ``f(m) = lambda(m) * exp(-Lambda(m))``

``k`` is the shape (k > 1 convex escalation, k = 1 exponential, k < 1 a
hazard pole at m = 0) and ``a`` the enforcement scale.  All cdf/survival
code goes through ``expm1``/``exp`` so that small detection probabilities
keep full relative accuracy.

The taxpayer earns pre-tax income ``pi``, pays rate ``t``, deducts ``m``,
and on detection repays the deducted tax times the effective penalty
``B = beta * (1 + z)`` (recovery share ``beta``, surcharge ``z``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import DomainError, ParameterError, QuadratureFailure, SingularHazard

__all__ = [
    "HazardParams",
    "Problem",
    "TaxPolicy",
    "cumulative_hazard",
    "effective_penalty",
    "expected_after_tax_income",
    "hazard_rate",
    "penalty_cdf",
    "penalty_cdf_closed_support",
    "penalty_cdf_from_hazard",
    "penalty_pdf",
    "survival",
]

_QUAD_EPS = 1e-12
_QUAD_LIMIT = 200
_QUAD_ABSERR_CAP = 1e-10


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class TaxPolicy:
    """Tax rate and penalty terms.

    t    : marginal tax rate, in [0, 1]
    beta : recovered share of the evaded tax, in [0, 1]
    z    : proportional surcharge on the recovered amount, >= 0
    """

    t: float
    beta: float
    z: float

    def __post_init__(self) -> None:
        t = _require_finite("t", self.t)
        beta = _require_finite("beta", self.beta)
        z = _require_finite("z", self.z)
        if not 0.0 <= t <= 1.0:
            raise ParameterError(f"t must be in [0, 1], got {t!r}")
        if not 0.0 <= beta <= 1.0:
            raise ParameterError(f"beta must be in [0, 1], got {beta!r}")
        if z < 0.0:
            raise ParameterError(f"z must be >= 0, got {z!r}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "z", z)


@dataclass(frozen=True)
class HazardParams:
    """Detection hazard ``lambda(m) = a * m**(k-1)``.

    a : enforcement scale, > 0
    k : hazard shape, > 0
    """

    a: float
    k: float

    def __post_init__(self) -> None:
        a = _require_finite("a", self.a)
        k = _require_finite("k", self.k)
        if a <= 0.0:
            raise ParameterError(f"a must be > 0, got {a!r}")
        if k <= 0.0:
            raise ParameterError(f"k must be > 0, got {k!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "k", k)


@dataclass(frozen=True)
class Problem:
    """One taxpayer's decision problem: income, policy, detection hazard."""

    pi: float
    policy: TaxPolicy
    hazard: HazardParams

    def __post_init__(self) -> None:
        pi = _require_finite("pi", self.pi)
        if pi <= 0.0:
            raise ParameterError(f"pi must be > 0, got {pi!r}")
        object.__setattr__(self, "pi", pi)
        if not isinstance(self.policy, TaxPolicy):
            raise ParameterError("policy must be a TaxPolicy")
        if not isinstance(self.hazard, HazardParams):
            raise ParameterError("hazard must be a HazardParams")


def effective_penalty(policy: TaxPolicy) -> float:
    """Combined clawback multiplier B = beta * (1 + z)."""
    return policy.beta * (1.0 + policy.z)


def _check_deduction(m: float) -> float:
    m = float(m)
    if math.isnan(m) or m < 0.0:
        raise DomainError(f"deduction m must be >= 0, got {m!r}")
    return m


def hazard_rate(m: float, hazard: HazardParams) -> float:
    """Instantaneous detection rate a * m**(k-1)."""
    m = _check_deduction(m)
    if m == 0.0 and hazard.k < 1.0:
        raise SingularHazard(
            f"hazard rate diverges at m = 0 for shape k = {hazard.k!r} < 1"
        )
    return hazard.a * m ** (hazard.k - 1.0)


def cumulative_hazard(m: float, hazard: HazardParams) -> float:
    """Integral of the hazard rate from 0 to m: (a/k) * m**k."""
    m = _check_deduction(m)
    return (hazard.a / hazard.k) * m**hazard.k


def survival(m: float, hazard: HazardParams) -> float:
    """P(not penalised) = exp(-Lambda(m)); the stable form of 1 - F(m)."""
    return math.exp(-cumulative_hazard(m, hazard))


def penalty_cdf(m: float, hazard: HazardParams) -> float:
    """P(penalised at deduction m) = 1 - exp(-Lambda(m)), via expm1."""
    return -math.expm1(-cumulative_hazard(m, hazard))


def penalty_pdf(m: float, hazard: HazardParams) -> float:
    """Detection density f(m) = lambda(m) * exp(-Lambda(m))."""
    return hazard_rate(m, hazard) * survival(m, hazard)


def expected_after_tax_income(m: float, problem: Problem) -> float:
    """Expected income at deduction m.

    Grouped as base + deducted slice - expected clawback so the m = 0
    baseline is exactly pi * (1 - t).
    """
    m = _check_deduction(m)
    t = problem.policy.t
    b = effective_penalty(problem.policy)
    cdf = penalty_cdf(m, problem.hazard)
    return problem.pi * (1.0 - t) + t * m - cdf * b * m * t


def penalty_cdf_closed_support(m: float, problem: Problem) -> float:
    """Detection cdf of the bounded-support variant, evaluated verbatim.

    F(m) = 1 - (1 - m**k / pi) ** (a * pi / k) on 0 <= m <= pi with
    m**k <= pi.  Note the curve reaches 1 where m**k = pi, which coincides
    with the upper support edge m = pi only when k = 1 or pi = 1; it is
    evaluated exactly as defined and tests characterise that behaviour.
    """
    m = _check_deduction(m)
    a, k = problem.hazard.a, problem.hazard.k
    pi = problem.pi
    if m > pi:
        raise DomainError(f"m = {m!r} exceeds the support bound pi = {pi!r}")
    body = 1.0 - m**k / pi
    if body < 0.0:
        raise DomainError(
            f"m**k = {m**k!r} exceeds pi = {pi!r}; the base would be negative"
        )
    return 1.0 - body ** (a * pi / k)


def penalty_cdf_from_hazard(m: float, hazard: HazardParams) -> float:
    """Reconstruct the cdf by adaptive quadrature of the hazard rate.

    Cross-check path: integrates lambda numerically instead of using the
    closed cumulative hazard, then maps through expm1.  Raises
    QuadratureFailure when the integrator cannot certify its error.
    """
    m = _check_deduction(m)
    if m == 0.0:
        return 0.0
    a, k = hazard.a, hazard.k

    def integrand(y: float) -> float:
        return a * y ** (k - 1.0)

    # interior break at the hazard's curvature knee keeps long ranges honest
    points = [1.0] if m > 1.0 else None
    result = quad(
        integrand,
        0.0,
        m,
        epsabs=_QUAD_EPS,
        epsrel=_QUAD_EPS,
        limit=_QUAD_LIMIT,
        points=points,
        full_output=1,
    )
    integral, abserr = result[0], result[1]
    if len(result) > 3:
        raise QuadratureFailure(
            f"hazard integral on [0, {m!r}] did not converge: {result[3]}"
        )
    if abserr > _QUAD_ABSERR_CAP * max(1.0, abs(integral)):
        raise QuadratureFailure(
            f"hazard integral on [0, {m!r}] reports error {abserr!r} "
            f"beyond the certification cap"
        )
    return -math.expm1(-integral)
