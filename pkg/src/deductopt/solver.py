"""Optimal deduction: closed form, numeric cross-check, comparative statics.

The taxpayer's expected income is stationary where ``1 = (F + f m) B``.
Substituting the Weibull-type cdf turns that into ``u e^u = (1 - 1/B) e^{1/k}/k``
with ``u = (a m^k - 1)/k``, so the optimum is one Lambert W evaluation:

    m* = ((1 - w k) / a)^{1/k},   w = W0((1 - 1/B) e^{1/k} / k)

An interior stationary point exists iff that argument stays above the branch
point -1/e, and it is a local maximum iff the curvature margin
``f' + 2 f / m`` is positive there, which holds automatically for w > -1
since the margin equals ``(k + 1 - a m^k) f / m = k (1 + w) f / m``.

For B < 1 the objective grows without bound as m -> inf (its slope tends to
t (1 - B) > 0), so the stationary point is a local maximum only; the numeric
maximizer deliberately searches just (0, upper_bound] and carries no global
claim there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

from .errors import (
    DegenerateObjective,
    DomainError,
    ModelError,
    NoInteriorOptimum,
    ParameterError,
    SecondOrderViolation,
    StaticsUnstable,
)
from .lambertw import BRANCH_POINT, w0
from .penalty import (
    HazardParams,
    Problem,
    TaxPolicy,
    effective_penalty,
    expected_after_tax_income,
    penalty_cdf,
    penalty_pdf,
)

__all__ = [
    "Solution",
    "StaticsReport",
    "comparative_statics",
    "dk_sign",
    "foc_residual",
    "has_interior_optimum",
    "interior_upper_bound",
    "lambert_argument",
    "min_shape_for_interior",
    "soc_margin",
    "solve_closed_form",
    "solve_numeric",
]

Sign = Literal["negative", "zero", "positive"]

_GRID_CELLS = 1024
_BRACKET_REL = 1e-12
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

# statics are refused when w sits this close to a degenerate denominator
_EDGE_GUARD = 1e-9
_FD_REL_STEP = 1e-6

# |dk_sign| values at or below this classify as "zero"
_SIGN_ATOL = 1e-12


@dataclass(frozen=True)
class Solution:
    """Interior optimum of expected after-tax income."""

    m_star: float
    """Optimal deduction, 0 < m_star < upper_bound."""

    lambert_arg: float
    """(1 - 1/B) e^{1/k} / k, the W0 argument; > -1/e on success."""

    w_value: float
    """W0(lambert_arg), in (-1, 1/k)."""

    objective: float
    """Expected after-tax income at m_star."""

    foc_residual: float
    """1 - (F + f m) B at m_star; zero up to rounding."""

    soc_margin: float
    """f' + 2 f / m at m_star; > 0 certifies a local maximum."""

    upper_bound: float
    """((1 + k)/a)^{1/k}; every interior optimum lies strictly below it."""

    shape_warning: bool
    """True when k <= 1: the cdf has no convex region, so the S-shape
    rationale for an interior maximum does not apply even though the
    computed curvature margin may still be positive."""


@dataclass(frozen=True)
class StaticsReport:
    """Analytic sensitivities of m_star next to finite-difference probes."""

    dm_dA: float
    dm_dB: float
    dm_dk: float
    fd_dm_dA: float
    fd_dm_dB: float
    fd_dm_dk: float
    max_rel_disagreement: float
    """Worst relative gap between an analytic and its fd column."""


def lambert_argument(b: float, k: float) -> float:
    """W0 argument of the closed form: (1 - 1/B) e^{1/k} / k."""
    b = float(b)
    k = float(k)
    if not b > 0.0 or math.isinf(b) or math.isnan(b):
        raise ParameterError(f"effective penalty B must be > 0 and finite, got {b!r}")
    if not k > 0.0 or math.isinf(k) or math.isnan(k):
        raise ParameterError(f"shape k must be > 0 and finite, got {k!r}")
    return (1.0 - 1.0 / b) * math.exp(1.0 / k) / k


def interior_upper_bound(hazard: HazardParams) -> float:
    """((1 + k)/a)^{1/k}, where the curvature margin changes sign."""
    return ((1.0 + hazard.k) / hazard.a) ** (1.0 / hazard.k)


def foc_residual(m: float, problem: Problem) -> float:
    """Stationarity defect 1 - (F(m) + f(m) m) B."""
    if not m > 0.0:
        raise DomainError(f"foc_residual needs m > 0, got {m!r}")
    b = effective_penalty(problem.policy)
    h = problem.hazard
    return 1.0 - (penalty_cdf(m, h) + penalty_pdf(m, h) * m) * b


def _pdf_slope(m: float, hazard: HazardParams) -> float:
    """Analytic f'(m) = a m^{k-2} e^{-(a/k) m^k} (k - 1 - a m^k)."""
    a, k = hazard.a, hazard.k
    s = (a / k) * m**k
    return a * m ** (k - 2.0) * math.exp(-s) * (k - 1.0 - a * m**k)


def soc_margin(m: float, hazard: HazardParams) -> float:
    """Curvature margin f'(m) + 2 f(m)/m; positive at a local maximum.

    Algebraically equal to (k + 1 - a m^k) f(m)/m, so it vanishes exactly
    at the interior upper bound.
    """
    if not m > 0.0:
        raise DomainError(f"soc_margin needs m > 0, got {m!r}")
    return _pdf_slope(m, hazard) + 2.0 * penalty_pdf(m, hazard) / m


def _check_tradeoff(problem: Problem) -> float:
    """Return B after rejecting parameter points with no interior tradeoff."""
    if problem.policy.t == 0.0:
        raise DegenerateObjective("t = 0: the objective is constant in m")
    b = effective_penalty(problem.policy)
    if b == 0.0:
        raise DegenerateObjective(
            "B = 0: the objective increases without bound in m"
        )
    return b


def solve_closed_form(problem: Problem) -> Solution:
    """Interior optimum via one Lambert W evaluation.

    Raises NoInteriorOptimum when the W argument falls below -1/e (penalty
    too strong for the shape: no stationary point), DegenerateObjective when
    t = 0 or B = 0, and SecondOrderViolation if the computed curvature
    margin fails to be positive.
    """
    b = _check_tradeoff(problem)
    a, k = problem.hazard.a, problem.hazard.k
    x = lambert_argument(b, k)
    if x < BRANCH_POINT:
        raise NoInteriorOptimum(
            f"lambert argument {x!r} lies below -1/e = {BRANCH_POINT!r}: "
            f"no stationary point for B = {b!r}, k = {k!r}"
        )
    w = w0(x).w
    m = ((1.0 - w * k) / a) ** (1.0 / k)
    soc = soc_margin(m, problem.hazard)
    if not soc > 0.0:
        raise SecondOrderViolation(
            f"curvature margin {soc!r} at m = {m!r} is not positive: "
            f"the stationary point is not a local maximum"
        )
    return Solution(
        m_star=m,
        lambert_arg=x,
        w_value=w,
        objective=expected_after_tax_income(m, problem),
        foc_residual=foc_residual(m, problem),
        soc_margin=soc,
        upper_bound=interior_upper_bound(problem.hazard),
        shape_warning=k <= 1.0,
    )


def solve_numeric(problem: Problem) -> float:
    """Maximize expected income on (0, upper_bound] without the closed form.

    Coarse scan over 1024 evenly spaced cells, then golden-section
    refinement of the bracketing pair down to width 1e-12 * upper_bound.
    Wholly independent of the Lambert W machinery; used as the oracle for
    solve_closed_form.  Accuracy is curvature-limited: near the flat top of
    the objective the maximizer is determined only to about sqrt(eps)
    relative, so agreement claims against it stop at 1e-6.
    """
    _check_tradeoff(problem)
    ub = interior_upper_bound(problem.hazard)

    def objective(m: float) -> float:
        return expected_after_tax_income(m, problem)

    best_j = 0
    best_v = -math.inf
    for j in range(1, _GRID_CELLS + 1):
        v = objective(ub * j / _GRID_CELLS)
        if v > best_v:
            best_j, best_v = j, v
    if best_j == _GRID_CELLS:
        raise NoInteriorOptimum(
            f"objective still rising at the upper bound {ub!r}: "
            f"no interior maximum in the search interval"
        )

    lo = ub * (best_j - 1) / _GRID_CELLS
    hi = ub * (best_j + 1) / _GRID_CELLS
    # golden-section: keep the lower bracket on ties for determinism
    width = hi - lo
    c = hi - _INV_PHI * width
    d = lo + _INV_PHI * width
    fc, fd = objective(c), objective(d)
    while hi - lo > _BRACKET_REL * ub:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = objective(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = objective(d)
    return 0.5 * (lo + hi)


def _with_penalty(policy: TaxPolicy, b_new: float) -> TaxPolicy:
    """A policy whose effective penalty equals b_new, keeping t.

    Adjusts the surcharge when possible (it is unbounded above), otherwise
    the recovery share; constructor validation still applies, so probes
    that leave the admissible region raise ParameterError.
    """
    z_new = b_new / policy.beta - 1.0
    if z_new >= 0.0:
        return replace(policy, z=z_new)
    return replace(policy, beta=b_new / (1.0 + policy.z))


def comparative_statics(problem: Problem, solution: Solution) -> StaticsReport:
    """Analytic sensitivities of m* with central finite-difference probes.

    dm_dA = -m/(a k); dm_dB and dm_dk come from differentiating the closed
    form, written so removable singularities cancel: the B-derivative uses
    W/x = e^{-W}, which turns the raw W/((W+1)(1 - 1/B)) factor into a form
    that is finite at B = 1 (equal to its limit there), and the k-derivative
    is (m/k) (W/(k (1 + W)) - log m).

    Raises StaticsUnstable when w sits within 1e-9 of -1 or 1/k (degenerate
    denominators) or when a finite-difference probe leaves the feasible
    region.
    """
    h = problem.hazard
    a, k = h.a, h.k
    b = effective_penalty(problem.policy)
    w = solution.w_value
    m = solution.m_star
    if w + 1.0 < _EDGE_GUARD or 1.0 / k - w < _EDGE_GUARD:
        raise StaticsUnstable(
            f"w = {w!r} within {_EDGE_GUARD} of a degenerate denominator "
            f"(-1 or 1/k = {1.0 / k!r})"
        )

    dm_da = -m / (a * k)
    dm_db = -(m ** (1.0 - k)) * math.exp(1.0 / k - w) / (a * b * b * k * (1.0 + w))
    dm_dk = (m / k) * (w / (k * (1.0 + w)) - math.log(m))

    def m_at(problem2: Problem) -> float:
        return solve_closed_form(problem2).m_star

    step_a = _FD_REL_STEP * max(1.0, abs(a))
    step_k = _FD_REL_STEP * max(1.0, abs(k))
    step_b = _FD_REL_STEP * max(1.0, abs(b))
    try:
        fd_da = (
            m_at(replace(problem, hazard=replace(h, a=a + step_a)))
            - m_at(replace(problem, hazard=replace(h, a=a - step_a)))
        ) / (2.0 * step_a)
        fd_dk = (
            m_at(replace(problem, hazard=replace(h, k=k + step_k)))
            - m_at(replace(problem, hazard=replace(h, k=k - step_k)))
        ) / (2.0 * step_k)
        fd_db = (
            m_at(replace(problem, policy=_with_penalty(problem.policy, b + step_b)))
            - m_at(replace(problem, policy=_with_penalty(problem.policy, b - step_b)))
        ) / (2.0 * step_b)
    except ModelError as exc:
        raise StaticsUnstable(
            f"finite-difference probe left the feasible region: {exc}"
        ) from exc

    def rel_gap(analytic: float, probe: float) -> float:
        return abs(analytic - probe) / max(abs(analytic), abs(probe), 1e-15)

    return StaticsReport(
        dm_dA=dm_da,
        dm_dB=dm_db,
        dm_dk=dm_dk,
        fd_dm_dA=fd_da,
        fd_dm_dB=fd_db,
        fd_dm_dk=fd_dk,
        max_rel_disagreement=max(
            rel_gap(dm_da, fd_da), rel_gap(dm_db, fd_db), rel_gap(dm_dk, fd_dk)
        ),
    )


def dk_sign(w: float, k: float) -> Sign:
    """Sign of the shape sensitivity at the unit-enforcement scale a = 1.

    With a = 1 the optimum is m = (1 - w k)^{1/k} and the k-derivative
    becomes (m/k) (w/(k (1 + w)) - log m), well-defined on the whole strip
    w in (-1, 1/k).  Both terms share the sign of w there, so the
    classification is positive for w > 0, zero at w = 0, and negative for
    w < 0; it diverges to -inf as w -> -1 and falls to 0+ as w -> 1/k.
    At other enforcement scales the log m term can flip the raw derivative
    even when w > 0, which is why the report field must be read alongside
    this normalised classification.
    """
    k = float(k)
    w = float(w)
    if not k > 0.0:
        raise DomainError(f"dk_sign needs k > 0, got {k!r}")
    if not -1.0 < w < 1.0 / k:
        raise DomainError(f"dk_sign needs w in (-1, 1/k), got w = {w!r}")
    log_m = math.log1p(-w * k) / k
    value = (math.exp(log_m) / k) * (w / (k * (1.0 + w)) - log_m)
    if abs(value) <= _SIGN_ATOL:
        return "zero"
    return "positive" if value > 0.0 else "negative"


def min_shape_for_interior(b: float) -> float:
    """Smallest hazard shape admitting an interior optimum when 0 < B < 1.

    Equals 1 / W0(B / (e (1 - B))).  For k above this threshold the W
    argument stays above the branch point; below it no stationary point
    exists.  Increasing in B's severity shortfall: as B -> 1- the threshold
    tends to 0 (any shape works), as B -> 0+ it diverges.
    """
    b = float(b)
    if not 0.0 < b < 1.0:
        raise ParameterError(f"threshold defined only for 0 < B < 1, got {b!r}")
    return 1.0 / w0(b / (math.e * (1.0 - b))).w


def has_interior_optimum(b: float, k: float) -> bool:
    """True when the closed form has an interior stationary point."""
    return lambert_argument(b, k) > BRANCH_POINT
