"""Principal real branch of the Lambert W function.

``w0(x)`` solves ``w * exp(w) = x`` for the branch with ``w >= -1``, real on
``x >= -1/e``.  The evaluator is self-contained: a piecewise initial guess
feeds a Halley iteration that runs until the defining identity itself
certifies convergence, so accuracy is reported as the returned ``residual``
instead of being an article of faith.

Initial guess zones
-------------------
* near the branch point: expansion in ``p = sqrt(2 (e x + 1))``,
  ``w = -1 + p - p^2/3 + 11 p^3/72``.  For ``p <= 1e-3`` the series alone
  already meets the residual tolerance, and Halley (whose derivative
  degenerates at the branch point) is never entered.
* moderate ``x``: a ``log1p`` seed, crude but inside the Halley basin.
* ``x >= e``: the asymptote ``L1 - L2 + L2/L1`` with ``L1 = log x``,
  ``L2 = log L1``; exact at ``x = e``.

Inputs within ``DOMAIN_SLACK`` below the branch point are treated as the
branch point itself (``w = -1``); anything lower raises ``DomainError``.
For those clamped inputs no real ``w`` exists, so the reported residual is
the distance to the branch point rather than a solution residual.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ModelError

__all__ = ["BRANCH_POINT", "DOMAIN_SLACK", "LambertResult", "w0"]

# Left edge of the real domain: -1/e.
BRANCH_POINT = -math.exp(-1.0)

# Absolute width of the clamp band below BRANCH_POINT.
DOMAIN_SLACK = 1e-12

_RESIDUAL_REL = 1e-14
_MAX_ITER = 50

# below this p = sqrt(2 (e x + 1)) the branch-point series is returned as-is
_SERIES_CUT = 1e-3


@dataclass(frozen=True)
class LambertResult:
    """W0 at one point together with its own convergence evidence."""

    w: float
    """Branch value, always >= -1."""

    residual: float
    """|w exp(w) - x| at the returned w."""

    iterations: int
    """Halley steps taken; 0 when the seed already passed."""


def _tolerance(x: float) -> float:
    return _RESIDUAL_REL * max(1.0, abs(x))


def _seed(x: float) -> float:
    if x < -0.25:
        # branch-point series; radicand clipped against sign noise at the edge
        p = math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
        return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)))
    if x < math.e:
        return math.log1p(x)
    l1 = math.log(x)
    l2 = math.log(l1)
    return l1 - l2 + l2 / l1


def w0(x: float) -> LambertResult:
    """Evaluate the principal branch at ``x``.

    Raises
    ------
    DomainError
        If ``x`` is not finite or lies more than ``DOMAIN_SLACK`` below the
        branch point ``-1/e``.
    """
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise DomainError(f"w0 needs a finite argument, got {x!r}")
    if x < BRANCH_POINT:
        if x < BRANCH_POINT - DOMAIN_SLACK:
            raise DomainError(
                f"w0 argument {x!r} lies below the branch point -1/e = {BRANCH_POINT!r}"
            )
        return LambertResult(-1.0, abs(BRANCH_POINT - x), 0)

    tol = _tolerance(x)
    if x < -0.25:
        p = math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
        if p <= _SERIES_CUT:
            # this close to the branch the series alone is float-optimal and
            # Halley's vanishing derivative would only add noise
            w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)))
            return LambertResult(w, abs(w * math.exp(w) - x), 0)

    best_w = w = _seed(x)
    best_r = abs(w * math.exp(w) - x)
    if best_r == 0.0:
        return LambertResult(w, 0.0, 0)

    # run Halley past the certification tolerance, to the float optimum:
    # stop once the residual no longer improves
    for iteration in range(1, _MAX_ITER + 1):
        c1 = math.exp(w)
        c2 = w * c1 - x
        w1 = w + 1.0
        step = c2 / (c1 * w1 - (w + 2.0) * c2 / (2.0 * w1))
        w_next = w - step
        if w_next <= -1.0:
            # overshoot below the branch: bisect back toward it instead
            w_next = -1.0 + 0.5 * w1
        w = w_next
        r = abs(w * math.exp(w) - x)
        if r < best_r:
            best_w, best_r = w, r
            if r == 0.0:
                return LambertResult(best_w, 0.0, iteration)
        elif best_r <= tol:
            return LambertResult(best_w, best_r, iteration)

    if best_r <= tol:
        return LambertResult(best_w, best_r, _MAX_ITER)
    raise ModelError(
        f"w0 did not converge at x={x!r} after {_MAX_ITER} iterations "
        f"(residual {best_r!r})"
    )
