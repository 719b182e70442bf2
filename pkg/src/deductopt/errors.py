"""Error taxonomy.

Every failure mode of the library maps to exactly one subclass of
:class:`ModelError`, so callers (and the CLI exit-code logic) can route on
type rather than on message text.
"""
from __future__ import annotations

__all__ = [
    "ModelError",
    "ParameterError",
    "DomainError",
    "SingularHazard",
    "QuadratureFailure",
    "NoInteriorOptimum",
    "DegenerateObjective",
    "SecondOrderViolation",
    "StaticsUnstable",
    "SpecError",
]


class ModelError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(ModelError, ValueError):
    """A constructor or operation received an out-of-contract parameter."""


class DomainError(ModelError, ValueError):
    """An argument lies outside the mathematical domain of the function."""


class SingularHazard(ModelError):
    """The hazard rate diverges at the requested point (m = 0 with shape < 1)."""


class QuadratureFailure(ModelError):
    """Adaptive quadrature could not certify the requested tolerance."""


class NoInteriorOptimum(ModelError):
    """No interior stationary maximum exists for the given parameters."""


class DegenerateObjective(ModelError):
    """The objective carries no tradeoff (zero tax rate or zero penalty)."""


class SecondOrderViolation(ModelError):
    """The candidate stationary point fails the second-order condition."""


class StaticsUnstable(ModelError):
    """Comparative statics are ill-conditioned this close to a feasibility edge."""


class SpecError(ModelError, ValueError):
    """A sweep grid specification is malformed."""
