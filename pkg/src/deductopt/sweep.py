"""Batch evaluation: parameter grids, enforcement scenarios, curve tables.

Grid points are independent pure computations, so the sweep may run them
concurrently; records are always emitted in row-major order of the axes
(fixed order A, k, beta, z, t, pi) regardless of execution order, and two
runs of the same grid produce identical record sequences.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from itertools import product
from math import isfinite

import numpy as np

from .errors import ModelError, ParameterError, SpecError
from .penalty import (
    HazardParams,
    Problem,
    TaxPolicy,
    effective_penalty,
    expected_after_tax_income,
    hazard_rate,
    penalty_cdf,
    penalty_pdf,
)
from .solver import comparative_statics, solve_closed_form

__all__ = [
    "AXIS_ORDER",
    "AxisRange",
    "CurveSample",
    "GridSpec",
    "MAX_GRID_POINTS",
    "SweepRecord",
    "enforcement_shift",
    "run_sweep",
    "sample_curves",
]

AXIS_ORDER = ("A", "k", "beta", "z", "t", "pi")
MAX_GRID_POINTS = 1_000_000

# admissible interval per axis: (lower, upper, lower_open)
_AXIS_DOMAIN = {
    "A": (0.0, None, True),
    "k": (0.0, None, True),
    "beta": (0.0, 1.0, False),
    "z": (0.0, None, False),
    "t": (0.0, 1.0, False),
    "pi": (0.0, None, True),
}


@dataclass(frozen=True)
class AxisRange:
    """Evenly spaced values for one swept parameter."""

    start: float
    stop: float
    count: int

    def __post_init__(self) -> None:
        start, stop = float(self.start), float(self.stop)
        if not (isfinite(start) and isfinite(stop)):
            raise SpecError(f"axis endpoints must be finite, got {self!r}")
        if self.count < 1:
            raise SpecError(f"axis count must be >= 1, got {self.count!r}")
        if start > stop:
            raise SpecError(f"axis start {start!r} exceeds stop {stop!r}")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "stop", stop)

    def values(self) -> list[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]


def _check_axis(name: str, spec: float | AxisRange) -> None:
    lower, upper, lower_open = _AXIS_DOMAIN[name]
    if isinstance(spec, AxisRange):
        lo, hi = spec.start, spec.stop
    else:
        lo = hi = float(spec)
        if not isfinite(lo):
            raise SpecError(f"{name} must be finite, got {spec!r}")
    if lower_open and lo <= lower or not lower_open and lo < lower:
        raise SpecError(f"{name} leaves its domain at {lo!r}")
    if upper is not None and hi > upper:
        raise SpecError(f"{name} leaves its domain at {hi!r}")


@dataclass(frozen=True)
class GridSpec:
    """Cartesian grid: an AxisRange per swept parameter, floats for the rest."""

    A: float | AxisRange = 1.0
    k: float | AxisRange = 2.0
    beta: float | AxisRange = 1.0
    z: float | AxisRange = 0.0
    t: float | AxisRange = 0.3
    pi: float | AxisRange = 10.0

    def __post_init__(self) -> None:
        for name in AXIS_ORDER:
            _check_axis(name, getattr(self, name))
        if self.size() > MAX_GRID_POINTS:
            raise SpecError(
                f"grid has {self.size()} points, cap is {MAX_GRID_POINTS}"
            )

    def _axis_values(self, name: str) -> list[float]:
        spec = getattr(self, name)
        if isinstance(spec, AxisRange):
            return spec.values()
        return [float(spec)]

    def size(self) -> int:
        n = 1
        for name in AXIS_ORDER:
            spec = getattr(self, name)
            n *= spec.count if isinstance(spec, AxisRange) else 1
        return n

    def points(self) -> list[dict[str, float]]:
        """All grid points, row-major in AXIS_ORDER."""
        axes = [self._axis_values(name) for name in AXIS_ORDER]
        return [dict(zip(AXIS_ORDER, combo)) for combo in product(*axes)]


@dataclass(frozen=True)
class SweepRecord:
    """One grid point: parameters, status, and flattened result fields.

    status is "ok" on success, otherwise the error kind; on failure every
    result field is None so no partially valid numbers leak into tables.
    """

    A: float
    k: float
    beta: float
    z: float
    t: float
    pi: float
    B: float
    status: str
    m_star: float | None = None
    lambert_arg: float | None = None
    w_value: float | None = None
    objective: float | None = None
    foc_residual: float | None = None
    soc_margin: float | None = None
    upper_bound: float | None = None
    shape_warning: bool | None = None
    dm_dA: float | None = None
    dm_dB: float | None = None
    dm_dk: float | None = None
    fd_dm_dA: float | None = None
    fd_dm_dB: float | None = None
    fd_dm_dk: float | None = None
    max_rel_disagreement: float | None = None


def _evaluate_point(point: dict[str, float]) -> SweepRecord:
    policy = TaxPolicy(t=point["t"], beta=point["beta"], z=point["z"])
    hazard = HazardParams(a=point["A"], k=point["k"])
    problem = Problem(pi=point["pi"], policy=policy, hazard=hazard)
    base = dict(
        A=hazard.a,
        k=hazard.k,
        beta=policy.beta,
        z=policy.z,
        t=policy.t,
        pi=problem.pi,
        B=effective_penalty(policy),
    )
    try:
        sol = solve_closed_form(problem)
        rep = comparative_statics(problem, sol)
    except ModelError as exc:
        return SweepRecord(status=type(exc).__name__, **base)
    return SweepRecord(
        status="ok",
        m_star=sol.m_star,
        lambert_arg=sol.lambert_arg,
        w_value=sol.w_value,
        objective=sol.objective,
        foc_residual=sol.foc_residual,
        soc_margin=sol.soc_margin,
        upper_bound=sol.upper_bound,
        shape_warning=sol.shape_warning,
        dm_dA=rep.dm_dA,
        dm_dB=rep.dm_dB,
        dm_dk=rep.dm_dk,
        fd_dm_dA=rep.fd_dm_dA,
        fd_dm_dB=rep.fd_dm_dB,
        fd_dm_dk=rep.fd_dm_dk,
        max_rel_disagreement=rep.max_rel_disagreement,
        **base,
    )


def run_sweep(spec: GridSpec, parallel: bool = False) -> list[SweepRecord]:
    """Evaluate every grid point, in row-major axis order.

    With parallel=True the points run on a thread pool; ordering and values
    are identical to the serial path.
    """
    points = spec.points()
    if parallel:
        with ThreadPoolExecutor() as pool:
            return list(pool.map(_evaluate_point, points))
    return [_evaluate_point(p) for p in points]


def enforcement_shift(hazard: HazardParams, intensity: float) -> HazardParams:
    """Reparametrise enforcement strictness as a single signed knob.

    Positive intensity scales the enforcement level up and the shape down,
    (a, k) -> (a (1 + i), k / (1 + i)), moving the detection cdf toward
    smaller deductions; negative intensity relaxes both the same way.
    """
    intensity = float(intensity)
    if not abs(intensity) < 1.0:
        raise ParameterError(f"|intensity| must be < 1, got {intensity!r}")
    return HazardParams(a=hazard.a * (1.0 + intensity), k=hazard.k / (1.0 + intensity))


@dataclass(frozen=True)
class CurveSample:
    """Model curves at one deduction level."""

    m: float
    F: float
    f: float
    lam: float
    EU: float


def sample_curves(
    hazard: HazardParams, problem: Problem, m_max: float, n: int = 200
) -> list[CurveSample]:
    """Evenly sampled cdf, pdf, hazard, and objective curves.

    Samples n points on [m_min, m_max] with m_min = 0 for k >= 1; for k < 1
    the hazard rate has a pole at zero, so sampling starts at m_max/n
    instead.  The hazard in `problem` is replaced by `hazard`.
    """
    if not m_max > 0.0:
        raise ParameterError(f"m_max must be > 0, got {m_max!r}")
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n!r}")
    m_min = 0.0 if hazard.k >= 1.0 else m_max / n
    problem = replace(problem, hazard=hazard)
    samples = []
    for m in np.linspace(m_min, m_max, n):
        m = float(m)
        samples.append(
            CurveSample(
                m=m,
                F=penalty_cdf(m, hazard),
                f=penalty_pdf(m, hazard),
                lam=hazard_rate(m, hazard),
                EU=expected_after_tax_income(m, problem),
            )
        )
    return samples
