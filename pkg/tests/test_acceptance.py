"""Acceptance gate: one pass/fail line per acceptance check.

Each test prints `acceptance <id>: PASS/FAIL (<detail>)` and then asserts.
Three sub-tests are expected to fail; they assert idealised forms of model
properties that are mathematically or numerically unattainable as written,
kept red as executable documentation, and each failure message carries the
measured analysis:

* 04b - the W round-trip tolerance of 1e-12 down to |1+w| = 1e-9 sits far
  inside the branch-point conditioning wall of binary64 itself;
* 05c - "dm_dk > 0 wherever W >= 0" has concrete counterexamples on the
  stated grid, confirmed analytically and by finite differences;
* 07b - the chained feasibility predicate for 0 < B < 1 disagrees with the
  direct branch-point test at B = 0.9 (its lower bound fails while the
  problem is feasible); the upper half of the chain agrees everywhere.
"""
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from deductopt.errors import StaticsUnstable
from deductopt.lambertw import BRANCH_POINT, w0
from deductopt.penalty import (
    HazardParams,
    Problem,
    TaxPolicy,
    cumulative_hazard,
    expected_after_tax_income,
    hazard_rate,
    penalty_cdf,
    penalty_cdf_closed_support,
    penalty_cdf_from_hazard,
    penalty_pdf,
)
from deductopt.solver import (
    comparative_statics,
    lambert_argument,
    solve_closed_form,
    solve_numeric,
)

EPS = 2.220446049250313e-16

GRID_A = (0.5, 1.0, 2.0)
GRID_K = (1.25, 2.0, 3.0)
GRID_B = (0.9, 1.0, 1.5, 2.5)
GRID_T = 0.3
GRID_PI = 10.0

CLI = [sys.executable, "-m", "deductopt.cli"]
SWEEP_ARGS = [
    "sweep", "--A", "1", "--k", "2", "--beta", "0.5", "--z", "0:4:5",
    "--t", "0.3", "--pi", "10",
]


def _report(name: str, ok: bool, detail: str = "") -> str:
    line = f"acceptance {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line)
    return line


def grid_problems() -> list[Problem]:
    points = []
    for a in GRID_A:
        for k in GRID_K:
            for b in GRID_B:
                if lambert_argument(b, k) <= BRANCH_POINT:
                    continue
                beta, z = (b, 0.0) if b <= 1.0 else (1.0, b - 1.0)
                points.append(
                    Problem(
                        pi=GRID_PI,
                        policy=TaxPolicy(t=GRID_T, beta=beta, z=z),
                        hazard=HazardParams(a=a, k=k),
                    )
                )
    return points


def grid_b(problem: Problem) -> float:
    return problem.policy.beta * (1.0 + problem.policy.z)


def test_01_closed_form_matches_numeric_oracle():
    start = time.perf_counter()
    worst = 0.0
    problems = grid_problems()
    for prob in problems:
        closed = solve_closed_form(prob).m_star
        numeric = solve_numeric(prob)
        worst = max(worst, abs(closed - numeric) / abs(closed))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 1.0
    line = _report(
        "01 closed form vs numeric oracle",
        ok,
        f"{len(problems)} points, worst rel gap {worst:.3e}, {elapsed:.2f} s",
    )
    assert ok, line


def test_02_stationarity_and_local_maximality():
    worst_foc = 0.0
    bracket_ok = True
    for prob in grid_problems():
        sol = solve_closed_form(prob)
        worst_foc = max(worst_foc, abs(sol.foc_residual))
        assert sol.soc_margin > 0.0
        peak = expected_after_tax_income(sol.m_star, prob)
        for m in (sol.m_star * (1.0 - 1e-3), sol.m_star * (1.0 + 1e-3)):
            bracket_ok = bracket_ok and peak > expected_after_tax_income(m, prob)
    ok = worst_foc <= 1e-10 and bracket_ok
    line = _report(
        "02 stationarity and maximality",
        ok,
        f"worst |foc| {worst_foc:.3e}, peak brackets hold: {bracket_ok}",
    )
    assert ok, line


def test_03_unit_anchor_and_substitution_statics():
    prob = Problem(
        pi=10.0, policy=TaxPolicy(t=0.3, beta=0.5, z=1.0), hazard=HazardParams(a=1.0, k=2.0)
    )
    sol = solve_closed_form(prob)
    anchor_ok = abs(sol.m_star - 1.0) <= 1e-12
    peak = expected_after_tax_income(1.0, prob)
    for delta in (1e-3, 1e-6):
        for m in (1.0 - delta, 1.0 + delta):
            anchor_ok = anchor_ok and peak > expected_after_tax_income(m, prob)

    # direct substitution into the printed derivative formulas at the anchor
    # (A = 1, k = 2, B = 1, m = 1, W = 0); the B-derivative's leading factor
    # W/(W+1) is evaluated first and a zero there short-circuits the
    # removable 1/(1 - 1/B) pole, matching the source's limit convention
    a, k, b, m, w = 1.0, 2.0, 1.0, sol.m_star, sol.w_value
    sub_da = -m / (a * k)
    w_factor = w / (w + 1.0)
    sub_db = (
        0.0
        if w_factor == 0.0
        else -(m ** (1.0 - k)) / (a * b * b * (1.0 - 1.0 / b)) * w_factor
    )
    sub_dk = (m / k) * (
        (w - (1.0 + 1.0 / k) * w / (w + 1.0)) / (w * k - 1.0) - math.log(m)
    )
    subs_ok = (sub_da, sub_db, sub_dk) == (-0.5, 0.0, 0.0)

    # the module itself reports the true two-sided limit of the B-derivative
    # at B = 1, confirmed by its finite-difference column
    rep = comparative_statics(prob, sol)
    limit_note = f"module dm_dB reports the limit {rep.dm_dB:.6f} (fd {rep.fd_dm_dB:.6f})"

    ok = anchor_ok and subs_ok
    line = _report(
        "03 unit anchor",
        ok,
        f"m* = {sol.m_star!r}, substitution statics ({sub_da}, {sub_db}, {sub_dk}); "
        + limit_note,
    )
    assert ok, line


def test_04a_lambertw_residual_certificate():
    rng = np.random.default_rng(4)
    xs = np.concatenate(
        [
            BRANCH_POINT + 10.0 ** rng.uniform(-18.0, 0.3, 30_000),
            rng.uniform(-1.0 / math.e, 3.0, 30_000),
            10.0 ** rng.uniform(0.5, 6.0, 40_000),
        ]
    )
    start = time.perf_counter()
    worst = 0.0
    for x in xs:
        x = float(x)
        r = w0(x)
        worst = max(worst, r.residual / max(1.0, abs(x)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-14 and elapsed < 1.0
    line = _report(
        "04a lambert residual",
        ok,
        f"{len(xs)} points in [-1/e, 1e6], worst scaled residual {worst:.3e}, "
        f"{elapsed:.2f} s",
    )
    assert ok, line


def test_04b_lambertw_round_trip():
    # tolerance 1e-12 demanded down to |1+w| = 1e-9: the input x = fl(w e^w)
    # already carries eps/2 relative rounding, and the inverse map amplifies
    # input error by 1/|1+w|, so every binary64 evaluator must breach below
    # |1+w| ~ eps/(2e-12) ~ 1.1e-4; this test asserts the idealised
    # tolerance anyway and the failure detail quantifies the wall
    offsets = 10.0 ** np.linspace(-9.0, math.log10(21.0), 50_000)
    breaches = 0
    worst_rel = 0.0
    wall = 0.0
    worst_outside = 0.0
    for u in offsets:
        w = -1.0 + float(u)
        if w == 0.0:
            continue
        rel = abs(w0(w * math.exp(w)).w - w) / abs(w)
        if rel > 1e-12:
            breaches += 1
            wall = max(wall, abs(1.0 + w))
            worst_rel = max(worst_rel, rel)
        elif abs(1.0 + w) >= 5e-4:
            worst_outside = max(worst_outside, rel)
    ok = breaches == 0
    line = _report(
        "04b lambert round trip",
        ok,
        f"{breaches} breaches of 1e-12, all at |1+w| <= {wall:.3e} "
        f"(worst rel {worst_rel:.3e}); input rounding alone forces rel error "
        f"~ eps/(2|1+w|) > 1e-12 below |1+w| = {EPS / 2e-12:.3e}, so the "
        f"stated tolerance is unattainable in binary64 near the branch; "
        f"away from the wall the worst error is {worst_outside:.3e}",
    )
    assert ok, line


def test_05a_statics_match_finite_differences():
    worst = 0.0
    count = 0
    for prob in grid_problems():
        sol = solve_closed_form(prob)
        rep = comparative_statics(prob, sol)
        worst = max(worst, rep.max_rel_disagreement)
        count += 1
    ok = worst <= 1e-5
    line = _report(
        "05a statics vs central differences",
        ok,
        f"{count} points, worst rel disagreement {worst:.3e}",
    )
    assert ok, line


def test_05b_statics_sign_suite():
    ok = True
    for prob in grid_problems():
        sol = solve_closed_form(prob)
        rep = comparative_statics(prob, sol)
        ok = ok and rep.dm_dA < 0.0 and rep.fd_dm_dB < 0.0
    line = _report("05b statics signs (dm_dA < 0, fd dm_dB < 0)", ok)
    assert ok, line


def test_05c_shape_derivative_sign_claim():
    # claim under test: dm_dk > 0 wherever W >= 0; the k-derivative
    # (m/k)(W/(k(1+W)) - log m) picks up -log m, which at enforcement scales
    # with m* > 1 can dominate even for nonnegative W
    violations = []
    for prob in grid_problems():
        sol = solve_closed_form(prob)
        if sol.w_value < 0.0:
            continue
        rep = comparative_statics(prob, sol)
        if not rep.dm_dk > 0.0:
            violations.append(
                f"A={prob.hazard.a} k={prob.hazard.k} B={grid_b(prob)}: "
                f"W={sol.w_value:.6f}, dm_dk={rep.dm_dk!r}, fd={rep.fd_dm_dk!r}"
            )
    ok = not violations
    line = _report(
        "05c dm_dk > 0 wherever W >= 0",
        ok,
        f"{len(violations)} grid counterexamples, analytic and fd agree: "
        + "; ".join(violations),
    )
    assert ok, line


def test_06_probability_model_consistency():
    hazards = [HazardParams(a=a, k=k) for a in GRID_A for k in GRID_K]
    log_grid = [10.0 ** (-3.0 + 4.0 * j / 16.0) for j in range(17)]

    worst_quad = 0.0
    for h in hazards:
        for m in log_grid:
            worst_quad = max(
                worst_quad, abs(penalty_cdf_from_hazard(m, h) - penalty_cdf(m, h))
            )

    # pdf vs cdf slope on parameter sets where F keeps enough distance from
    # saturation for a difference quotient to retain significant digits
    worst_fd = 0.0
    for a, k in ((1.0, 1.1), (0.6, 0.8), (0.2, 1.5)):
        h = HazardParams(a=a, k=k)
        for m in log_grid:
            step = 1e-5 * m
            fd = (penalty_cdf(m + step, h) - penalty_cdf(m - step, h)) / (2.0 * step)
            worst_fd = max(worst_fd, abs(penalty_pdf(m, h) - fd) / max(fd, 1e-300))

    # hazard identity: exact in survival form everywhere; via the subtracted
    # complement 1 - F it is float-meaningful while e^Lambda eps stays under
    # the tolerance, i.e. Lambda <= 3
    worst_ident = 0.0
    ident_points = 0
    for h in hazards:
        for m in log_grid:
            if cumulative_hazard(m, h) > 3.0:
                continue
            f = penalty_pdf(m, h)
            recon = hazard_rate(m, h) * (1.0 - penalty_cdf(m, h))
            worst_ident = max(worst_ident, abs(f - recon) / f)
            ident_points += 1

    support = Problem(
        pi=1.0, policy=TaxPolicy(t=0.3, beta=0.5, z=0.0), hazard=HazardParams(a=2.5, k=1.0)
    )
    reduction_exact = all(
        penalty_cdf_closed_support(float(m), support) == 1.0 - (1.0 - float(m)) ** 2.5
        for m in np.linspace(0.0, 1.0, 41)
    )

    ok = (
        worst_quad <= 1e-8
        and worst_fd <= 1e-6
        and worst_ident <= 1e-14
        and reduction_exact
    )
    line = _report(
        "06 probability model",
        ok,
        f"quad {worst_quad:.3e} <= 1e-8, pdf-vs-slope {worst_fd:.3e} <= 1e-6, "
        f"identity {worst_ident:.3e} <= 1e-14 on {ident_points} points with "
        f"Lambda <= 3, bounded-support reduction exact: {reduction_exact}",
    )
    assert ok, line


def test_07a_bound_and_range_checks():
    ok = True
    for prob in grid_problems():
        sol = solve_closed_form(prob)
        k = prob.hazard.k
        ok = ok and 0.0 < sol.m_star < sol.upper_bound
        ok = ok and -1.0 < sol.w_value < 1.0 / k
    line = _report("07a m* and W range bounds", ok)
    assert ok, line


def test_07b_weak_penalty_feasibility_predicate():
    # chained predicate under test, for 0 < B < 1:
    #     1 < 1/W0(B/(e(1-B))) < k
    # against the direct test: (1 - 1/B) e^(1/k)/k > -1/e
    rows = []
    upper_half_agrees = True
    for k in GRID_K:
        for b in GRID_B:
            if not 0.0 < b < 1.0:
                continue
            q = 1.0 / w0(b / (math.e * (1.0 - b))).w
            chain = 1.0 < q < k
            direct = lambert_argument(b, k) > BRANCH_POINT
            upper_half_agrees = upper_half_agrees and (q < k) == direct
            if chain != direct:
                rows.append(
                    f"B={b} k={k}: chain says {chain} (q={q:.15f}), direct says {direct}"
                )
    ok = not rows
    line = _report(
        "07b chained weak-penalty predicate vs direct branch test",
        ok,
        f"{len(rows)} disagreements; the q < k half alone agrees with the "
        f"direct test at every point: {upper_half_agrees}; the 1 < q lower "
        f"bound is what fails: " + "; ".join(rows),
    )
    assert ok, line


def test_08_scale_and_tax_invariance():
    worst_scale = 0.0
    for prob in grid_problems():
        a, k = prob.hazard.a, prob.hazard.k
        base = solve_closed_form(prob).m_star
        for c in (0.5, 2.0):
            scaled_prob = Problem(
                pi=prob.pi,
                policy=prob.policy,
                hazard=HazardParams(a=a * c**k, k=k),
            )
            scaled = solve_closed_form(scaled_prob).m_star
            worst_scale = max(worst_scale, abs(scaled - base / c) / (base / c))

    worst_t = 0.0
    for b in GRID_B:
        beta, z = (b, 0.0) if b <= 1.0 else (1.0, b - 1.0)
        stars = [
            solve_closed_form(
                Problem(
                    pi=GRID_PI,
                    policy=TaxPolicy(t=t, beta=beta, z=z),
                    hazard=HazardParams(a=1.0, k=2.0),
                )
            ).m_star
            for t in (0.1, 0.5, 0.9)
        ]
        worst_t = max(worst_t, max(stars) - min(stars))

    ok = worst_scale <= 1e-12 and worst_t <= 1e-12
    line = _report(
        "08 scale and tax invariance",
        ok,
        f"worst rescale gap {worst_scale:.3e}, worst t drift {worst_t:.3e}",
    )
    assert ok, line


def test_09_cli_determinism():
    verify = subprocess.run(
        [*CLI, "verify"], capture_output=True, text=True
    )
    first = subprocess.run([*CLI, *SWEEP_ARGS], capture_output=True)
    second = subprocess.run([*CLI, *SWEEP_ARGS], capture_output=True)
    ok = (
        verify.returncode == 0
        and first.returncode == 0
        and first.stdout == second.stdout
    )
    line = _report(
        "09 cli determinism",
        ok,
        f"verify exit {verify.returncode}, sweep reruns byte-identical: "
        f"{first.stdout == second.stdout}",
    )
    assert ok, line
