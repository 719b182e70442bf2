"""Command-line front end.

Subcommands
-----------
solve    closed-form optimum at one parameter point
statics  analytic and finite-difference sensitivities at the optimum
sweep    evaluate a parameter grid; CSV or JSON records in grid order
curve    cdf/pdf/hazard/objective tables on an even deduction grid
verify   run the internal cross-check suite

Parameters come from flags (--A --k --beta --z --t --pi), from a flat JSON
config file (--config or the DEDUCTOPT_CONFIG environment variable), or
both, with flags winning.  Sweep axes use START:STOP:COUNT flag syntax or
[start, stop, count] in the config file.  Unknown config keys are rejected.

Exit codes: 0 success, 1 configuration error, 2 infeasible parameter point
(a machine-readable {"kind", "message"} record is printed), 3 verification
failure.

All numeric output is rendered at a fixed precision (--precision, default
12 digits), so identical inputs produce byte-identical output.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace

from .errors import ModelError
from .penalty import (
    HazardParams,
    Problem,
    TaxPolicy,
    penalty_cdf,
    penalty_cdf_from_hazard,
)
from .solver import (
    Solution,
    comparative_statics,
    interior_upper_bound,
    solve_closed_form,
    solve_numeric,
)
from .sweep import (
    AXIS_ORDER,
    AxisRange,
    GridSpec,
    SweepRecord,
    enforcement_shift,
    run_sweep,
    sample_curves,
)

__all__ = ["ENV_CONFIG", "RunConfig", "main"]

ENV_CONFIG = "DEDUCTOPT_CONFIG"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY = 3

SWEEP_COLUMNS = (
    "A", "k", "beta", "z", "t", "pi", "B", "status",
    "m_star", "W", "objective", "foc_residual", "soc_margin",
    "dm_dA", "dm_dB", "dm_dk",
)
CURVE_COLUMNS = ("m", "F", "f", "lambda", "EU")

_SETTING_KEYS = ("format", "out", "precision", "n", "m_max", "intensity", "tolerance")

# default verification grid: the cross-product exercised by the test suite
_VERIFY_A = (0.5, 1.0, 2.0)
_VERIFY_K = (1.25, 2.0, 3.0)
_VERIFY_B = (0.9, 1.0, 1.5, 2.5)
_VERIFY_T = 0.3
_VERIFY_PI = 10.0

_TOL_ORACLE = 1e-6
_TOL_STATICS = 1e-5
_TOL_QUAD = 1e-8


class ConfigError(Exception):
    """Malformed flags or config file; maps to exit code 1."""


@dataclass
class RunConfig:
    """Merged configuration for one command invocation."""

    params: dict[str, float | AxisRange] = field(default_factory=dict)
    format: str | None = None  # "json" | "csv"; each command has a default
    out: str | None = None
    precision: int = 12
    n: int = 200
    m_max: float | None = None
    intensity: float = 0.0
    tolerance: float | None = None


# -- configuration ---------------------------------------------------------


def _parse_axis_token(name: str, text: str) -> float | AxisRange:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{name}: range syntax is START:STOP:COUNT, got {text!r}")
        try:
            return AxisRange(float(parts[0]), float(parts[1]), int(parts[2]))
        except (ValueError, ModelError) as exc:
            raise ConfigError(f"{name}: {exc}") from exc
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"{name}: not a number: {text!r}") from exc


def _axis_from_config(name: str, value: object) -> float | AxisRange:
    if isinstance(value, bool):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return _parse_axis_token(name, value)
    if isinstance(value, list):
        if len(value) != 3:
            raise ConfigError(f"{name}: range lists are [start, stop, count], got {value!r}")
        try:
            return AxisRange(float(value[0]), float(value[1]), int(value[2]))
        except (ValueError, TypeError, ModelError) as exc:
            raise ConfigError(f"{name}: {exc}") from exc
    raise ConfigError(f"{name}: expected a number or [start, stop, count], got {value!r}")


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path!r} must hold a flat JSON object")
    known = set(AXIS_ORDER) | set(_SETTING_KEYS)
    for key in raw:
        if key not in known:
            raise ConfigError(f"config file {path!r}: unknown key {key!r}")
    return raw


def _int_setting(name: str, value: object) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return value


def _float_setting(name: str, value: object) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    return float(value)


def _gather_config(args: argparse.Namespace, allow_ranges: bool) -> RunConfig:
    cfg = RunConfig()
    path = getattr(args, "config", None) or os.environ.get(ENV_CONFIG)
    if path:
        raw = _load_config_file(path)
        for name in AXIS_ORDER:
            if name in raw:
                cfg.params[name] = _axis_from_config(name, raw[name])
        if "format" in raw:
            cfg.format = raw["format"]
        if "out" in raw:
            cfg.out = raw["out"]
        if "precision" in raw:
            cfg.precision = _int_setting("precision", raw["precision"])
        if "n" in raw:
            cfg.n = _int_setting("n", raw["n"])
        if "m_max" in raw:
            cfg.m_max = _float_setting("m_max", raw["m_max"])
        if "intensity" in raw:
            cfg.intensity = _float_setting("intensity", raw["intensity"])
        if "tolerance" in raw:
            cfg.tolerance = _float_setting("tolerance", raw["tolerance"])

    for name in AXIS_ORDER:
        text = getattr(args, name, None)
        if text is not None:
            cfg.params[name] = _parse_axis_token(name, text)
    if getattr(args, "format", None) is not None:
        cfg.format = args.format
    if getattr(args, "out", None) is not None:
        cfg.out = args.out
    if getattr(args, "precision", None) is not None:
        cfg.precision = args.precision
    if getattr(args, "n", None) is not None:
        cfg.n = args.n
    if getattr(args, "m_max", None) is not None:
        cfg.m_max = args.m_max
    if getattr(args, "intensity", None) is not None:
        cfg.intensity = args.intensity
    if getattr(args, "tolerance", None) is not None:
        cfg.tolerance = args.tolerance

    if cfg.format is not None and cfg.format not in ("json", "csv"):
        raise ConfigError(f"format must be json or csv, got {cfg.format!r}")
    if not 0 <= cfg.precision <= 17:
        raise ConfigError(f"precision must be in [0, 17], got {cfg.precision!r}")
    if cfg.n < 2:
        raise ConfigError(f"n must be >= 2, got {cfg.n!r}")
    if cfg.m_max is not None and not cfg.m_max > 0.0:
        raise ConfigError(f"m_max must be > 0, got {cfg.m_max!r}")
    if not abs(cfg.intensity) < 1.0:
        raise ConfigError(f"|intensity| must be < 1, got {cfg.intensity!r}")
    if cfg.tolerance is not None and not cfg.tolerance > 0.0:
        raise ConfigError(f"tolerance must be > 0, got {cfg.tolerance!r}")
    if not allow_ranges:
        for name, value in cfg.params.items():
            if isinstance(value, AxisRange):
                raise ConfigError(f"{name}: ranges are only valid for the sweep command")
    return cfg


def _scalar_params(cfg: RunConfig) -> dict[str, float]:
    missing = [name for name in AXIS_ORDER if name not in cfg.params]
    if missing:
        raise ConfigError(f"missing parameter(s): {', '.join(missing)}")
    return {name: cfg.params[name] for name in AXIS_ORDER}


def _problem_from(cfg: RunConfig) -> Problem:
    values = _scalar_params(cfg)
    try:
        policy = TaxPolicy(t=values["t"], beta=values["beta"], z=values["z"])
        hazard = HazardParams(a=values["A"], k=values["k"])
        if cfg.intensity != 0.0:
            hazard = enforcement_shift(hazard, cfg.intensity)
        return Problem(pi=values["pi"], policy=policy, hazard=hazard)
    except ModelError as exc:
        raise ConfigError(str(exc)) from exc


def _grid_from(cfg: RunConfig) -> GridSpec:
    values = _scalar_params(cfg)
    try:
        spec = GridSpec(**values)
    except ModelError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.intensity != 0.0:
        spec = _shift_grid(spec, cfg.intensity)
    return spec


def _shift_grid(spec: GridSpec, intensity: float) -> GridSpec:
    """Apply the enforcement shift to the A and k axes of a grid."""

    def scale(axis: float | AxisRange, factor: float) -> float | AxisRange:
        if isinstance(axis, AxisRange):
            return AxisRange(axis.start * factor, axis.stop * factor, axis.count)
        return axis * factor

    try:
        return replace(
            spec,
            A=scale(spec.A, 1.0 + intensity),
            k=scale(spec.k, 1.0 / (1.0 + intensity)),
        )
    except ModelError as exc:
        raise ConfigError(str(exc)) from exc


# -- rendering --------------------------------------------------------------


def fmt(x: float, precision: int) -> str:
    """Fixed-width decimal for moderate magnitudes, scientific otherwise."""
    a = abs(x)
    if a != 0.0 and (a < 1e-4 or a >= 1e16):
        return f"{x:.{precision}e}"
    return f"{x:.{precision}f}"


def _cell(value: object, precision: int) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return fmt(float(value), precision)


def _json_scalar(value: object, precision: int) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value)
    return fmt(float(value), precision)


def _json_object(pairs: list[tuple[str, object]], precision: int) -> str:
    body = ",\n".join(
        f'  "{key}": {_json_scalar(value, precision)}' for key, value in pairs
    )
    return "{\n" + body + "\n}"


def _json_array(rows: list[list[tuple[str, object]]], precision: int) -> str:
    items = []
    for pairs in rows:
        body = ", ".join(
            f'"{key}": {_json_scalar(value, precision)}' for key, value in pairs
        )
        items.append("  {" + body + "}")
    return "[\n" + ",\n".join(items) + "\n]"


def _csv_table(header: tuple[str, ...], rows: list[list[object]], precision: int) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(value, precision) for value in row))
    return "\n".join(lines)


def _emit(text: str, cfg: RunConfig) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit_error(exc: ModelError, cfg: RunConfig) -> int:
    record = _json_object(
        [("kind", type(exc).__name__), ("message", str(exc))], cfg.precision
    )
    sys.stdout.write(record + "\n")
    return EXIT_INFEASIBLE


# -- subcommands -------------------------------------------------------------


def _solution_pairs(sol: Solution) -> list[tuple[str, object]]:
    return [
        ("m_star", sol.m_star),
        ("lambert_arg", sol.lambert_arg),
        ("w_value", sol.w_value),
        ("objective", sol.objective),
        ("foc_residual", sol.foc_residual),
        ("soc_margin", sol.soc_margin),
        ("upper_bound", sol.upper_bound),
        ("shape_warning", sol.shape_warning),
    ]


def cmd_solve(cfg: RunConfig) -> int:
    problem = _problem_from(cfg)
    try:
        sol = solve_closed_form(problem)
    except ModelError as exc:
        return _emit_error(exc, cfg)
    pairs = _solution_pairs(sol)
    if (cfg.format or "json") == "csv":
        header = tuple(key for key, _ in pairs)
        _emit(_csv_table(header, [[v for _, v in pairs]], cfg.precision), cfg)
    else:
        _emit(_json_object(pairs, cfg.precision), cfg)
    return EXIT_OK


def cmd_statics(cfg: RunConfig) -> int:
    problem = _problem_from(cfg)
    try:
        sol = solve_closed_form(problem)
        rep = comparative_statics(problem, sol)
    except ModelError as exc:
        return _emit_error(exc, cfg)
    pairs: list[tuple[str, object]] = [
        ("m_star", sol.m_star),
        ("w_value", sol.w_value),
        ("dm_dA", rep.dm_dA),
        ("dm_dB", rep.dm_dB),
        ("dm_dk", rep.dm_dk),
        ("fd_dm_dA", rep.fd_dm_dA),
        ("fd_dm_dB", rep.fd_dm_dB),
        ("fd_dm_dk", rep.fd_dm_dk),
        ("max_rel_disagreement", rep.max_rel_disagreement),
    ]
    if (cfg.format or "json") == "csv":
        header = tuple(key for key, _ in pairs)
        _emit(_csv_table(header, [[v for _, v in pairs]], cfg.precision), cfg)
    else:
        _emit(_json_object(pairs, cfg.precision), cfg)
    return EXIT_OK


def _record_row(record: SweepRecord) -> list[object]:
    return [
        record.A, record.k, record.beta, record.z, record.t, record.pi,
        record.B, record.status,
        record.m_star, record.w_value, record.objective,
        record.foc_residual, record.soc_margin,
        record.dm_dA, record.dm_dB, record.dm_dk,
    ]


def cmd_sweep(cfg: RunConfig) -> int:
    spec = _grid_from(cfg)
    records = run_sweep(spec)
    rows = [_record_row(rec) for rec in records]
    if (cfg.format or "csv") == "json":
        pairs = [list(zip(SWEEP_COLUMNS, row)) for row in rows]
        _emit(_json_array(pairs, cfg.precision), cfg)
    else:
        _emit(_csv_table(SWEEP_COLUMNS, rows, cfg.precision), cfg)
    return EXIT_OK


def cmd_curve(cfg: RunConfig) -> int:
    problem = _problem_from(cfg)
    m_max = cfg.m_max
    if m_max is None:
        m_max = 2.0 * interior_upper_bound(problem.hazard)
    try:
        samples = sample_curves(problem.hazard, problem, m_max, cfg.n)
    except ModelError as exc:
        return _emit_error(exc, cfg)
    rows = [[s.m, s.F, s.f, s.lam, s.EU] for s in samples]
    if (cfg.format or "csv") == "json":
        pairs = [list(zip(CURVE_COLUMNS, row)) for row in rows]
        _emit(_json_array(pairs, cfg.precision), cfg)
    else:
        _emit(_csv_table(CURVE_COLUMNS, rows, cfg.precision), cfg)
    return EXIT_OK


# -- verification ------------------------------------------------------------


def _verify_points(cfg: RunConfig) -> list[Problem]:
    if cfg.params:
        return [_problem_from(cfg)]
    points = []
    for a in _VERIFY_A:
        for k in _VERIFY_K:
            for b in _VERIFY_B:
                # realize B with beta when B <= 1, with the surcharge above
                beta, z = (b, 0.0) if b <= 1.0 else (1.0, b - 1.0)
                points.append(
                    Problem(
                        pi=_VERIFY_PI,
                        policy=TaxPolicy(t=_VERIFY_T, beta=beta, z=z),
                        hazard=HazardParams(a=a, k=k),
                    )
                )
    return points


def cmd_verify(cfg: RunConfig) -> int:
    tol_oracle = cfg.tolerance if cfg.tolerance is not None else _TOL_ORACLE
    tol_statics = cfg.tolerance if cfg.tolerance is not None else _TOL_STATICS
    tol_quad = cfg.tolerance if cfg.tolerance is not None else _TOL_QUAD
    single_point = bool(cfg.params)

    worst_oracle = 0.0
    worst_statics = 0.0
    worst_quad = 0.0
    checked = 0
    hazards: dict[tuple[float, float], HazardParams] = {}
    try:
        for problem in _verify_points(cfg):
            sol = solve_closed_form(problem)
            numeric = solve_numeric(problem)
            rep = comparative_statics(problem, sol)
            worst_oracle = max(
                worst_oracle, abs(sol.m_star - numeric) / abs(sol.m_star)
            )
            worst_statics = max(worst_statics, rep.max_rel_disagreement)
            hazards[(problem.hazard.a, problem.hazard.k)] = problem.hazard
            checked += 1
    except ModelError as exc:
        if single_point:
            return _emit_error(exc, cfg)
        raise

    # cdf reconstruction on a log grid per distinct hazard
    grid = [10.0 ** (-3.0 + 4.0 * j / 16.0) for j in range(17)]
    for hazard in hazards.values():
        for m in grid:
            gap = abs(penalty_cdf_from_hazard(m, hazard) - penalty_cdf(m, hazard))
            worst_quad = max(worst_quad, gap)

    lines = []
    failures = 0
    for name, worst, tol in (
        ("closed_vs_numeric", worst_oracle, tol_oracle),
        ("statics_fd", worst_statics, tol_statics),
        ("cdf_quadrature", worst_quad, tol_quad),
    ):
        ok = worst <= tol
        failures += 0 if ok else 1
        lines.append(
            f"{name}: worst {worst:.3e} tol {tol:.1e} {'PASS' if ok else 'FAIL'}"
        )
    verdict = "PASS" if failures == 0 else "FAIL"
    lines.append(f"verify: {verdict} ({3 - failures}/3 checks, {checked} points)")
    _emit("\n".join(lines), cfg)
    return EXIT_OK if failures == 0 else EXIT_VERIFY


# -- entry point --------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse that reports bad usage on exit code 1 instead of 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(message)


def _add_param_flags(parser: argparse.ArgumentParser, ranges: bool) -> None:
    hint = "VALUE or START:STOP:COUNT" if ranges else "VALUE"
    for name in AXIS_ORDER:
        parser.add_argument(f"--{name}", metavar=hint, dest=name)
    parser.add_argument("--config", help=f"JSON config path (or ${ENV_CONFIG})")
    parser.add_argument("--format", choices=("json", "csv"))
    parser.add_argument("--out", help="write output to this file")
    parser.add_argument("--precision", type=int, help="digits rendered (default 12)")
    parser.add_argument(
        "--intensity",
        type=float,
        help="enforcement shift applied to (A, k) before solving",
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="deductopt", description=__doc__.split("\n\n")[0])
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="closed-form optimal deduction")
    _add_param_flags(solve, ranges=False)

    statics = commands.add_parser("statics", help="sensitivities at the optimum")
    _add_param_flags(statics, ranges=False)

    sweep = commands.add_parser("sweep", help="evaluate a parameter grid")
    _add_param_flags(sweep, ranges=True)

    curve = commands.add_parser("curve", help="cdf/pdf/hazard/objective table")
    _add_param_flags(curve, ranges=False)
    curve.add_argument("--n", type=int, help="samples per curve (default 200)")
    curve.add_argument("--m-max", dest="m_max", type=float,
                       help="largest deduction sampled (default 2x upper bound)")

    verify = commands.add_parser("verify", help="run the cross-check suite")
    _add_param_flags(verify, ranges=False)
    verify.add_argument("--tolerance", type=float,
                        help="override every check tolerance")
    return parser


_DISPATCH = {
    "solve": cmd_solve,
    "statics": cmd_statics,
    "sweep": cmd_sweep,
    "curve": cmd_curve,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _gather_config(args, allow_ranges=args.command == "sweep")
        return _DISPATCH[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
