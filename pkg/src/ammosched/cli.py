"""Command-line entry point.

Every run writes its outputs plus ``manifest.json`` into ``--out``.  Exit
codes: 0 success, 1 solve or verification failure, 2 usage or input error.
Failures print one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import platform
import sys
import time
from pathlib import Path

from . import __version__
from .harness.profiles import ProfileSpec, gen_profile
from .harness.schemes import NO_STORAGE, STANDARD_SCHEMES, get_scheme
from .milp import SolverConfig, default_solver_command
from .params import (ConfigError, estimate_capacitance, estimate_loss_resistance, load_geometry, load_params,
                     to_mapping)
from .resources import ASR_GEOMETRY, LULL_CONFIG, LULL_SCENARIO, MS_TANK_GEOMETRY, data_path
from .sched.decode import verify_schedule
from .sched.model import BuildOptions
from .sched.scenario import (SCHEDULE_COLUMNS, ScenarioError, ScenarioProfile, dump_json, read_schedule_csv,
                             read_scenario, write_schedule_csv, write_scenario)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
TEMP_TOL_K = 2.0  # replay deviation accepted by `verify`


class UsageError(Exception):
    pass


class RunFailed(Exception):
    pass


def _emit_error(kind: str, message: str, command: str | None) -> None:
    print(json.dumps({"error": kind, "message": message, "command": command}), file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _emit_error("usage", message, None)
        raise SystemExit(EXIT_USAGE)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _lull(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected START:END hours, got {text!r}") from exc
    return a, b


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ammosched", description="Thermal-aware scheduling of a renewable ammonia plant.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, scheme_default="scheme5"):
        sp.add_argument("--scenario", help="scenario CSV (TOML sidecar alongside); default: bundled lull scenario")
        sp.add_argument("--config", help="flat TOML parameter file; default: built-in parameters, "
                        "or the bundled lull settings when --scenario is omitted too")
        sp.add_argument("--scheme", default=scheme_default, help="storage scheme name (scheme1..5, none)")
        sp.add_argument("--solver", help="solver command template with {lp} and {sol}")
        sp.add_argument("--tiny", action="store_true", help="force the bundled solver")
        sp.add_argument("--time-limit", type=float, default=600.0)
        sp.add_argument("--mip-gap", type=float, default=1e-7)
        sp.add_argument("--horizon", type=int, help="use only the first N steps of the scenario")
        sp.add_argument("--dt", type=float, help="expected step length in s (checked against the scenario)")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--self-check", action="store_true", help="re-read and validate every output file")

    sp = sub.add_parser("solve", help="solve one scenario for one scheme")
    common(sp)
    sp.add_argument("--quadratic", action="store_true", help="squared temperature penalty (external solver)")

    sp = sub.add_parser("verify", help="replay a schedule CSV and re-check balances")
    sp.add_argument("schedule", help="schedule.csv from a solve run")
    sp.add_argument("--config")
    sp.add_argument("--scheme", default="scheme5")
    sp.add_argument("--out", default="out")
    sp.add_argument("--tolerance", type=float, default=1e-6, help="relative balance tolerance")
    sp.add_argument("--self-check", action="store_true")

    sp = sub.add_parser("compare", help="solve every storage scheme on one scenario")
    common(sp)
    sp.add_argument("--schemes", default=",".join(s.name for s in (*STANDARD_SCHEMES, NO_STORAGE)))
    sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("sweep", help="two-axis storage size sweep")
    common(sp)
    sp.add_argument("--axes", default="ms_volume,bes_energy", help="two of bes_energy, hs_capacity, ms_volume")
    sp.add_argument("--grid1", type=_floats, required=True, help="sizes along the first axis (SI units)")
    sp.add_argument("--grid2", type=_floats, required=True, help="sizes along the second axis (SI units)")
    sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("igdt", help="robust or opportunistic uncertainty curve")
    common(sp)
    sp.add_argument("--kind", choices=("robust", "opportunistic"), default="robust")
    sp.add_argument("--beta", type=_floats, default=[0.0, 0.05, 0.1, 0.15, 0.2],
                    help="comma-separated deviation factors, ascending")
    sp.add_argument("--alpha-cap", type=float, default=1.0)
    sp.add_argument("--json", action="store_true", help="also write igdt.json with embedded schedules")
    sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("rolling", help="consecutive windows over a long profile")
    common(sp)
    sp.add_argument("--schemes", default=",".join(s.name for s in STANDARD_SCHEMES))
    sp.add_argument("--window", type=int, default=360, help="steps per window")
    sp.add_argument("--reset", action="store_true", help="solve windows independently (cyclic closure)")
    sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("estimate-params", help="lumped heat capacity and loss resistances from geometry")
    sp.add_argument("--geometry", help="reactor geometry TOML; default: bundled")
    sp.add_argument("--ms-geometry", help="salt tank geometry TOML; default: bundled")
    sp.add_argument("--out", help="optionally also write estimate.json here")

    sp = sub.add_parser("gen-profile", help="synthetic wind/PV scenario")
    sp.add_argument("--horizon", type=int, default=48, help="number of steps")
    sp.add_argument("--dt", type=float, default=3600.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--lull", type=_lull, action="append", default=[], help="zero-renewable window START:END in hours")
    sp.add_argument("--wind-mean", type=float, default=0.35)
    sp.add_argument("--wind-capacity", type=float, default=450e6)
    sp.add_argument("--pv-capacity", type=float, default=150e6)
    sp.add_argument("--initial-load", type=float)
    sp.add_argument("--out", required=True, help="scenario CSV path; a TOML sidecar is written next to it")
    return p


# ---------------------------------------------------------------------------

def _sha256(path) -> str | None:
    if path is None:
        return None
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _load_inputs(args):
    scenario_path = Path(args.scenario) if args.scenario else data_path(LULL_SCENARIO)
    if args.scenario is None and args.config is None:
        # the bundled scenario comes with its own plant settings
        args.config = str(data_path(LULL_CONFIG))
    scenario = read_scenario(scenario_path)
    if args.dt is not None and abs(args.dt - scenario.dt) > 1e-9:
        raise UsageError(f"--dt {args.dt:g} does not match the scenario step {scenario.dt:g}")
    if args.horizon is not None:
        if not 0 < args.horizon <= scenario.horizon_steps:
            raise UsageError(f"--horizon must lie in 1..{scenario.horizon_steps}")
        scenario = scenario.window(0, args.horizon, name=scenario.name)
    params = load_params(args.config)
    return scenario, scenario_path, params


def _solver(args) -> SolverConfig:
    return SolverConfig(command=args.solver, tiny=args.tiny, time_limit=args.time_limit, mip_gap=args.mip_gap)


def _manifest(args, out: Path, params=None, scenario_path=None, status=None, wall=0.0, extra=None) -> dict:
    flags = {k: v for k, v in vars(args).items() if k not in ("command",)}
    solver_cmd = None
    if hasattr(args, "tiny"):
        solver_cmd = "bundled" if args.tiny else (args.solver or default_solver_command())
    config = getattr(args, "config", None)
    man = {
        "command": args.command,
        "config_path": config,
        "scenario_path": None if scenario_path is None else str(scenario_path),
        "output_dir": str(out),
        "solver_command": solver_cmd,
        "seed": getattr(args, "seed", None),
        "flags": flags,
        "inputs_sha256": {"config": _sha256(config), "scenario": _sha256(scenario_path)},
        "parameters": None if params is None else to_mapping(params),
        "status": status,
        "wall_time_s": wall,
        "versions": {"ammosched": __version__, "python": platform.python_version()},
        "nondeterminism": "external MIP solvers may return different optima of equal objective",
    }
    if extra:
        man.update(extra)
    dump_json(man, out / "manifest.json")
    return man


def _check_csv(path: Path, header: list[str]) -> None:
    with path.open(newline="") as fh:
        got = next(csv.reader(fh), None)
    if got != header:
        raise RunFailed(f"self-check: {path.name} header {got} != {header}")


def _self_check(out: Path, files: dict) -> None:
    for name, header in files.items():
        path = out / name
        if not path.exists():
            raise RunFailed(f"self-check: {name} missing")
        if name.endswith(".json"):
            json.loads(path.read_text())
        elif name == "schedule.csv":
            _check_csv(path, [c for c, _ in SCHEDULE_COLUMNS])
            read_schedule_csv(path)
        elif header is not None:
            _check_csv(path, header)


def _metrics_header():
    from .harness.metrics import METRIC_COLUMNS
    return ["scheme", *(c for c, _ in METRIC_COLUMNS), "status"]


# ---------------------------------------------------------------------------

def cmd_solve(args) -> int:
    from .harness.runner import run_one, write_comparison_csv

    scenario, scenario_path, params = _load_inputs(args)
    scheme = get_scheme(args.scheme)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    rec = run_one(scenario, params, scheme, _solver(args), BuildOptions(quadratic_penalty=args.quadratic))
    wall = time.perf_counter() - t0
    _manifest(args, out, rec.params or params, scenario_path, rec.status, wall,
              {"solver_wall_time_s": rec.wall_time, "error_detail": rec.error})
    if not rec.ok:
        raise RunFailed(rec.error or f"solve ended with status {rec.status}")
    write_schedule_csv(rec.schedule, out / "schedule.csv")
    dump_json(rec.breakdown.to_dict(), out / "breakdown.json")
    dump_json(rec.verify, out / "verify.json")
    write_comparison_csv([rec], out / "metrics.csv")
    if args.self_check:
        _self_check(out, {"schedule.csv": None, "breakdown.json": None, "verify.json": None,
                          "metrics.csv": _metrics_header(), "manifest.json": None})
    print(json.dumps({"status": rec.status, "objective_kCNY": rec.breakdown.objective,
                      "net_revenue_CNY": rec.breakdown.net_revenue, "out": str(out)}))
    return EXIT_OK


def cmd_verify(args) -> int:
    sched = read_schedule_csv(args.schedule)
    params = get_scheme(args.scheme).apply(load_params(args.config))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    rep = verify_schedule(sched, params, tol=args.tolerance)
    ok = not rep["flagged"] and rep["max_temp_deviation_K"] < TEMP_TOL_K
    rep["passed"] = ok
    dump_json(rep, out / "verify.json")
    _manifest(args, out, params, None, "passed" if ok else "failed", time.perf_counter() - t0,
              {"schedule_path": str(args.schedule), "inputs_sha256": {"schedule": _sha256(args.schedule),
                                                                      "config": _sha256(args.config)}})
    if args.self_check:
        _self_check(out, {"verify.json": None, "manifest.json": None})
    print(json.dumps({"passed": ok, "max_temp_deviation_K": rep["max_temp_deviation_K"],
                      "flagged": len(rep["flagged"])}))
    if not ok:
        raise RunFailed(f"verification failed: {len(rep['flagged'])} flagged steps, "
                        f"max temperature deviation {rep['max_temp_deviation_K']:.3g} K")
    return EXIT_OK


def cmd_compare(args) -> int:
    from .harness.runner import run_scheme_comparison, write_comparison_csv

    scenario, scenario_path, params = _load_inputs(args)
    schemes = [get_scheme(s) for s in args.schemes.split(",") if s.strip()]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    records = run_scheme_comparison(scenario, params, schemes, _solver(args), workers=args.workers)
    write_comparison_csv(records, out / "metrics.csv")
    for r in records:
        if r.ok:
            write_schedule_csv(r.schedule, out / f"schedule_{r.scheme}.csv")
    _manifest(args, out, params, scenario_path, {r.scheme: r.status for r in records},
              time.perf_counter() - t0, {"errors": {r.scheme: r.error for r in records if r.error}})
    if args.self_check:
        _self_check(out, {"metrics.csv": _metrics_header(), "manifest.json": None})
    print(json.dumps({r.scheme: r.status for r in records}))
    failed = [r.scheme for r in records if not r.ok]
    if failed:
        raise RunFailed(f"schemes without a schedule: {', '.join(failed)}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .harness.runner import sensitivity_sweep, write_sweep_csv

    scenario, scenario_path, params = _load_inputs(args)
    axes = [a.strip() for a in args.axes.split(",")]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    cells = sensitivity_sweep(scenario, params, axes, [args.grid1, args.grid2], get_scheme(args.scheme),
                              _solver(args), workers=args.workers)
    write_sweep_csv(cells, out / "sweep.csv")
    _manifest(args, out, params, scenario_path, [c.record.status for c in cells], time.perf_counter() - t0)
    if args.self_check:
        _self_check(out, {"sweep.csv": ["axis1", "axis2", "net_revenue_CNY", "cum_temp_K"],
                          "manifest.json": None})
    bad = sum(1 for c in cells if c.metrics is None)
    print(json.dumps({"cells": len(cells), "failed": bad}))
    if bad:
        raise RunFailed(f"{bad} of {len(cells)} sweep cells failed")
    return EXIT_OK


def cmd_igdt(args) -> int:
    from .igdt import baseline_revenue, sweep, write_curve_csv, write_curve_json

    scenario, scenario_path, params = _load_inputs(args)
    scheme = get_scheme(args.scheme)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    solver = _solver(args)
    base = baseline_revenue(scenario, params, scheme, solver)
    results = sweep(args.kind, args.beta, scenario, params, scheme, base, solver, args.alpha_cap,
                    workers=args.workers)
    write_curve_csv(results, out / "igdt.csv")
    if args.json:
        write_curve_json(results, out / "igdt.json", with_schedules=True)
    _manifest(args, out, scheme.apply(params), scenario_path, [r.status.value for r in results],
              time.perf_counter() - t0, {"baseline_objective_CNY": base})
    if args.self_check:
        _self_check(out, {"igdt.csv": ["beta", "alpha", "status"], "manifest.json": None})
    print(json.dumps({"baseline_objective_CNY": base,
                      "curve": [[r.beta, r.alpha, r.status.value] for r in results]}))
    return EXIT_OK


def cmd_rolling(args) -> int:
    from .harness.runner import run_rolling, write_rolling_csv

    scenario, scenario_path, params = _load_inputs(args)
    schemes = [get_scheme(s) for s in args.schemes.split(",") if s.strip()]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    res = run_rolling(scenario, args.window, params, schemes, chained=not args.reset, solver=_solver(args),
                      workers=args.workers)
    write_rolling_csv(res, out / "rolling.csv")
    _manifest(args, out, params, scenario_path, [r.status for _, r in res.rows], time.perf_counter() - t0)
    if args.self_check:
        _self_check(out, {"rolling.csv": ["window", *_metrics_header()], "manifest.json": None})
    failed = sum(1 for _, r in res.rows if not r.ok)
    print(json.dumps({"windows": len(res.rows), "failed": failed}))
    if failed:
        raise RunFailed(f"{failed} window solves failed")
    return EXIT_OK


def cmd_estimate(args) -> int:
    asr = load_geometry(args.geometry or data_path(ASR_GEOMETRY))
    tank = load_geometry(args.ms_geometry or data_path(MS_TANK_GEOMETRY))
    res = {"C_asr_J_per_K": estimate_capacitance(asr),
           "R_asr_K_per_W": estimate_loss_resistance(asr),
           "R_ms_K_per_W": estimate_loss_resistance(tank)}
    print(json.dumps(res))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        dump_json(res, out / "estimate.json")
    return EXIT_OK


def cmd_gen_profile(args) -> int:
    spec = ProfileSpec(steps=args.horizon, dt=args.dt, wind_mean=args.wind_mean,
                       wind_capacity=args.wind_capacity, pv_capacity=args.pv_capacity, lulls=tuple(args.lull))
    wind, pv = gen_profile(spec, args.seed)
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    scenario = ScenarioProfile(dt=args.dt, wind=wind, pv=pv, initial_load=args.initial_load,
                               name=f"{path.stem}")
    write_scenario(scenario, path)
    print(json.dumps({"out": str(path), "steps": args.horizon, "seed": args.seed}))
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve, "verify": cmd_verify, "compare": cmd_compare, "sweep": cmd_sweep,
    "igdt": cmd_igdt, "rolling": cmd_rolling, "estimate-params": cmd_estimate, "gen-profile": cmd_gen_profile,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError, ScenarioError, FileNotFoundError) as exc:
        _emit_error(type(exc).__name__, str(exc), args.command)
        return EXIT_USAGE
    except RunFailed as exc:
        _emit_error("RunFailed", str(exc), args.command)
        return EXIT_FAIL
    except Exception as exc:  # solver process errors and anything unexpected
        _emit_error(type(exc).__name__, str(exc), args.command)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
