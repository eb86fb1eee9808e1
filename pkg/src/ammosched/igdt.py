"""Information-gap robust and opportunistic scheduling.

Both programs embed the uncertainty level alpha as one scalar variable in
the deterministic model.  Renewable availability becomes (1 - alpha) * P
(robust) or (1 + alpha) * P (opportunistic); since P is data the power
balance stays linear.  The robust program maximises alpha subject to
F >= (1 - beta) * C_c, the opportunistic one minimises alpha subject to
F >= (1 + beta) * C_c.  F is the deterministic objective (weighted net
revenue minus the temperature regulation term, in CNY) and C_c its optimal
value on the nominal profile, so alpha = 0 reproduces the deterministic
optimum exactly.  With zero temperature weight F is plain net revenue.

``bisection_alpha`` answers the same question by repeated deterministic
solves at fixed alpha and is the independent check on the embedded form.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from .milp import SolverConfig, Status
from .params import ConfigError, PlantParams
from .sched.decode import ObjectiveBreakdown, decode
from .sched.model import KCNY, BuildOptions, ScheduleModel, build_full_model
from .sched.scenario import ScenarioProfile, Schedule, schedule_to_json
from .sched.solve import solve_scenario


class IgdtKind(str, Enum):
    ROBUST = "robust"
    OPPORTUNISTIC = "opportunistic"


@dataclass(frozen=True)
class IgdtSpec:
    kind: IgdtKind
    deviation_factor: float  # beta
    baseline_revenue: float  # C_c, CNY (deterministic optimal objective)

    def __post_init__(self):
        object.__setattr__(self, "kind", IgdtKind(self.kind))
        if not self.deviation_factor >= 0:
            raise ConfigError("beta", "deviation factor must be non-negative")
        if not math.isfinite(self.baseline_revenue):
            raise ConfigError("baseline_revenue", "must be finite")

    @property
    def target(self) -> float:
        """Floor on the objective, CNY."""
        sign = -1.0 if self.kind is IgdtKind.ROBUST else 1.0
        return (1.0 + sign * self.deviation_factor) * self.baseline_revenue


@dataclass
class IgdtResult:
    kind: IgdtKind
    beta: float
    status: Status
    alpha: float | None = None
    schedule: Schedule | None = None
    breakdown: ObjectiveBreakdown | None = None
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return self.alpha is not None


def baseline_revenue(scenario: ScenarioProfile, params: PlantParams, scheme=None,
                     solver: SolverConfig | None = None, options: BuildOptions | None = None) -> float:
    """Optimal deterministic objective in CNY (C_c)."""
    opts = replace(options or BuildOptions(), quadratic_penalty=False, igdt=None)
    res = solve_scenario(scenario, params, scheme, opts, solver)
    if not res.ok:
        raise ConfigError("baseline", f"deterministic baseline is {res.status.value}")
    return res.breakdown.objective * KCNY


def build_igdt_model(scenario: ScenarioProfile, params: PlantParams, scheme, spec: IgdtSpec,
                     alpha_cap: float = 1.0, options: BuildOptions | None = None) -> ScheduleModel:
    opts = replace(options or BuildOptions(), igdt=spec.kind.value, alpha_cap=alpha_cap,
                   quadratic_penalty=False)
    ctx = build_full_model(scenario, params, scheme, opts)
    ctx.model.add(ctx.model.objective, ">=", spec.target / KCNY, "igdt_floor")
    direction = "max" if spec.kind is IgdtKind.ROBUST else "min"
    ctx.model.set_objective(ctx.alpha, direction)
    return ctx


def solve_igdt(scenario: ScenarioProfile, params: PlantParams, scheme, spec: IgdtSpec,
               solver: SolverConfig | None = None, alpha_cap: float = 1.0,
               options: BuildOptions | None = None) -> IgdtResult:
    ctx = build_igdt_model(scenario, params, scheme, spec, alpha_cap, options)
    sol = (solver or SolverConfig()).solve(ctx.model)
    out = IgdtResult(spec.kind, spec.deviation_factor, sol.status, wall_time=sol.wall_time)
    if sol.status is Status.OPTIMAL:
        out.alpha = min(max(sol[ctx.alpha], 0.0), ctx.alpha.upper)
        out.schedule, out.breakdown = decode(ctx, sol, check_objective=False)
    return out


def _spec(kind, beta, scenario, params, scheme, baseline, solver, options) -> IgdtSpec:
    if baseline is None:
        baseline = baseline_revenue(scenario, params, scheme, solver, options)
    return IgdtSpec(kind, beta, baseline)


def solve_robust(scenario: ScenarioProfile, params: PlantParams, scheme=None, beta_r: float = 0.0,
                 baseline: float | None = None, solver: SolverConfig | None = None,
                 options: BuildOptions | None = None) -> IgdtResult:
    """Largest uniform renewable shortfall keeping the objective above (1 - beta_r) C_c.

    ``baseline`` is C_c in CNY; when omitted the deterministic model is
    solved first.
    """
    spec = _spec(IgdtKind.ROBUST, beta_r, scenario, params, scheme, baseline, solver, options)
    return solve_igdt(scenario, params, scheme, spec, solver, 1.0, options)


def solve_opportunistic(scenario: ScenarioProfile, params: PlantParams, scheme=None, beta_o: float = 0.0,
                        baseline: float | None = None, solver: SolverConfig | None = None,
                        alpha_cap: float = 1.0, options: BuildOptions | None = None) -> IgdtResult:
    """Smallest uniform renewable surplus lifting the objective to (1 + beta_o) C_c."""
    spec = _spec(IgdtKind.OPPORTUNISTIC, beta_o, scenario, params, scheme, baseline, solver, options)
    return solve_igdt(scenario, params, scheme, spec, solver, alpha_cap, options)


def sweep(kind, betas, scenario: ScenarioProfile, params: PlantParams, scheme=None,
          baseline: float | None = None, solver: SolverConfig | None = None, alpha_cap: float = 1.0,
          options: BuildOptions | None = None, workers: int = 1) -> list[IgdtResult]:
    """Evaluate one program per beta.  Failed points keep alpha None."""
    kind = IgdtKind(kind)
    betas = [float(b) for b in betas]
    if any(b2 < b1 for b1, b2 in zip(betas, betas[1:])):
        raise ConfigError("betas", "must be sorted ascending")
    if baseline is None:
        baseline = baseline_revenue(scenario, params, scheme, solver, options)
    cap = 1.0 if kind is IgdtKind.ROBUST else alpha_cap

    def run(beta):
        return solve_igdt(scenario, params, scheme, IgdtSpec(kind, beta, baseline), solver, cap, options)

    if workers <= 1:
        return [run(b) for b in betas]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, betas))


def write_curve_csv(results, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["beta", "alpha", "status"])
        for r in results:
            w.writerow([repr(r.beta), "" if r.alpha is None else repr(r.alpha), r.status.value])


def write_curve_json(results, path, with_schedules: bool = False) -> None:
    rows = []
    for r in results:
        row = {"kind": r.kind.value, "beta": r.beta, "alpha": r.alpha, "status": r.status.value}
        if with_schedules and r.schedule is not None:
            row["schedule"] = schedule_to_json(r.schedule)
        rows.append(row)
    Path(path).write_text(json.dumps(rows, indent=2))


# ---------------------------------------------------------------------------
# Independent check: bisection over fixed alpha

def best_objective_at(scenario: ScenarioProfile, params: PlantParams, scheme, factor: float,
                      solver: SolverConfig | None = None, options: BuildOptions | None = None) -> float | None:
    """Deterministic optimum (CNY) with renewables scaled by ``factor``; None if infeasible."""
    opts = replace(options or BuildOptions(), renewable_factor=factor, igdt=None, quadratic_penalty=False)
    ctx = build_full_model(scenario, params, scheme, opts)
    sol = (solver or SolverConfig()).solve(ctx.model)
    if sol.status is Status.INFEASIBLE:
        return None
    if sol.status is not Status.OPTIMAL:
        raise RuntimeError(f"fixed-alpha solve ended with status {sol.status.value}")
    return sol.objective_value * KCNY


def bisection_alpha(scenario: ScenarioProfile, params: PlantParams, scheme, spec: IgdtSpec,
                    solver: SolverConfig | None = None, alpha_cap: float = 1.0, tol: float = 1e-5,
                    options: BuildOptions | None = None) -> float | None:
    """Alpha found by bisection over fixed-alpha deterministic solves.

    Reaching the objective floor is monotone in alpha (renewables only bound
    the supply side), so the feasible alphas form an interval anchored at
    0 for the robust program and at the cap for the opportunistic one.
    """
    robust = spec.kind is IgdtKind.ROBUST
    cap = 1.0 if robust else alpha_cap
    slack = 1e-9 * max(1.0, abs(spec.target))

    def feasible(alpha):
        rev = best_objective_at(scenario, params, scheme, (1.0 - alpha) if robust else (1.0 + alpha),
                             solver, options)
        return rev is not None and rev >= spec.target - slack

    if robust:
        if not feasible(0.0):
            return None
        if feasible(cap):
            return cap
        lo, hi = 0.0, cap  # lo feasible, hi infeasible
    else:
        if feasible(0.0):
            return 0.0
        if not feasible(cap):
            return None
        lo, hi = 0.0, cap  # lo infeasible, hi feasible
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid) == robust:
            lo = mid
        else:
            hi = mid
    return lo if robust else hi
