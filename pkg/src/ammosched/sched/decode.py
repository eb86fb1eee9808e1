"""Turn solver output into schedules and check them independently."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..milp import Solution, Status
from ..params import MODES, Mode, PlantParams, capex_om_cost
from ..thermal import replay_schedule
from .model import KCNY, KNM3, MODE_VAR, MW, ScheduleModel
from .scenario import Schedule


class DecodeError(ValueError):
    pass


@dataclass
class ObjectiveBreakdown:
    """Money terms in CNY over the horizon; ``temp_penalty`` in K (sum of
    absolute deviations from the setpoint), ``temp_penalty_sq`` in K^2."""

    ammonia_revenue: float
    grid_cost: float
    startup_cost: float
    capex_om_cost: float
    temp_penalty: float
    temp_penalty_sq: float
    net_revenue: float
    objective: float

    def to_dict(self) -> dict:
        return asdict(self)


def breakdown_from_schedule(schedule: Schedule, params: PlantParams, days: float | None = None,
                            quadratic: bool = False) -> ObjectiveBreakdown:
    """Recompute every objective term from the schedule's physical values."""
    ec = params.economic
    dt_h = schedule.dt / 3600.0
    if days is None:
        days = schedule.steps * schedule.dt / 86400.0
    revenue = ec.nh3_price * float(np.sum(schedule.nh3_output)) * dt_h
    grid = float(np.sum(schedule.grid_price * schedule.grid_import)) * dt_h
    starts = ec.startup_cost * float(np.sum(schedule.inoff))
    cz = capex_om_cost(params, days)
    dev = np.asarray(schedule.asr_temp[1:], float) - ec.temp_setpoint
    l1, sq = float(np.abs(dev).sum()), float((dev ** 2).sum())
    net = revenue - grid - starts - cz
    objective = (ec.weight_profit * net - ec.weight_temp * (sq if quadratic else l1)) / KCNY
    return ObjectiveBreakdown(revenue, grid, starts, cz, l1, sq, net, objective)


def decode(ctx: ScheduleModel, solution: Solution, check_objective: bool = True):
    """Return (Schedule, ObjectiveBreakdown) for an optimal solution."""
    if solution.status is not Status.OPTIMAL:
        raise DecodeError(f"cannot decode a {solution.status.value} solution")
    x = solution.x
    v, op, sc = ctx.v, ctx.params.operational, ctx.scenario

    def arr(name, scale=1.0):
        return np.array([x[var.id] for var in v[name]], dtype=float) * scale

    flags = np.vstack([arr(MODE_VAR[m]) for m in MODES])
    if ((flags > 0.5).sum(axis=0) != 1).any():
        bad = int(np.flatnonzero((flags > 0.5).sum(axis=0) != 1)[0])
        raise DecodeError(f"step {bad}: mode binaries {flags[:, bad]} do not select one mode")
    modes = [MODES[int(k)] for k in flags.argmax(axis=0)]
    on = np.array([m is Mode.PRODUCTION for m in modes])
    active = np.array([m is not Mode.SHUTDOWN for m in modes])

    def clean(a):
        # drop solver noise below the feasibility tolerance
        return np.where(np.abs(a) < 1e-9, 0.0, a)

    load = np.where(on, clean(arr("L")), 0.0)
    h2_to_as = load * op.h2_consumption_rated
    sched = Schedule(
        dt=sc.dt,
        mode=modes,
        startup=arr("su") > 0.5,
        shutdown=arr("sd") > 0.5,
        inoff=arr("inoff") > 0.5,
        outoff=arr("outoff") > 0.5,
        load=load,
        h2_production=clean(arr("Fhp", KNM3)),
        h2_to_as=h2_to_as,
        hs_level=arr("hs", KNM3),
        bes_energy=arr("E", 3.6e9),
        bes_charge=clean(arr("Pcha", MW)),
        bes_discharge=clean(arr("Pdis", MW)),
        grid_import=clean(arr("Pgrid", MW)),
        ms_mode=arr("mson") > 0.5,
        ms_heat_duty=clean(arr("Qms", MW)),
        suh_heat_duty=clean(arr("Qsu", MW)),
        cooling_duty=clean(arr("Qcool", MW)),
        ms_heater_power=clean(arr("Pms", MW)),
        suh_power=clean(arr("Psu", MW)),
        asr_temp=arr("T"),
        ms_temp=arr("Tms"),
        aux_power=op.aux_base_power * active + op.aux_load_coeff * load,
        nh3_output=load * op.nh3_rate_rated,
        hp_power=clean(arr("Fhp", KNM3)) * op.hp_specific_power,
        ambient_temp=np.asarray(sc.ambient_temp, float).copy(),
        renewable=sc.renewable * _renewable_factor(ctx, solution),
        grid_price=np.asarray(ctx.grid_price(), float).copy(),
    )
    bd = breakdown_from_schedule(sched, ctx.params, sc.days, ctx.options.quadratic_penalty)
    if check_objective and ctx.alpha is None:
        ref = solution.objective_value
        if abs(bd.objective - ref) > 1e-4 * max(1.0, abs(ref)):
            raise DecodeError(f"recomputed objective {bd.objective} differs from solver {ref}")
    return sched, bd


def _renewable_factor(ctx: ScheduleModel, solution: Solution) -> float:
    f = ctx.options.renewable_factor
    if ctx.alpha is not None:
        a = solution[ctx.alpha]
        f *= (1.0 - a) if ctx.options.igdt == "robust" else (1.0 + a)
    return f


def verify_schedule(schedule: Schedule, params: PlantParams, tol: float = 1e-6,
                    substep: float = 60.0) -> dict:
    """Replay temperatures and re-check storage and power balances.

    Balance residuals are scaled by the step's magnitude so ``tol`` is
    relative.  ``flagged`` lists (kind, step) pairs above tolerance.
    """
    n = schedule.steps
    if n == 0:
        return {"steps": 0, "max_temp_deviation_K": 0.0, "hs_residual": [], "bes_residual": [],
                "power_residual": [], "flagged": []}
    op = params.operational
    _, dev = replay_schedule(schedule, params, substep)
    dt_h = schedule.dt / 3600.0
    hs_res = np.diff(schedule.hs_level) - (schedule.h2_production - schedule.h2_to_as) * dt_h
    bes_res = np.diff(schedule.bes_energy) - (schedule.bes_charge - schedule.bes_discharge) * schedule.dt
    demand = (schedule.bes_charge - schedule.bes_discharge + schedule.ms_heater_power + schedule.suh_power
              + schedule.aux_power + schedule.hp_power)
    power_res = np.maximum(0.0, demand - schedule.renewable - schedule.grid_import)
    hs_scale = max(1.0, op.hs_max, float(np.abs(schedule.h2_production).max(initial=0.0)) * dt_h)
    bes_scale = max(1.0, op.bes_energy_max)
    pw_scale = max(1.0, float(np.abs(demand).max(initial=0.0)))
    flagged = ([("hs", int(t)) for t in np.flatnonzero(np.abs(hs_res) > tol * hs_scale)]
               + [("bes", int(t)) for t in np.flatnonzero(np.abs(bes_res) > tol * bes_scale)]
               + [("power", int(t)) for t in np.flatnonzero(power_res > tol * pw_scale)])
    return {
        "steps": n,
        "max_temp_deviation_K": float(dev),
        "hs_residual": hs_res.tolist(),
        "bes_residual": bes_res.tolist(),
        "power_residual": power_res.tolist(),
        "flagged": flagged,
    }
