"""Scheduling MILP: state logic, load, thermal, mass/power and objective.

Steps are 0-based: decisions of step t act over [t dt, (t+1) dt).  State
variables (reactor and salt temperature, hydrogen and battery inventory)
live on the boundaries 0..n, boundary 0 being fixed by the scenario.

Inside the model quantities are scaled to keep coefficients near unity:
power in MW, energy in MWh, hydrogen in kNm3 and kNm3/h, money in kCNY,
temperature in K.  ``decode`` converts back to SI.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..harness.schemes import StorageScheme
from ..milp import LinExpr, MilpModel, VarRef
from ..params import MODES, ConfigError, Mode, PlantParams, capex_om_cost
from .scenario import ScenarioProfile

MW = 1e6
KNM3 = 1e3
KCNY = 1e3

BINARY_FAMILIES = ("on", "by", "cs", "off", "su", "sd", "inoff", "outoff", "mson", "msby", "bcha", "bdis")
MODE_VAR = {Mode.PRODUCTION: "on", Mode.STANDBY: "by", Mode.COLD_START: "cs", Mode.SHUTDOWN: "off"}


@dataclass
class BuildOptions:
    """Switches that change the model structure.

    ``quadratic_penalty`` emits the squared temperature deviation instead of
    its L1 epigraph (only external solvers accept it).  ``bigm_scale``
    multiplies every computed big-M constant.  ``igdt`` embeds the
    uncertainty level alpha, scaling renewables by (1 - alpha) for
    "robust" and (1 + alpha) for "opportunistic".  ``renewable_factor``
    scales renewables by a fixed constant instead.  ``fixed_modes`` pins
    the reactor mode at chosen steps.
    """

    quadratic_penalty: bool = False
    bigm_scale: float = 1.0
    igdt: str | None = None
    alpha_cap: float = 1.0
    renewable_factor: float = 1.0
    fixed_modes: dict = field(default_factory=dict)


@dataclass
class ScheduleModel:
    model: MilpModel
    scenario: ScenarioProfile
    params: PlantParams
    options: BuildOptions
    scheme: StorageScheme | None = None
    v: dict = field(default_factory=dict)
    bigm: dict = field(default_factory=dict)
    revenue: LinExpr = field(default_factory=LinExpr)  # kCNY, net of C^Z
    temp_penalty: LinExpr = field(default_factory=LinExpr)  # K (L1 form)
    alpha: VarRef | None = None
    capex_om: float = 0.0  # CNY over the horizon

    @property
    def n(self) -> int:
        return self.scenario.horizon_steps

    @property
    def dt_h(self) -> float:
        return self.scenario.dt / 3600.0

    def series(self, name: str, lo=0.0, hi=np.inf, n=None, binary=False) -> list[VarRef]:
        n = self.n if n is None else n
        m = self.model
        if binary:
            vs = [m.add_binary(f"{name}[{t}]") for t in range(n)]
        else:
            vs = [m.add_var(f"{name}[{t}]", lo, hi) for t in range(n)]
        self.v[name] = vs
        return vs

    def initial_flag(self, family: str) -> float:
        return 1.0 if MODE_VAR[self.scenario.initial_mode] == family else 0.0

    def initial_load(self) -> float:
        sc, op = self.scenario, self.params.operational
        if sc.initial_mode is not Mode.PRODUCTION:
            return 0.0
        return op.load_min if sc.initial_load is None else float(sc.initial_load)

    def grid_price(self) -> np.ndarray:
        sc = self.scenario
        return sc.grid_price if sc.grid_price is not None else np.full(self.n, self.params.economic.grid_price)


def _create_variables(ctx: ScheduleModel) -> None:
    sc, th, op = ctx.scenario, ctx.params.thermal, ctx.params.operational
    n = ctx.n
    for fam in BINARY_FAMILIES:
        ctx.series(fam, binary=True)
    ctx.series("L", 0.0, op.load_max)
    ctx.series("Qcool", 0.0, op.cooling_duty_max / MW)
    ctx.series("Qms", 0.0, op.ms_heat_duty_max / MW)
    ctx.series("Qsu", 0.0, op.suh_heat_duty_max / MW)
    ctx.series("Pms", 0.0, op.ms_heater_power_max / MW)
    ctx.series("Psu", 0.0, op.suh_power_max / MW)
    ctx.series("Fhp", 0.0, op.hp_flow_max / KNM3)
    ctx.series("Pcha", 0.0, op.bes_charge_max / MW)
    ctx.series("Pdis", 0.0, op.bes_discharge_max / MW)
    ctx.series("Pgrid", 0.0, op.grid_import_max / MW)

    t_floor = min(float(sc.ambient_temp.min()), sc.initial_asr_temp)
    t_cap = max(op.asr_temp_act_max, sc.initial_asr_temp)
    ctx.bigm["t_floor"] = t_floor
    T = ctx.series("T", t_floor, t_cap, n=n + 1)
    ctx.model.fix(T[0], sc.initial_asr_temp)

    has_ms = th.ms_volume > 0
    if has_ms:
        if not op.ms_temp_min - 1e-9 <= sc.initial_ms_temp <= op.ms_temp_max + 1e-9:
            raise ConfigError("initial_ms_temp", "outside the salt temperature limits")
        Tms = ctx.series("Tms", op.ms_temp_min, op.ms_temp_max, n=n + 1)
        ctx.model.fix(Tms[0], sc.initial_ms_temp)
    else:
        Tms = ctx.series("Tms", sc.initial_ms_temp, sc.initial_ms_temp, n=n + 1)

    hs = ctx.series("hs", op.hs_min / KNM3, op.hs_max / KNM3, n=n + 1)
    bes = ctx.series("E", op.bes_energy_min / 3.6e9, op.bes_energy_max / 3.6e9, n=n + 1)
    for arr, init, lo, hi, label in ((hs, sc.initial_hs_level, op.hs_min, op.hs_max, "initial_hs_level"),
                                     (bes, sc.initial_bes_energy, op.bes_energy_min,
                                      op.bes_energy_max, "initial_bes_energy")):
        if hi <= 0:
            ctx.model.fix(arr[0], 0.0)
            continue
        if init is None:
            ctx.model.fix(arr[0], arr[0].lower)
            continue
        init = init / (KNM3 if arr is hs else 3.6e9)
        if not arr[0].lower - 1e-9 <= init <= arr[0].upper + 1e-9:
            raise ConfigError(label, f"initial level outside [{lo}, {hi}]")
        ctx.model.fix(arr[0], min(max(init, arr[0].lower), arr[0].upper))


def _fix_absent(ctx: ScheduleModel) -> None:
    th, op = ctx.params.thermal, ctx.params.operational
    m = ctx.model
    if th.ms_volume <= 0:
        for t in range(ctx.n):
            m.fix(ctx.v["mson"][t], 0.0)
            m.fix(ctx.v["msby"][t], 1.0)
            m.fix(ctx.v["Qms"][t], 0.0)
            m.fix(ctx.v["Pms"][t], 0.0)
    if op.bes_charge_max <= 0 or op.bes_energy_max <= 0:
        for t in range(ctx.n):
            m.fix(ctx.v["bcha"][t], 0.0)
            m.fix(ctx.v["Pcha"][t], 0.0)
    if op.bes_discharge_max <= 0 or op.bes_energy_max <= 0:
        for t in range(ctx.n):
            m.fix(ctx.v["bdis"][t], 0.0)
            m.fix(ctx.v["Pdis"][t], 0.0)
    for t, mode in ctx.options.fixed_modes.items():
        for md in MODES:
            m.fix(ctx.v[MODE_VAR[md]][t], 1.0 if Mode(mode) is md else 0.0)


def build_state_logic(ctx: ScheduleModel) -> None:
    """Mode exclusivity, start/stop indicators, temperature gate, transitions."""
    m, op, v = ctx.model, ctx.params.operational, ctx.v
    on, by, cs, off = v["on"], v["by"], v["cs"], v["off"]
    su, sd, inoff, outoff = v["su"], v["sd"], v["inoff"], v["outoff"]
    T = v["T"]
    M = (op.asr_temp_act_min - ctx.bigm["t_floor"]) * ctx.options.bigm_scale
    ctx.bigm["temp_gate"] = M
    for t in range(ctx.n):
        m.add(on[t] + by[t] + cs[t] + off[t], "=", 1, f"one_mode[t={t}]")
        prev_on = on[t - 1] if t else ctx.initial_flag("on")
        prev_off = off[t - 1] if t else ctx.initial_flag("off")
        m.add(on[t] - prev_on, "=", su[t] - sd[t], f"start_stop[t={t}]")
        m.add(su[t] + sd[t], "<=", 1, f"start_xor_stop[t={t}]")
        m.add(off[t] - prev_off, "=", inoff[t] - outoff[t], f"off_entry_exit[t={t}]")
        m.add(inoff[t] + outoff[t], "<=", 1, f"entry_xor_exit[t={t}]")
        m.add(T[t], ">=", op.asr_temp_act_min - M * (1 - on[t]), f"activation_temp[t={t}]")
        for i, src in enumerate(MODES):
            for j, dst in enumerate(MODES):
                if op.transition_matrix[i][j]:
                    continue
                b_dst = v[MODE_VAR[dst]][t]
                if t == 0:
                    if ctx.scenario.initial_mode is src:
                        m.add(b_dst, "<=", 0, f"adj[{src.value}>{dst.value},t=0]")
                else:
                    m.add(v[MODE_VAR[src]][t - 1] + b_dst, "<=", 1, f"adj[{src.value}>{dst.value},t={t}]")


def build_load_constraints(ctx: ScheduleModel) -> None:
    """Load bounds, ramp limits relaxed at start/stop, boundary-load pinning."""
    m, op, v = ctx.model, ctx.params.operational, ctx.v
    L, on, su, sd = v["L"], v["on"], v["su"], v["sd"]
    M = op.load_max * ctx.options.bigm_scale
    ctx.bigm["ramp"] = ctx.bigm["pin"] = M
    up, down = op.ramp_up * ctx.dt_h, op.ramp_down * ctx.dt_h
    L_init = ctx.initial_load()
    for t in range(ctx.n):
        m.add(L[t], ">=", op.load_min * on[t], f"load_lo[t={t}]")
        m.add(L[t], "<=", op.load_max * on[t], f"load_hi[t={t}]")
        prev = L[t - 1] if t else L_init
        m.add(L[t] - prev, "<=", up + M * (su[t] + sd[t]), f"ramp_up[t={t}]")
        m.add(L[t] - prev, ">=", -down - M * (su[t] + sd[t]), f"ramp_down[t={t}]")
    # Boundary pinning: the first production step after a start-up and the
    # last one before a shutdown run at minimum load.  The two events share
    # one constraint pair per step, so a production run of a single step
    # (start-up and shutdown both active) is infeasible.
    for t in range(ctx.n):
        su_prev = su[t - 1] if t else 0.0
        prev = L[t - 1] if t else L_init
        m.add(prev, "<=", op.load_min + M * (1 - su_prev - sd[t]), f"pin_hi[t={t}]")
        m.add(prev, ">=", op.load_min - M * (1 - su_prev - sd[t]), f"pin_lo[t={t}]")
    # a start-up in the final step has no successor step to carry the pin
    last = ctx.n - 1
    m.add(L[last], "<=", op.load_min + M * (1 - su[last]), f"pin_hi[t={ctx.n}]")
    m.add(L[last], ">=", op.load_min - M * (1 - su[last]), f"pin_lo[t={ctx.n}]")


def gas_coefficients(params: PlantParams) -> tuple[float, float, float]:
    """Net gas enthalpy (in minus out) per production flag, per unit load and
    per standby/cold-start flag, in MW."""
    th, op = params.thermal, params.operational
    prod = th.rig_specific_heat * th.rig_temp_production - th.rog_specific_heat * th.rog_temp_production
    a_on = op.rig_flow_intercept * prod / 3600.0 / MW
    a_load = op.rig_flow_slope * prod / 3600.0 / MW
    a_by = (op.rig_flow_standby * th.rig_temp_standby
            * (th.rig_specific_heat - th.standby_rog_specific_heat) / 3600.0 / MW)
    return a_on, a_load, a_by


def build_thermal_constraints(ctx: ScheduleModel) -> None:
    """Reactor and salt energy balances, heating/cooling gates and bounds.

    Plain duty and power caps (salt and heater limits, start-up heater duty,
    salt temperature window) are carried as variable bounds.
    """
    m, th, op, v, sc = ctx.model, ctx.params.thermal, ctx.params.operational, ctx.v, ctx.scenario
    on, by, cs, off = v["on"], v["by"], v["cs"], v["off"]
    L, T, Tms = v["L"], v["T"], v["Tms"]
    Qcool, Qms, Qsu, Pms, Psu = v["Qcool"], v["Qms"], v["Qsu"], v["Pms"], v["Psu"]
    mson, msby = v["mson"], v["msby"]
    dt = sc.dt
    c_asr = th.asr_capacitance / MW / dt
    g_asr = 1.0 / (th.asr_loss_resistance * MW)
    c_react = th.reaction_heat_coeff / MW
    a_on, a_load, a_by = gas_coefficients(ctx.params)
    has_ms = th.ms_volume > 0
    c_ms = th.ms_capacitance / MW / dt
    g_ms = 1.0 / (th.ms_loss_resistance * MW)
    scale = ctx.options.bigm_scale
    M_ms = op.ms_heat_duty_max / MW * scale
    M_su = op.suh_heat_duty_max / MW * scale
    t_in_max = max(th.rig_temp_production, th.rig_temp_standby)
    M_gate = max(0.0, t_in_max + th.ms_approach_gap - op.ms_temp_min) * scale
    ctx.bigm.update(ms_duty=M_ms, suh_duty=M_su, ms_gate=M_gate)
    for t in range(ctx.n):
        amb = float(sc.ambient_temp[t])
        heat_in = (c_react * L[t] + a_on * on[t] + a_load * L[t] + a_by * (by[t] + cs[t])
                   + Qms[t] + Qsu[t] - Qcool[t] - g_asr * T[t])
        m.add(c_asr * (T[t + 1] - T[t]) - heat_in, "=", g_asr * amb, f"asr_balance[t={t}]")
        m.add(Qcool[t], "<=", op.cooling_duty_max / MW * on[t], f"cooling_gate[t={t}]")
        m.add(Qms[t], "<=", M_ms * mson[t], f"ms_duty_gate[t={t}]")
        m.add(Qsu[t], "<=", M_su * (on[t] + by[t] + cs[t]), f"suh_duty_gate[t={t}]")
        m.add(Qsu[t], "=", op.suh_eff * Psu[t], f"suh_heater[t={t}]")
        m.add(Psu[t], "<=", op.suh_power_max / MW * (1 - off[t]), f"suh_power_gate[t={t}]")
        m.add(mson[t] + msby[t], "=", 1, f"ms_state[t={t}]")
        m.add(mson[t], "<=", on[t] + by[t] + cs[t], f"ms_needs_active[t={t}]")
        if has_ms:
            inlet = th.rig_temp_production * on[t] + th.rig_temp_standby * (by[t] + cs[t])
            m.add(Tms[t] - th.ms_approach_gap, ">=", inlet - M_gate * (1 - mson[t]), f"ms_approach[t={t}]")
            balance = -Qms[t] / op.ms_exchanger_eff + op.ms_heater_eff * Pms[t] - g_ms * Tms[t]
            m.add(c_ms * (Tms[t + 1] - Tms[t]) - balance, "=", g_ms * amb, f"ms_balance[t={t}]")


def build_mass_and_power(ctx: ScheduleModel) -> None:
    """Hydrogen and ammonia flows, storage balances, auxiliary load, power balance."""
    m, op, v, sc = ctx.model, ctx.params.operational, ctx.v, ctx.scenario
    on, by, cs = v["on"], v["by"], v["cs"]
    L, Fhp, hs, E = v["L"], v["Fhp"], v["hs"], v["E"]
    Pcha, Pdis, bcha, bdis, Pgrid = v["Pcha"], v["Pdis"], v["bcha"], v["bdis"], v["Pgrid"]
    Pms, Psu = v["Pms"], v["Psu"]
    s_h2 = op.h2_consumption_rated / KNM3
    c_hp = op.hp_specific_power * KNM3 / MW  # MW per kNm3/h
    dt_h = ctx.dt_h
    res = sc.renewable / MW * ctx.options.renewable_factor
    for t in range(ctx.n):
        m.add(hs[t + 1] - hs[t] - dt_h * (Fhp[t] - s_h2 * L[t]), "=", 0, f"hs_balance[t={t}]")
        m.add(E[t + 1] - E[t] - dt_h * (Pcha[t] - Pdis[t]), "=", 0, f"bes_balance[t={t}]")
        m.add(Pdis[t], "<=", op.bes_discharge_max / MW * bdis[t], f"discharge_gate[t={t}]")
        m.add(Pcha[t], "<=", op.bes_charge_max / MW * bcha[t], f"charge_gate[t={t}]")
        m.add(bcha[t] + bdis[t], "<=", 1, f"charge_xor_discharge[t={t}]")
        aux = op.aux_base_power / MW * (on[t] + by[t] + cs[t]) + op.aux_load_coeff / MW * L[t]
        demand = Pcha[t] - Pdis[t] + Pms[t] + Psu[t] + aux + c_hp * Fhp[t]
        supply = Pgrid[t] + float(res[t])
        if ctx.alpha is not None:
            sign = -1.0 if ctx.options.igdt == "robust" else 1.0
            supply = supply + sign * float(res[t]) * ctx.alpha
        m.add(demand, "<=", supply, f"power_balance[t={t}]")
    if sc.cyclic:
        m.add(hs[ctx.n], "=", hs[0], "hs_cyclic")
        m.add(E[ctx.n], "=", E[0], "bes_cyclic")


def build_objective(ctx: ScheduleModel) -> None:
    """Maximise weighted net revenue minus the temperature regulation term."""
    m, op, ec, v = ctx.model, ctx.params.operational, ctx.params.economic, ctx.v
    L, Pgrid, inoff, T = v["L"], v["Pgrid"], v["inoff"], v["T"]
    dt_h = ctx.dt_h
    price = ctx.grid_price()
    ctx.capex_om = capex_om_cost(ctx.params, ctx.scenario.days)
    rev = LinExpr(constant=-ctx.capex_om / KCNY)
    for t in range(ctx.n):
        rev.iadd(L[t], ec.nh3_price * op.nh3_rate_rated * dt_h / KCNY)
        rev.iadd(Pgrid[t], -float(price[t]) * MW * dt_h / KCNY)
        rev.iadd(inoff[t], -ec.startup_cost / KCNY)
    ctx.revenue = rev
    obj = ec.weight_profit * rev
    w2 = ec.weight_temp / KCNY
    t_cap = T[1].upper
    t_floor = ctx.bigm["t_floor"]
    if ctx.options.quadratic_penalty:
        for t in range(1, ctx.n + 1):
            m.quadratic[(T[t].id, T[t].id)] = m.quadratic.get((T[t].id, T[t].id), 0.0) - w2
            obj.iadd(T[t], 2 * w2 * ec.temp_setpoint)
            obj.iadd(-w2 * ec.temp_setpoint ** 2)
    else:
        pen = LinExpr()
        dp = ctx.series("dTp", 0.0, max(0.0, t_cap - ec.temp_setpoint), n=ctx.n + 1)
        dm = ctx.series("dTm", 0.0, max(0.0, ec.temp_setpoint - t_floor), n=ctx.n + 1)
        m.fix(dp[0], 0.0)
        m.fix(dm[0], 0.0)
        for t in range(1, ctx.n + 1):
            m.add(T[t] - ec.temp_setpoint, "=", dp[t] - dm[t], f"temp_deviation[t={t}]")
            pen.iadd(dp[t])
            pen.iadd(dm[t])
        ctx.temp_penalty = pen
        obj.iadd(pen, -w2)
    m.set_objective(obj, "max")


def build_full_model(scenario: ScenarioProfile, params: PlantParams,
                     scheme: StorageScheme | None = None,
                     options: BuildOptions | None = None) -> ScheduleModel:
    """Compose every constraint group for one scenario and storage scheme."""
    options = options or BuildOptions()
    if scheme is not None:
        params = scheme.apply(params)
    if options.bigm_scale < 1:
        raise ConfigError("bigm_scale", "must be at least 1")
    op = params.operational
    if scenario.initial_mode is Mode.PRODUCTION and scenario.initial_load is not None:
        if not op.load_min <= scenario.initial_load <= op.load_max:
            raise ConfigError("initial_load", "outside the load range")
    ctx = ScheduleModel(MilpModel(scenario.name), scenario, params, options, scheme)
    _create_variables(ctx)
    if options.igdt is not None:
        if options.igdt not in ("robust", "opportunistic"):
            raise ConfigError("igdt", f"unknown program {options.igdt!r}")
        cap = 1.0 if options.igdt == "robust" else options.alpha_cap
        ctx.alpha = ctx.model.add_var("alpha", 0.0, cap)
    _fix_absent(ctx)
    build_state_logic(ctx)
    build_load_constraints(ctx)
    build_thermal_constraints(ctx)
    build_mass_and_power(ctx)
    build_objective(ctx)
    return ctx
