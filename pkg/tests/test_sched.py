import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ammosched.harness.schemes import SCHEME_3, SCHEME_5
from ammosched.milp import SolverConfig, Status
from ammosched.params import ConfigError, Mode, PlantParams
from ammosched.sched import (BuildOptions, DecodeError, ScenarioError, ScenarioProfile, breakdown_from_schedule,
                             build_full_model, decode, read_schedule_csv, read_scenario, schedule_to_json,
                             solve_scenario, verify_schedule, write_schedule_csv, write_scenario)

from instances import random_tiny

TINY = SolverConfig(tiny=True)
P = PlantParams()
OP = P.operational


def solved_tiny(seed, **opt_kw):
    sc, params, scheme, options = random_tiny(np.random.default_rng(seed))
    for k, val in opt_kw.items():
        setattr(options, k, val)
    return sc, params, scheme, options, solve_scenario(sc, params, scheme, options, TINY)


def standby_scenario(n, **kw):
    base = dict(dt=3600.0, wind=np.full(n, 100e6), pv=np.zeros(n), initial_mode=Mode.STANDBY, cyclic=False)
    base.update(kw)
    return ScenarioProfile(**base)


# -- scenario validation and files ------------------------------------------------------

def test_scenario_validation():
    with pytest.raises(ScenarioError):
        ScenarioProfile(dt=3600.0, wind=[1.0, 2.0], pv=[1.0])
    with pytest.raises(ScenarioError):
        ScenarioProfile(dt=3600.0, wind=[-1.0], pv=[0.0])
    with pytest.raises(ScenarioError):
        ScenarioProfile(dt=0.0, wind=[1.0], pv=[0.0])
    with pytest.raises(ScenarioError):
        ScenarioProfile(dt=3600.0, wind=[np.inf], pv=[0.0])


@given(st.lists(st.floats(0.0, 1e8), min_size=1, max_size=30), st.booleans(),
       st.sampled_from(list(Mode)), st.one_of(st.none(), st.floats(1e4, 1e5)))
def test_scenario_file_round_trip(tmp_path_factory, wind, cyclic, mode, hs0):
    path = tmp_path_factory.mktemp("sc") / "s.csv"
    sc = ScenarioProfile(dt=1800.0, wind=wind, pv=np.array(wind) * 0.5, cyclic=cyclic, initial_mode=mode,
                         initial_hs_level=hs0, grid_price=np.full(len(wind), 5e-4), name="rt")
    write_scenario(sc, path)
    back = read_scenario(path)
    np.testing.assert_array_equal(back.wind, sc.wind)
    np.testing.assert_array_equal(back.pv, sc.pv)
    np.testing.assert_allclose(back.grid_price, sc.grid_price, rtol=1e-15)
    assert (back.dt, back.cyclic, back.initial_mode, back.initial_hs_level, back.name) == \
        (sc.dt, sc.cyclic, sc.initial_mode, sc.initial_hs_level, sc.name)


def test_scenario_file_rejects_gaps_and_unknown_keys(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("step,wind_W,pv_W\n0,1,0\n2,1,0\n")
    with pytest.raises(ScenarioError):
        read_scenario(path)
    path.write_text("step,wind_W,pv_W\n0,1,0\n")
    (tmp_path / "s.toml").write_text("colour = 1\n")
    with pytest.raises(ScenarioError):
        read_scenario(path)


def test_window_and_scaled():
    sc = ScenarioProfile(dt=3600.0, wind=np.arange(10.0), pv=np.ones(10))
    w = sc.window(3, 4, initial_asr_temp=700.0)
    assert list(w.wind) == [3.0, 4.0, 5.0, 6.0] and w.initial_asr_temp == 700.0
    assert list(sc.scaled(2.0).pv) == [2.0] * 10


# -- model structure -------------------------------------------------------------------

def test_twelve_binaries_per_step():
    ctx = build_full_model(standby_scenario(3), P, SCHEME_5)
    assert ctx.model.num_binaries == 12 * 3


def test_build_rejects_bad_options():
    with pytest.raises(ConfigError):
        build_full_model(standby_scenario(2), P, options=BuildOptions(bigm_scale=0.5))
    with pytest.raises(ConfigError):
        build_full_model(standby_scenario(2, initial_mode=Mode.PRODUCTION, initial_load=2.0), P)
    with pytest.raises(ConfigError):
        build_full_model(standby_scenario(2, initial_hs_level=1e9), P, SCHEME_5)


def test_initial_storage_defaults_to_lower_bounds():
    res = solve_scenario(standby_scenario(2), P, SCHEME_5, BuildOptions(fixed_modes={0: "by", 1: "by"}), TINY)
    assert res.ok
    p = SCHEME_5.apply(P).operational
    assert res.schedule.hs_level[0] == pytest.approx(p.hs_min)
    assert res.schedule.bes_energy[0] == pytest.approx(p.bes_energy_min)


def test_one_step_production_run_is_infeasible():
    fixed = {0: "by", 1: "on", 2: "by"}
    res = solve_scenario(standby_scenario(3), P, SCHEME_3, BuildOptions(fixed_modes=fixed), TINY)
    assert res.status is Status.INFEASIBLE


def test_two_step_production_run_sits_at_minimum_load():
    fixed = {0: "by", 1: "on", 2: "on", 3: "by"}
    solver = SolverConfig(tiny=True, binary_limit=24)
    res = solve_scenario(standby_scenario(4), P, SCHEME_3, BuildOptions(fixed_modes=fixed), solver)
    assert res.ok
    assert res.schedule.load[1:3] == pytest.approx([OP.load_min] * 2)


def test_decode_refuses_non_optimal():
    fixed = {0: "by", 1: "on", 2: "by"}
    res = solve_scenario(standby_scenario(3), P, SCHEME_3, BuildOptions(fixed_modes=fixed), TINY)
    with pytest.raises(DecodeError):
        decode(res.ctx, res.solution)


# -- invariants on random tiny instances --------------------------------------------------

@given(st.integers(0, 2**31))
def test_schedule_invariants(seed):
    sc, params, scheme, options, res = solved_tiny(seed)
    assert res.status in (Status.OPTIMAL, Status.INFEASIBLE)
    if not res.ok:
        return
    s, op = res.schedule, res.ctx.params.operational
    dt_h = s.dt / 3600.0
    n = s.steps
    # one mode per step, with consistent start/stop indicators
    assert len(s.mode) == n
    on = np.array([m is Mode.PRODUCTION for m in s.mode])
    prev_on = np.concatenate([[sc.initial_mode is Mode.PRODUCTION], on[:-1]])
    np.testing.assert_array_equal(s.startup, on & ~prev_on)
    np.testing.assert_array_equal(s.shutdown, ~on & prev_on)
    # activation temperature on every production step
    assert np.all(s.asr_temp[:-1][on] >= op.asr_temp_act_min - 1e-6)
    # load window and boundary pinning
    assert np.all(s.load[on] >= op.load_min - 1e-7) and np.all(s.load[on] <= op.load_max + 1e-7)
    assert np.all(s.load[~on] == 0.0)
    init_load = (sc.initial_load if sc.initial_load is not None else op.load_min) if prev_on[0] else 0.0
    prev_load = np.concatenate([[init_load], s.load[:-1]])
    for t in range(n):
        if (t and s.startup[t - 1]) or s.shutdown[t]:
            assert prev_load[t] == pytest.approx(op.load_min, abs=1e-7)
    if s.startup[-1]:
        assert s.load[-1] == pytest.approx(op.load_min, abs=1e-7)
    # hydrogen inventory telescopes
    assert s.hs_level[-1] - s.hs_level[0] == pytest.approx(
        float(np.sum(s.h2_production - s.h2_to_as)) * dt_h, abs=1e-6 * max(1.0, op.hs_max))
    if sc.cyclic:
        assert s.hs_level[-1] == pytest.approx(s.hs_level[0], abs=1e-6 * max(1.0, op.hs_max))
        assert s.bes_energy[-1] == pytest.approx(s.bes_energy[0], abs=1e-6 * max(1.0, op.bes_energy_max))
    # exclusive battery direction
    assert not np.any((s.bes_charge > 1e-6) & (s.bes_discharge > 1e-6))
    # the objective is rebuilt from physical values
    bd = breakdown_from_schedule(s, res.ctx.params, sc.days)
    assert bd.objective == pytest.approx(res.solution.objective_value, rel=1e-6, abs=1e-6)
    assert verify_schedule(s, res.ctx.params)["flagged"] == []


@given(st.integers(0, 2**31), st.sampled_from([0.5, 3.0, 40.0]))
def test_joint_weight_scaling_preserves_argmax(seed, k):
    sc, params, scheme, options, res = solved_tiny(seed)
    if not res.ok:
        return
    ec = params.economic
    scaled = params.replace(weight_profit=ec.weight_profit * k, weight_temp=ec.weight_temp * k)
    res2 = solve_scenario(sc, scaled, scheme, options, TINY)
    assert res2.ok
    assert res2.solution.objective_value == pytest.approx(k * res.solution.objective_value,
                                                          rel=1e-6, abs=1e-6)
    # the rescaled optimum is still optimal for the original weights
    bd = breakdown_from_schedule(res2.schedule, res.ctx.params, sc.days)
    assert bd.objective == pytest.approx(res.solution.objective_value, rel=1e-6, abs=1e-6)


@given(st.integers(0, 2**31))
def test_larger_big_m_does_not_change_the_optimum(seed):
    sc, params, scheme, options, res = solved_tiny(seed)
    wide = BuildOptions(fixed_modes=options.fixed_modes, bigm_scale=10.0)
    res2 = solve_scenario(sc, params, scheme, wide, TINY)
    assert res2.status is res.status
    if res.ok:
        assert res2.solution.objective_value == pytest.approx(res.solution.objective_value, rel=1e-6, abs=1e-6)


# -- schedule files and verification --------------------------------------------------------

def _some_schedule():
    for seed in range(50):
        *_, res = solved_tiny(seed)
        if res.ok and res.schedule.steps >= 2:
            return res
    raise AssertionError("no feasible tiny instance among the first seeds")


def test_schedule_csv_round_trip(tmp_path):
    res = _some_schedule()
    path = tmp_path / "schedule.csv"
    write_schedule_csv(res.schedule, path)
    back = read_schedule_csv(path)
    assert schedule_to_json(back) == schedule_to_json(res.schedule)


def test_verify_flags_tampered_inventory():
    res = _some_schedule()
    s = res.schedule
    s.hs_level = s.hs_level.copy()
    s.hs_level[-1] += 1e4
    report = verify_schedule(s, res.ctx.params)
    assert ("hs", s.steps - 1) in report["flagged"]


def test_verify_empty_schedule():
    from ammosched.sched import Schedule
    assert verify_schedule(Schedule.empty(), P)["flagged"] == []


# -- worked examples of the individual constraint groups ------------------------------------

def one_step(mode, **kw):
    base = dict(dt=3600.0, wind=[0.0], pv=[0.0], initial_mode=mode, cyclic=False)
    base.update(kw)
    return ScenarioProfile(**base)


def test_production_step_respects_activation_temperature():
    sc = one_step(Mode.PRODUCTION, wind=[150e6], initial_load=0.5)
    res = solve_scenario(sc, P, SCHEME_3, BuildOptions(fixed_modes={0: "on"}), TINY)
    assert res.ok and res.schedule.asr_temp[0] >= OP.asr_temp_act_min


def test_two_active_modes_violate_exclusivity():
    from ammosched.milp import check_feasible

    sc = one_step(Mode.STANDBY, wind=[150e6])
    res = solve_scenario(sc, P, SCHEME_3, BuildOptions(fixed_modes={0: "by"}), TINY)
    ctx = res.ctx
    x = res.solution.x.copy()
    x[ctx.v["off"][0].id] = 1.0
    tags = {v.tag for v in check_feasible(ctx.model, x)}
    assert "one_mode[t=0]" in tags


def test_forbidden_transition_is_infeasible():
    res = solve_scenario(one_step(Mode.SHUTDOWN, wind=[150e6]), P, SCHEME_3,
                         BuildOptions(fixed_modes={0: "on"}), TINY)
    assert res.status is Status.INFEASIBLE


def test_ramp_limit_between_production_steps():
    sc = ScenarioProfile(dt=3600.0, wind=[300e6, 300e6], pv=[0.0, 0.0], initial_mode=Mode.PRODUCTION,
                         initial_load=0.3, cyclic=False)
    res = solve_scenario(sc, P.replace(weight_temp=0.0), SCHEME_3,
                         BuildOptions(fixed_modes={0: "on", 1: "on"}), TINY)
    assert res.ok
    load = res.schedule.load
    assert OP.load_min - 1e-9 <= load[0] <= 0.3 + OP.ramp_up + 1e-9
    assert abs(load[1] - load[0]) <= OP.ramp_up + 1e-9
    # with wind to spare the plant ramps as fast as allowed
    assert load[0] == pytest.approx(0.55)


def test_shutdown_step_cools_by_the_discrete_loss():
    res = solve_scenario(one_step(Mode.SHUTDOWN), P, SCHEME_3, BuildOptions(fixed_modes={0: "off"}), TINY)
    drop = res.schedule.asr_temp[0] - res.schedule.asr_temp[1]
    expected = (733.0 - 288.0) / P.thermal.asr_loss_resistance * 3600.0 / P.thermal.asr_capacitance
    assert drop == pytest.approx(expected, rel=1e-9)
    assert drop == pytest.approx(1.606, abs=1e-3)


def test_salt_cannot_heat_gas_hotter_than_itself():
    sc = one_step(Mode.STANDBY, wind=[150e6], initial_ms_temp=OP.ms_temp_min)
    ctx = build_full_model(sc, P, SCHEME_3, BuildOptions(fixed_modes={0: "by"}))
    ctx.model.fix(ctx.v["mson"][0], 1.0)
    from ammosched.milp import solve_tiny
    assert solve_tiny(ctx.model).status is Status.INFEASIBLE


def test_rated_flows_and_electrolyser_power():
    assert OP.h2_consumption_rated == pytest.approx(49_202.4)
    assert OP.nh3_rate_rated == pytest.approx(24.9)
    assert OP.hp_flow_max * OP.hp_specific_power == pytest.approx(2e8)
    assert OP.hp_flow_max == pytest.approx(41_666.7, abs=0.1)


def test_no_power_means_no_production():
    p = P.replace(grid_import_max=0.0)
    sc = ScenarioProfile(dt=3600.0, wind=[0.0, 0.0], pv=[0.0, 0.0], initial_mode=Mode.SHUTDOWN, cyclic=False)
    for fixed in ({0: "cs"}, {0: "off", 1: "cs"}):
        res = solve_scenario(sc, p, SCHEME_3, BuildOptions(fixed_modes=fixed), TINY)
        assert res.status is Status.INFEASIBLE
    res = solve_scenario(sc, p, SCHEME_3, BuildOptions(fixed_modes={0: "off", 1: "off"}), TINY)
    assert res.ok and res.schedule.nh3_output.sum() == 0.0
    assert res.breakdown.net_revenue == pytest.approx(-res.breakdown.capex_om_cost)
    assert all(m is Mode.SHUTDOWN for m in res.schedule.mode)


def test_single_component_annualised_cost():
    from ammosched.params import ComponentCost, capex_om_cost
    p = P.replace(component_costs=(ComponentCost("battery", 1700.0, 1.0, 12.0, 0.02),), discount_rate=0.08)
    assert capex_om_cost(p, 15.0) == pytest.approx(15 / 365 * (1700 * 0.13270 + 34), rel=1e-4)


def test_setpoint_trajectory_has_no_penalty():
    res = solve_scenario(one_step(Mode.SHUTDOWN), P, SCHEME_3, BuildOptions(fixed_modes={0: "off"}), TINY)
    s = res.schedule
    s.asr_temp = np.full_like(s.asr_temp, P.economic.temp_setpoint)
    assert breakdown_from_schedule(s, P).temp_penalty == 0.0


def test_full_horizon_model_structure():
    wind = np.full(360, 1e8)
    ctx = build_full_model(ScenarioProfile(dt=3600.0, wind=wind, pv=np.zeros(360)), P, SCHEME_5)
    assert ctx.model.num_binaries == 12 * 360
    families = {c.tag.split("[")[0] for c in ctx.model.constraints}
    for fam in ("one_mode", "start_stop", "activation_temp", "ramp_up", "pin_hi", "asr_balance", "ms_balance",
                "hs_balance", "bes_balance", "power_balance", "hs_cyclic", "bes_cyclic", "temp_deviation"):
        assert fam in families


def test_absent_storage_is_fixed_to_zero():
    sc = standby_scenario(2)
    from ammosched.harness.schemes import SCHEME_2
    no_ms = build_full_model(sc, P, SCHEME_2)
    for t in range(2):
        for name in ("mson", "Qms", "Pms", "bcha", "bdis", "Pcha", "Pdis"):
            var = no_ms.v[name][t]
            assert var.lower == var.upper == 0.0


def test_verify_flags_corrupted_battery_step():
    res = solve_scenario(standby_scenario(2), P, SCHEME_5, BuildOptions(fixed_modes={0: "by", 1: "by"}), TINY)
    s = res.schedule
    s.bes_energy = s.bes_energy.copy()
    s.bes_energy[1] += 0.05 * SCHEME_5.bes_energy
    flagged = verify_schedule(s, res.ctx.params)["flagged"]
    assert ("bes", 0) in flagged and ("bes", 1) in flagged


@given(st.integers(0, 2**31), st.sampled_from(["bes", "hs", "grid"]))
def test_more_capacity_never_lowers_gross_revenue(seed, axis):
    sc, params, scheme, options = random_tiny(np.random.default_rng(seed))
    params = params.replace(weight_temp=0.0)
    if axis == "bes" and scheme.has_bes:
        big = scheme.with_sizes(bes_energy=2 * scheme.bes_energy, bes_power=2 * scheme.bes_power)
        p_big = params
    elif axis == "hs" and scheme.has_hs:
        big, p_big = scheme.with_sizes(hs_capacity=2 * scheme.hs_capacity), params
    else:
        big, p_big = scheme, params.replace(grid_import_max=2 * params.operational.grid_import_max)
    small_res = solve_scenario(sc, params, scheme, options, TINY)
    big_res = solve_scenario(sc, p_big, big, options, TINY)
    if not small_res.ok:
        return
    assert big_res.ok

    def gross(res):
        return res.breakdown.net_revenue + res.breakdown.capex_om_cost

    assert gross(big_res) >= gross(small_res) - 1e-6 * (1 + abs(gross(small_res)))
