"""Continuous-time lumped thermal simulator for the reactor and the salt tank.

The simulator integrates the reactor energy balance

    C dT/dt = Q_react + Q_in - Q_out - Q_cool - (T - T_am) / R

and the salt-tank balance

    rho V c dT_ms/dt = -Q_ms / eta_gas + eta_heat P_ms - (T_ms - T_am) / R_ms

with explicit Euler at a substep of at most 60 s.  It is deliberately
independent of the MILP code so that decoded schedules can be checked
against it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .params import Mode, PlantParams, ThermalParams

MAX_SUBSTEP = 60.0


class IntegrationError(RuntimeError):
    pass


class ReplayError(ValueError):
    pass


@dataclass(frozen=True)
class ThermalState:
    asr_temp: float
    ms_temp: float


@dataclass(frozen=True)
class ThermalInputs:
    mode: Mode
    load: float = 0.0
    cooling_duty: float = 0.0
    ms_heat_duty: float = 0.0
    suh_heat_duty: float = 0.0
    ms_heater_power: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.load < 0:
            raise ValueError("load must be non-negative")
        if self.mode is not Mode.PRODUCTION and self.load != 0:
            raise ValueError("load must be 0 outside production")
        for name in ("cooling_duty", "ms_heat_duty", "suh_heat_duty", "ms_heater_power"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def _thermal(params) -> ThermalParams:
    return params.thermal if isinstance(params, PlantParams) else params


def asr_heat_loss(asr_temp: float, params, ambient: float | None = None) -> float:
    th = _thermal(params)
    t_am = th.ambient_temp if ambient is None else ambient
    return (asr_temp - t_am) / th.asr_loss_resistance


def ms_heat_loss(ms_temp: float, params, ambient: float | None = None) -> float:
    th = _thermal(params)
    t_am = th.ambient_temp if ambient is None else ambient
    return (ms_temp - t_am) / th.ms_loss_resistance


def reaction_heat(mode, load: float, params) -> float:
    if load < 0:
        raise ValueError("load must be non-negative")
    if Mode(mode) is not Mode.PRODUCTION:
        return 0.0
    return _thermal(params).reaction_heat_coeff * load


def gas_enthalpy_duties(mode, load: float, ms_heat_duty: float, suh_heat_duty: float,
                        params: PlantParams) -> tuple[float, float]:
    """Enthalpy carried into and out of the reactor by the gas streams, W.

    Flow constants are per hour and are divided by 3600 here.  External
    heating (salt exchanger, start-up heater) is added to the inlet stream.
    """
    th, op = params.thermal, params.operational
    mode = Mode(mode)
    if mode is Mode.SHUTDOWN:
        return 0.0, 0.0
    if mode is Mode.PRODUCTION:
        flow = op.rig_flow_intercept + load * op.rig_flow_slope
        q_in = th.rig_specific_heat * flow * th.rig_temp_production / 3600.0
        q_out = th.rog_specific_heat * flow * th.rog_temp_production / 3600.0
    else:
        flow = op.rig_flow_standby
        q_in = th.rig_specific_heat * flow * th.rig_temp_standby / 3600.0
        q_out = th.standby_rog_specific_heat * flow * th.rig_temp_standby / 3600.0
    return q_in + ms_heat_duty + suh_heat_duty, q_out


def net_asr_heat(state: ThermalState, inputs: ThermalInputs, params: PlantParams,
                 ambient: float | None = None) -> float:
    q_in, q_out = gas_enthalpy_duties(inputs.mode, inputs.load, inputs.ms_heat_duty,
                                      inputs.suh_heat_duty, params)
    return (reaction_heat(inputs.mode, inputs.load, params) + q_in - q_out
            - inputs.cooling_duty - asr_heat_loss(state.asr_temp, params, ambient))


def net_ms_heat(state: ThermalState, inputs: ThermalInputs, params: PlantParams,
                ambient: float | None = None) -> float:
    op = params.operational
    return (-inputs.ms_heat_duty / op.ms_exchanger_eff
            + op.ms_heater_eff * inputs.ms_heater_power
            - ms_heat_loss(state.ms_temp, params, ambient))


def step(state: ThermalState, inputs: ThermalInputs, dt: float, params: PlantParams,
         ambient: float | None = None, max_substep: float = MAX_SUBSTEP) -> ThermalState:
    """Advance the state by ``dt`` seconds under constant drives."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    th = params.thermal
    n = max(1, math.ceil(dt / max_substep - 1e-12))
    h = dt / n
    c_ms = th.ms_capacitance
    s = state
    for _ in range(n):
        t_asr = s.asr_temp + h * net_asr_heat(s, inputs, params, ambient) / th.asr_capacitance
        # A tank with no salt has no state to integrate.
        t_ms = s.ms_temp + h * net_ms_heat(s, inputs, params, ambient) / c_ms if c_ms > 0 else s.ms_temp
        s = ThermalState(t_asr, t_ms)
    if not (math.isfinite(s.asr_temp) and math.isfinite(s.ms_temp)) or s.asr_temp <= 0 or s.ms_temp <= 0:
        raise IntegrationError(f"non-physical state {s}")
    return s


def schedule_inputs(schedule, t: int) -> ThermalInputs:
    return ThermalInputs(
        mode=schedule.mode[t],
        load=float(schedule.load[t]) if Mode(schedule.mode[t]) is Mode.PRODUCTION else 0.0,
        cooling_duty=max(0.0, float(schedule.cooling_duty[t])),
        ms_heat_duty=max(0.0, float(schedule.ms_heat_duty[t])),
        suh_heat_duty=max(0.0, float(schedule.suh_heat_duty[t])),
        ms_heater_power=max(0.0, float(schedule.ms_heater_power[t])),
    )


def replay_schedule(schedule, params: PlantParams, substep: float = MAX_SUBSTEP):
    """Re-simulate a decoded schedule at fine substeps.

    Returns the trajectory at step boundaries (one more state than there are
    steps) and the largest reactor temperature deviation from the schedule's
    own trajectory.
    """
    n = len(schedule.mode)
    if n == 0:
        return [], 0.0
    if len(schedule.asr_temp) != n + 1 or len(schedule.ms_temp) != n + 1:
        raise ReplayError("schedule temperatures must have one entry per step boundary")
    if schedule.dt <= 0:
        raise ReplayError("schedule time step must be positive")
    state = ThermalState(float(schedule.asr_temp[0]), float(schedule.ms_temp[0]))
    traj = [state]
    dev = 0.0
    for t in range(n):
        state = step(state, schedule_inputs(schedule, t), schedule.dt, params,
                     ambient=float(schedule.ambient_temp[t]), max_substep=substep)
        traj.append(state)
        dev = max(dev, abs(state.asr_temp - float(schedule.asr_temp[t + 1])))
    return traj, dev


def simulate(state: ThermalState, inputs: ThermalInputs, duration: float, params: PlantParams,
             record_every: float = 3600.0, ambient: float | None = None):
    """Hold constant drives for ``duration`` seconds; return (times, states)."""
    times, states = [0.0], [state]
    elapsed = 0.0
    while elapsed < duration - 1e-9:
        h = min(record_every, duration - elapsed)
        state = step(state, inputs, h, params, ambient)
        elapsed += h
        times.append(elapsed)
        states.append(state)
    return np.array(times), states


TRAJECTORY_COLUMNS = ("time_s", "asr_temp_K", "ms_temp_K", "reaction_heat_W", "gas_in_W",
                      "gas_out_W", "cooling_duty_W", "ms_heat_duty_W", "suh_heat_duty_W",
                      "ms_heater_power_W", "asr_loss_W", "ms_loss_W")


def write_trajectory_csv(path, schedule, trajectory, params: PlantParams) -> None:
    """Export a replayed trajectory; drive columns refer to the step starting at time_s."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRAJECTORY_COLUMNS)
        for k, s in enumerate(trajectory):
            if k < len(schedule.mode):
                inp = schedule_inputs(schedule, k)
                amb = float(schedule.ambient_temp[k])
            else:
                inp = ThermalInputs(Mode.SHUTDOWN)
                amb = float(schedule.ambient_temp[-1])
            q_in, q_out = gas_enthalpy_duties(inp.mode, inp.load, inp.ms_heat_duty,
                                              inp.suh_heat_duty, params)
            w.writerow([repr(k * schedule.dt), repr(s.asr_temp), repr(s.ms_temp),
                        repr(reaction_heat(inp.mode, inp.load, params)), repr(q_in), repr(q_out),
                        repr(inp.cooling_duty), repr(inp.ms_heat_duty), repr(inp.suh_heat_duty),
                        repr(inp.ms_heater_power), repr(asr_heat_loss(s.asr_temp, params, amb)),
                        repr(ms_heat_loss(s.ms_temp, params, amb))])
