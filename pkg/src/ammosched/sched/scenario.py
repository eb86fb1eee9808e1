"""Scenario inputs and decoded schedules, with CSV/JSON round-tripping."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from ..params import Mode

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib


class ScenarioError(ValueError):
    pass


@dataclass
class ScenarioProfile:
    """Time-gridded exogenous data plus the plant state at t = 0.

    ``wind`` and ``pv`` are available power in W per step.  ``ambient_temp``
    and ``grid_price`` may be scalars or per-step arrays; ``grid_price`` of
    None means the configured economic price.  ``cyclic`` selects cyclic
    storage closure; when False the final storage levels are free, which is
    what a chained rolling window needs.
    """

    dt: float
    wind: np.ndarray
    pv: np.ndarray
    ambient_temp: np.ndarray | float = 288.0
    initial_asr_temp: float = 733.0
    initial_ms_temp: float = 838.15
    initial_bes_energy: float | None = None  # None: lower end of the battery window
    initial_hs_level: float | None = None  # None: minimum hydrogen stock
    initial_mode: Mode = Mode.PRODUCTION
    initial_load: float | None = None
    grid_price: np.ndarray | None = None
    cyclic: bool = True
    name: str = "scenario"

    def __post_init__(self):
        self.wind = np.asarray(self.wind, dtype=float).ravel()
        self.pv = np.asarray(self.pv, dtype=float).ravel()
        n = self.wind.size
        if self.pv.size != n:
            raise ScenarioError("wind and pv series differ in length")
        amb = np.asarray(self.ambient_temp, dtype=float)
        self.ambient_temp = np.full(n, float(amb)) if amb.ndim == 0 else amb.ravel()
        if self.ambient_temp.size != n:
            raise ScenarioError("ambient_temp length differs from the horizon")
        if self.grid_price is not None:
            gp = np.asarray(self.grid_price, dtype=float)
            self.grid_price = np.full(n, float(gp)) if gp.ndim == 0 else gp.ravel()
            if self.grid_price.size != n or (self.grid_price < 0).any():
                raise ScenarioError("grid_price must be non-negative with one entry per step")
        self.initial_mode = Mode(self.initial_mode)
        if not self.dt > 0:
            raise ScenarioError("dt must be positive")
        if (self.wind < 0).any() or (self.pv < 0).any():
            raise ScenarioError("renewable availability must be non-negative")
        if not (np.isfinite(self.wind).all() and np.isfinite(self.pv).all()):
            raise ScenarioError("renewable availability must be finite")
        if self.initial_load is not None and self.initial_load < 0:
            raise ScenarioError("initial_load must be non-negative")

    @property
    def horizon_steps(self) -> int:
        return int(self.wind.size)

    @property
    def renewable(self) -> np.ndarray:
        return self.wind + self.pv

    @property
    def days(self) -> float:
        return self.horizon_steps * self.dt / 86400.0

    def window(self, start: int, steps: int, **initial) -> "ScenarioProfile":
        """Sub-horizon [start, start+steps) with replaced initial conditions."""
        sl = slice(start, start + steps)
        kw = dict(dt=self.dt, wind=self.wind[sl], pv=self.pv[sl], ambient_temp=self.ambient_temp[sl],
                  initial_asr_temp=self.initial_asr_temp, initial_ms_temp=self.initial_ms_temp,
                  initial_bes_energy=self.initial_bes_energy, initial_hs_level=self.initial_hs_level,
                  initial_mode=self.initial_mode, initial_load=self.initial_load,
                  grid_price=None if self.grid_price is None else self.grid_price[sl],
                  cyclic=self.cyclic, name=f"{self.name}[{start}:{start + steps}]")
        kw.update(initial)
        return ScenarioProfile(**kw)

    def scaled(self, factor: float) -> "ScenarioProfile":
        """Copy with wind and PV multiplied by ``factor``."""
        out = self.window(0, self.horizon_steps, name=self.name)
        out.wind = self.wind * factor
        out.pv = self.pv * factor
        return out


SIDECAR_KEYS = {
    "dt_s": "dt",
    "initial_asr_temp_K": "initial_asr_temp",
    "initial_ms_temp_K": "initial_ms_temp",
    "initial_bes_energy_J": "initial_bes_energy",
    "initial_hs_level_Nm3": "initial_hs_level",
    "initial_mode": "initial_mode",
    "initial_load": "initial_load",
    "ambient_temp_K": "ambient_temp",
    "cyclic": "cyclic",
    "name": "name",
}


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".toml")


def read_scenario(csv_path, sidecar=None) -> ScenarioProfile:
    """Read ``step,wind_W,pv_W[,ambient_K][,grid_price_CNY_per_kWh]`` plus a TOML sidecar."""
    csv_path = Path(csv_path)
    with csv_path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        for req in ("step", "wind_W", "pv_W"):
            if req not in cols:
                raise ScenarioError(f"{csv_path}: missing column {req!r}")
        rows = list(reader)
    steps = [int(r["step"]) for r in rows]
    if steps != list(range(len(steps))):
        raise ScenarioError(f"{csv_path}: steps must run 0, 1, 2, ... without gaps")
    kw = {"wind": [float(r["wind_W"]) for r in rows], "pv": [float(r["pv_W"]) for r in rows]}
    if "ambient_K" in cols:
        kw["ambient_temp"] = [float(r["ambient_K"]) for r in rows]
    if "grid_price_CNY_per_kWh" in cols:
        kw["grid_price"] = [float(r["grid_price_CNY_per_kWh"]) * 1e-3 for r in rows]
    side = Path(sidecar) if sidecar else sidecar_path(csv_path)
    meta = tomllib.loads(side.read_text()) if side.exists() else {}
    for key, value in meta.items():
        if key not in SIDECAR_KEYS:
            raise ScenarioError(f"{side}: unknown key {key!r}")
        attr = SIDECAR_KEYS[key]
        if attr == "ambient_temp" and "ambient_temp" in kw:
            continue
        kw[attr] = value
    kw.setdefault("dt", 3600.0)
    kw.setdefault("name", csv_path.stem)
    return ScenarioProfile(**kw)


def write_scenario(scenario: ScenarioProfile, csv_path) -> None:
    csv_path = Path(csv_path)
    with csv_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        head = ["step", "wind_W", "pv_W", "ambient_K"]
        if scenario.grid_price is not None:
            head.append("grid_price_CNY_per_kWh")
        w.writerow(head)
        for t in range(scenario.horizon_steps):
            row = [t, repr(float(scenario.wind[t])), repr(float(scenario.pv[t])),
                   repr(float(scenario.ambient_temp[t]))]
            if scenario.grid_price is not None:
                row.append(repr(float(scenario.grid_price[t]) * 1e3))
            w.writerow(row)
    lines = [f"dt_s = {float(scenario.dt)!r}",
             f"initial_asr_temp_K = {float(scenario.initial_asr_temp)!r}",
             f"initial_ms_temp_K = {float(scenario.initial_ms_temp)!r}",
             f'initial_mode = "{scenario.initial_mode.value}"',
             f"cyclic = {'true' if scenario.cyclic else 'false'}",
             f'name = "{scenario.name}"']
    for key, value in (("initial_bes_energy_J", scenario.initial_bes_energy),
                       ("initial_hs_level_Nm3", scenario.initial_hs_level),
                       ("initial_load", scenario.initial_load)):
        if value is not None:
            lines.append(f"{key} = {float(value)!r}")
    sidecar_path(csv_path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------

@dataclass
class Schedule:
    """Decoded decisions.  Step arrays have ``n`` entries; the state arrays
    ``asr_temp``, ``ms_temp``, ``hs_level`` and ``bes_energy`` have ``n + 1``
    (boundary values, index 0 being the initial state).  Units are W, J, K,
    Nm3, Nm3/h and t/h."""

    dt: float
    mode: list
    startup: np.ndarray
    shutdown: np.ndarray
    inoff: np.ndarray
    outoff: np.ndarray
    load: np.ndarray
    h2_production: np.ndarray
    h2_to_as: np.ndarray
    hs_level: np.ndarray
    bes_energy: np.ndarray
    bes_charge: np.ndarray
    bes_discharge: np.ndarray
    grid_import: np.ndarray
    ms_mode: np.ndarray
    ms_heat_duty: np.ndarray
    suh_heat_duty: np.ndarray
    cooling_duty: np.ndarray
    ms_heater_power: np.ndarray
    suh_power: np.ndarray
    asr_temp: np.ndarray
    ms_temp: np.ndarray
    aux_power: np.ndarray
    nh3_output: np.ndarray
    hp_power: np.ndarray
    ambient_temp: np.ndarray
    renewable: np.ndarray
    grid_price: np.ndarray
    extras: dict = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return len(self.mode)

    @classmethod
    def empty(cls, dt: float = 3600.0) -> "Schedule":
        kw = {f.name: np.zeros(0) for f in fields(cls) if f.name not in ("dt", "mode", "extras")}
        for name in STATE_SERIES:
            kw[name] = np.zeros(1)
        return cls(dt=dt, mode=[], **kw)


STATE_SERIES = ("asr_temp", "ms_temp", "hs_level", "bes_energy")
BOOL_SERIES = ("startup", "shutdown", "inoff", "outoff", "ms_mode")

# (csv column, attribute) in export order
SCHEDULE_COLUMNS = (
    ("step", None), ("time_s", None), ("dt_s", None), ("mode", "mode"),
    ("startup", "startup"), ("shutdown", "shutdown"), ("inoff", "inoff"), ("outoff", "outoff"),
    ("load", "load"), ("nh3_output_t_per_h", "nh3_output"),
    ("h2_production_Nm3_per_h", "h2_production"), ("h2_to_as_Nm3_per_h", "h2_to_as"),
    ("hp_power_W", "hp_power"), ("aux_power_W", "aux_power"),
    ("bes_charge_W", "bes_charge"), ("bes_discharge_W", "bes_discharge"),
    ("grid_import_W", "grid_import"), ("renewable_W", "renewable"),
    ("grid_price_CNY_per_Wh", "grid_price"), ("ambient_K", "ambient_temp"),
    ("ms_mode", "ms_mode"), ("ms_heat_duty_W", "ms_heat_duty"), ("suh_heat_duty_W", "suh_heat_duty"),
    ("cooling_duty_W", "cooling_duty"), ("ms_heater_power_W", "ms_heater_power"),
    ("suh_power_W", "suh_power"),
    ("asr_temp_K", "asr_temp"), ("asr_temp_end_K", "asr_temp"),
    ("ms_temp_K", "ms_temp"), ("ms_temp_end_K", "ms_temp"),
    ("hs_level_Nm3", "hs_level"), ("hs_level_end_Nm3", "hs_level"),
    ("bes_energy_J", "bes_energy"), ("bes_energy_end_J", "bes_energy"),
)


def write_schedule_csv(schedule: Schedule, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([c for c, _ in SCHEDULE_COLUMNS])
        for t in range(schedule.steps):
            row = []
            for col, attr in SCHEDULE_COLUMNS:
                if col == "step":
                    row.append(t)
                elif col == "time_s":
                    row.append(repr(t * schedule.dt))
                elif col == "dt_s":
                    row.append(repr(float(schedule.dt)))
                elif attr == "mode":
                    row.append(Mode(schedule.mode[t]).value)
                elif attr in BOOL_SERIES:
                    row.append(int(bool(getattr(schedule, attr)[t])))
                elif attr in STATE_SERIES:
                    k = t + 1 if col.endswith("_end_K") or "_end_" in col else t
                    row.append(repr(float(getattr(schedule, attr)[k])))
                else:
                    row.append(repr(float(getattr(schedule, attr)[t])))
            w.writerow(row)


def read_schedule_csv(path) -> Schedule:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return Schedule.empty()
    kw: dict = {}
    for col, attr in SCHEDULE_COLUMNS:
        if attr is None or "_end_" in col or col.endswith("_end_K"):
            continue
        if attr == "mode":
            kw["mode"] = [Mode(r["mode"]) for r in rows]
        elif attr in BOOL_SERIES:
            kw[attr] = np.array([bool(int(r[col])) for r in rows])
        elif attr in STATE_SERIES:
            end_col = next(c for c, a in SCHEDULE_COLUMNS if a == attr and c != col)
            kw[attr] = np.array([float(r[col]) for r in rows] + [float(rows[-1][end_col])])
        else:
            kw[attr] = np.array([float(r[col]) for r in rows])
    return Schedule(dt=float(rows[0]["dt_s"]), **kw)


def schedule_to_json(schedule: Schedule) -> dict:
    out = {"dt_s": schedule.dt, "mode": [Mode(m).value for m in schedule.mode]}
    for f in fields(schedule):
        if f.name in ("dt", "mode", "extras"):
            continue
        arr = getattr(schedule, f.name)
        out[f.name] = [bool(v) for v in arr] if f.name in BOOL_SERIES else [float(v) for v in arr]
    return out


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
