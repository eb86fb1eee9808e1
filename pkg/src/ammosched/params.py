"""Plant parameters, config files and lumped thermal parameter estimation.

All values are held in canonical SI-style units: W, J, K, s, kg, Nm3, t and
CNY.  Per-hour flow quantities (kg/h, Nm3/h, t/h) keep their hourly unit and
are converted where a power balance is formed.

Config files are flat ``key = value`` TOML.  Every dimensional key carries
its unit as a suffix (``ambient_temp_K``, ``grid_price_CNY_per_kWh``);
dimensionless keys have no suffix (``load_min``).  Unspecified keys fall back
to the defaults below.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib


class Mode(str, Enum):
    PRODUCTION = "on"
    STANDBY = "by"
    COLD_START = "cs"
    SHUTDOWN = "off"


MODES = (Mode.PRODUCTION, Mode.STANDBY, Mode.COLD_START, Mode.SHUTDOWN)

H2_DENSITY_KG_PER_NM3 = 0.08988
NH3_MOLAR_MASS_G_PER_MOL = 17.0
NH3_REACTION_ENTHALPY_J_PER_MOL = 46_100.0


class ConfigError(ValueError):
    """Invalid configuration value; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class UnknownKeyError(ConfigError):
    pass


class UnitMismatchError(ConfigError):
    pass


def _default_reaction_heat() -> float:
    mol_per_h = 24.9e6 / NH3_MOLAR_MASS_G_PER_MOL
    return mol_per_h * NH3_REACTION_ENTHALPY_J_PER_MOL / 3600.0


DEFAULT_TRANSITIONS = (
    # to:  on     by     cs     off        from:
    (True, True, False, True),  # on
    (True, True, False, True),  # by
    (True, False, True, False),  # cs
    (False, False, True, True),  # off
)


@dataclass(frozen=True)
class ThermalParams:
    asr_capacitance: float = 1.918e8
    asr_loss_resistance: float = 0.0052
    ms_loss_resistance: float = 0.0535
    ms_density: float = 1924.6
    ms_specific_heat: float = 1488.0
    ms_volume: float = 20.0
    reaction_heat_coeff: float = field(default_factory=_default_reaction_heat)
    rig_specific_heat: float = 3461.0
    rog_specific_heat: float = 3297.0
    # Recycle gas bypasses separation in standby, so the outlet keeps the
    # inlet composition.
    standby_rog_specific_heat: float = 3461.0
    rig_temp_production: float = 416.15
    rog_temp_production: float = 663.55
    rig_temp_standby: float = 573.15
    ms_approach_gap: float = 15.0
    ambient_temp: float = 288.0

    @property
    def ms_capacitance(self) -> float:
        """Heat capacity of the salt inventory, J/K."""
        return self.ms_density * self.ms_volume * self.ms_specific_heat


@dataclass(frozen=True)
class OperationalParams:
    load_min: float = 0.3
    load_max: float = 1.1
    ramp_down: float = 0.25
    ramp_up: float = 0.25
    asr_temp_act_min: float = 693.0
    asr_temp_act_max: float = 763.0
    ms_temp_min: float = 553.15
    ms_temp_max: float = 838.15
    cooling_duty_max: float = 4.1e6
    ms_heat_duty_max: float = 3.0e6
    suh_heat_duty_max: float = 1.9e6
    ms_heater_power_max: float = 3.1e6
    suh_power_max: float = 2.0e6
    ms_exchanger_eff: float = 0.9
    ms_heater_eff: float = 0.95
    suh_eff: float = 0.95
    rig_flow_intercept: float = 62_661.43
    rig_flow_slope: float = 13_368.0
    rig_flow_standby: float = 15_205.89
    h2_consumption_rated: float = 49_202.4
    nh3_rate_rated: float = 24.9
    hp_specific_power: float = 4800.0
    hp_flow_max: float = 2.0e8 / 4800.0
    hs_min: float = 1.5e4
    hs_max: float = 1.35e5
    # 4 MWh / 1 MW battery at a 10-90 % state-of-charge window.
    bes_energy_min: float = 0.4 * 3.6e9
    bes_energy_max: float = 3.6 * 3.6e9
    bes_charge_max: float = 1.0e6
    bes_discharge_max: float = 1.0e6
    aux_base_power: float = 3.97e6
    aux_load_coeff: float = 1.59e7
    grid_import_max: float = 2.0e7
    transition_matrix: tuple = DEFAULT_TRANSITIONS

    def allowed(self, src: Mode, dst: Mode) -> bool:
        return bool(self.transition_matrix[MODES.index(Mode(src))][MODES.index(Mode(dst))])

    @property
    def hs_nameplate(self) -> float:
        return self.hs_min + self.hs_max

    @property
    def bes_nameplate(self) -> float:
        return self.bes_energy_min + self.bes_energy_max


@dataclass(frozen=True)
class ComponentCost:
    """One line of the annualised investment and O&M cost.

    ``capacity`` is None for storage components whose size is derived from
    the operational/thermal parameters at costing time.
    """

    name: str
    unit_capital_cost: float
    capacity: float | None
    life_years: float
    om_ratio: float


DEFAULT_COMPONENTS = (
    ComponentCost("wind", 3700.0, 450_000.0, 25.0, 0.02),  # CNY/kW, kW
    ComponentCost("pv", 3450.0, 150_000.0, 25.0, 0.01),
    ComponentCost("electrolyzer", 500.0, 200_000.0, 25.0, 0.02),
    ComponentCost("ammonia_synthesis", 1100.0, 200_000.0, 25.0, 0.02),  # CNY/(t/yr), t/yr
    ComponentCost("hydrogen_storage", 1750.0, None, 25.0, 0.01),  # CNY/kg
    ComponentCost("battery", 1700.0, None, 12.0, 0.02),  # CNY/kWh
    ComponentCost("molten_salt", 150.0, None, 25.0, 0.02),  # CNY/kWh
)

COMPONENT_CAPACITY_UNITS = {
    "wind": "kW",
    "pv": "kW",
    "electrolyzer": "kW",
    "ammonia_synthesis": "t_per_yr",
    "hydrogen_storage": "kg",
    "battery": "kWh",
    "molten_salt": "kWh",
}
DERIVED_COMPONENTS = ("hydrogen_storage", "battery", "molten_salt")


@dataclass(frozen=True)
class EconomicParams:
    nh3_price: float = 4200.0
    grid_price: float = 1.2e-3  # CNY per W·h
    startup_cost: float = 1.0e5
    component_costs: tuple = DEFAULT_COMPONENTS
    discount_rate: float = 0.05
    weight_profit: float = 1.0
    weight_temp: float = 100.0  # CNY per K per step
    temp_setpoint: float = 733.0


@dataclass(frozen=True)
class PlantParams:
    thermal: ThermalParams = field(default_factory=ThermalParams)
    operational: OperationalParams = field(default_factory=OperationalParams)
    economic: EconomicParams = field(default_factory=EconomicParams)

    def replace(self, **changes) -> "PlantParams":
        """Return a copy with flat field overrides routed to their section."""
        groups: dict[str, dict] = {"thermal": {}, "operational": {}, "economic": {}}
        for name, value in changes.items():
            section = _SECTION_OF.get(name)
            if section is None:
                raise UnknownKeyError(name, "not a parameter")
            groups[section][name] = value
        params = PlantParams(
            dataclasses.replace(self.thermal, **groups["thermal"]),
            dataclasses.replace(self.operational, **groups["operational"]),
            dataclasses.replace(self.economic, **groups["economic"]),
        )
        validate(params)
        return params


_SECTION_OF = {}
for _section, _cls in (("thermal", ThermalParams), ("operational", OperationalParams),
                       ("economic", EconomicParams)):
    for _f in dataclasses.fields(_cls):
        _SECTION_OF[_f.name] = _section


# ---------------------------------------------------------------------------
# Units

# unit suffix -> (scale, offset) into the canonical unit (first entry)
UNITS = {
    "temperature": {"K": (1.0, 0.0), "C": (1.0, 273.15)},
    "temp_diff": {"K": (1.0, 0.0)},
    "power": {"W": (1.0, 0.0), "kW": (1e3, 0.0), "MW": (1e6, 0.0)},
    "energy": {"J": (1.0, 0.0), "Wh": (3600.0, 0.0), "kWh": (3.6e6, 0.0), "MWh": (3.6e9, 0.0)},
    "capacitance": {"J_per_K": (1.0, 0.0), "MJ_per_K": (1e6, 0.0)},
    "resistance": {"K_per_W": (1.0, 0.0), "K_per_kW": (1e-3, 0.0)},
    "density": {"kg_per_m3": (1.0, 0.0)},
    "specific_heat": {"J_per_kgK": (1.0, 0.0), "kJ_per_kgK": (1e3, 0.0)},
    "volume": {"m3": (1.0, 0.0)},
    "mass_flow": {"kg_per_h": (1.0, 0.0), "t_per_h": (1e3, 0.0)},
    "gas_flow": {"Nm3_per_h": (1.0, 0.0), "kNm3_per_h": (1e3, 0.0)},
    "product_flow": {"t_per_h": (1.0, 0.0)},
    "gas_amount": {"Nm3": (1.0, 0.0), "kNm3": (1e3, 0.0)},
    "specific_power": {"Wh_per_Nm3": (1.0, 0.0), "kWh_per_Nm3": (1e3, 0.0)},
    "rate": {"per_h": (1.0, 0.0)},
    "money": {"CNY": (1.0, 0.0)},
    "product_price": {"CNY_per_t": (1.0, 0.0)},
    "energy_price": {"CNY_per_Wh": (1.0, 0.0), "CNY_per_kWh": (1e-3, 0.0), "CNY_per_MWh": (1e-6, 0.0)},
    "temp_weight": {"CNY_per_K": (1.0, 0.0)},
    "dimensionless": {"": (1.0, 0.0)},
}

DIMENSIONS = {
    # thermal
    "asr_capacitance": "capacitance",
    "asr_loss_resistance": "resistance",
    "ms_loss_resistance": "resistance",
    "ms_density": "density",
    "ms_specific_heat": "specific_heat",
    "ms_volume": "volume",
    "reaction_heat_coeff": "power",
    "rig_specific_heat": "specific_heat",
    "rog_specific_heat": "specific_heat",
    "standby_rog_specific_heat": "specific_heat",
    "rig_temp_production": "temperature",
    "rog_temp_production": "temperature",
    "rig_temp_standby": "temperature",
    "ms_approach_gap": "temp_diff",
    "ambient_temp": "temperature",
    # operational
    "load_min": "dimensionless",
    "load_max": "dimensionless",
    "ramp_down": "rate",
    "ramp_up": "rate",
    "asr_temp_act_min": "temperature",
    "asr_temp_act_max": "temperature",
    "ms_temp_min": "temperature",
    "ms_temp_max": "temperature",
    "cooling_duty_max": "power",
    "ms_heat_duty_max": "power",
    "suh_heat_duty_max": "power",
    "ms_heater_power_max": "power",
    "suh_power_max": "power",
    "ms_exchanger_eff": "dimensionless",
    "ms_heater_eff": "dimensionless",
    "suh_eff": "dimensionless",
    "rig_flow_intercept": "mass_flow",
    "rig_flow_slope": "mass_flow",
    "rig_flow_standby": "mass_flow",
    "h2_consumption_rated": "gas_flow",
    "nh3_rate_rated": "product_flow",
    "hp_specific_power": "specific_power",
    "hp_flow_max": "gas_flow",
    "hs_min": "gas_amount",
    "hs_max": "gas_amount",
    "bes_energy_min": "energy",
    "bes_energy_max": "energy",
    "bes_charge_max": "power",
    "bes_discharge_max": "power",
    "aux_base_power": "power",
    "aux_load_coeff": "power",
    "grid_import_max": "power",
    # economic
    "nh3_price": "product_price",
    "grid_price": "energy_price",
    "startup_cost": "money",
    "discount_rate": "dimensionless",
    "weight_profit": "dimensionless",
    "weight_temp": "temp_weight",
    "temp_setpoint": "temperature",
}

_COMPONENT_FIELDS = ("unit_cost", "capacity", "life_years", "om_ratio")


def _canonical_key(name: str) -> str:
    unit = next(iter(UNITS[DIMENSIONS[name]]))
    return f"{name}_{unit}" if unit else name


def _component_key(comp: str, what: str) -> str:
    unit = COMPONENT_CAPACITY_UNITS[comp]
    if what == "unit_cost":
        return f"capex_{comp}_unit_cost_CNY_per_{unit}"
    if what == "capacity":
        return f"capex_{comp}_capacity_{unit}"
    return f"capex_{comp}_{what}"


def _split_key(key: str) -> tuple[str, str]:
    """Map a config key to (field name, unit suffix)."""
    if key in DIMENSIONS:
        if DIMENSIONS[key] != "dimensionless":
            raise UnitMismatchError(key, f"missing unit suffix, expected {_canonical_key(key)}")
        return key, ""
    for name in sorted(DIMENSIONS, key=len, reverse=True):
        if key.startswith(name + "_"):
            unit = key[len(name) + 1:]
            units = UNITS[DIMENSIONS[name]]
            if unit not in units:
                raise UnitMismatchError(
                    name, f"unit '{unit}' not valid for {DIMENSIONS[name]}; use one of {sorted(units)}")
            return name, unit
    raise UnknownKeyError(key, "unknown config key")


def normalize(raw: dict) -> dict:
    """Convert a raw key/value mapping to canonical keys and units.

    Idempotent: feeding the result back returns an identical mapping.
    """
    out: dict = {}
    comp_keys = {_component_key(c, w): (c, w) for c in COMPONENT_CAPACITY_UNITS for w in _COMPONENT_FIELDS}
    for key, value in raw.items():
        if key == "transition_matrix":
            out[key] = value if isinstance(value, str) else format_transitions(value)
            continue
        if key in comp_keys:
            out[key] = float(value)
            continue
        if key.startswith("capex_"):
            raise UnknownKeyError(key, "unknown component cost key")
        name, unit = _split_key(key)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(name, f"expected a number, got {value!r}")
        scale, offset = UNITS[DIMENSIONS[name]][unit]
        canonical = _canonical_key(name)
        if canonical in out:
            raise ConfigError(name, "specified more than once")
        out[canonical] = float(value) * scale + offset
    return out


_MODE_NAMES = {m.value: m for m in MODES}


def parse_transitions(text: str) -> tuple:
    """Parse ``"on:on,by,off; by:by,on,off; cs:cs,on; off:off,cs"``."""
    matrix = [[False] * 4 for _ in range(4)]
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            src, dsts = part.split(":")
            i = MODES.index(_MODE_NAMES[src.strip()])
            for d in filter(None, (x.strip() for x in dsts.split(","))):
                matrix[i][MODES.index(_MODE_NAMES[d])] = True
        except (ValueError, KeyError) as exc:
            raise ConfigError("transition_matrix", f"cannot parse '{part}'") from exc
    return tuple(tuple(row) for row in matrix)


def format_transitions(matrix) -> str:
    parts = []
    for i, src in enumerate(MODES):
        dsts = [MODES[j].value for j in range(4) if matrix[i][j]]
        parts.append(f"{src.value}:{','.join(dsts)}")
    return "; ".join(parts)


def from_mapping(raw: dict) -> PlantParams:
    """Build validated parameters from a raw (unnormalised) mapping."""
    canon = normalize(raw)
    sections: dict[str, dict] = {"thermal": {}, "operational": {}, "economic": {}}
    comps = {c.name: c for c in DEFAULT_COMPONENTS}
    for key, value in canon.items():
        if key == "transition_matrix":
            sections["operational"]["transition_matrix"] = parse_transitions(value)
            continue
        if key.startswith("capex_"):
            comp, what = next((c, w) for c in COMPONENT_CAPACITY_UNITS for w in _COMPONENT_FIELDS
                              if _component_key(c, w) == key)
            if what == "capacity" and comp in DERIVED_COMPONENTS:
                raise ConfigError(key, "capacity is derived from the storage parameters")
            attr = {"unit_cost": "unit_capital_cost"}.get(what, what)
            comps[comp] = dataclasses.replace(comps[comp], **{attr: value})
            continue
        name = next(n for n in DIMENSIONS if _canonical_key(n) == key)
        sections[_SECTION_OF[name]][name] = value
    sections["economic"]["component_costs"] = tuple(comps[c.name] for c in DEFAULT_COMPONENTS)
    params = PlantParams(
        ThermalParams(**sections["thermal"]),
        OperationalParams(**sections["operational"]),
        EconomicParams(**sections["economic"]),
    )
    validate(params)
    return params


def to_mapping(params: PlantParams) -> dict:
    """Canonical flat mapping of every parameter (inverse of from_mapping)."""
    out: dict = {}
    for section in (params.thermal, params.operational, params.economic):
        for f in dataclasses.fields(section):
            if f.name == "transition_matrix":
                out["transition_matrix"] = format_transitions(section.transition_matrix)
            elif f.name == "component_costs":
                for c in section.component_costs:
                    out[_component_key(c.name, "unit_cost")] = c.unit_capital_cost
                    if c.capacity is not None:
                        out[_component_key(c.name, "capacity")] = c.capacity
                    out[_component_key(c.name, "life_years")] = c.life_years
                    out[_component_key(c.name, "om_ratio")] = c.om_ratio
            else:
                out[_canonical_key(f.name)] = getattr(section, f.name)
    return out


def dumps_config(params: PlantParams) -> str:
    lines = []
    for key, value in to_mapping(params).items():
        if isinstance(value, str):
            lines.append(f'{key} = "{value}"')
        else:
            lines.append(f"{key} = {float(value)!r}")
    return "\n".join(lines) + "\n"


def loads_config(text: str) -> PlantParams:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<file>", str(exc)) from exc
    nested = [k for k, v in raw.items() if isinstance(v, dict)]
    if nested:
        raise ConfigError(nested[0], "config must be flat key = value pairs")
    return from_mapping(raw)


def load_config(path) -> tuple[ThermalParams, OperationalParams, EconomicParams]:
    params = loads_config(Path(path).read_text())
    return params.thermal, params.operational, params.economic


def load_params(path=None) -> PlantParams:
    if path is None:
        return PlantParams()
    return loads_config(Path(path).read_text())


def validate(params: PlantParams) -> None:
    th, op, ec = params.thermal, params.operational, params.economic

    for section in (th, op):
        for f in dataclasses.fields(section):
            v = getattr(section, f.name)
            if isinstance(v, (float, int)) and not f.name.endswith("_resistance"):
                # an infinite resistance models a perfectly insulated body
                if not math.isfinite(v):
                    raise ConfigError(f.name, "must be finite")
    for name in ("asr_capacitance", "asr_loss_resistance", "ms_loss_resistance", "ms_density",
                 "ms_specific_heat", "reaction_heat_coeff", "rig_specific_heat",
                 "rog_specific_heat", "standby_rog_specific_heat", "rig_temp_production",
                 "rog_temp_production", "rig_temp_standby", "ms_approach_gap", "ambient_temp"):
        if getattr(th, name) <= 0:
            raise ConfigError(name, "must be positive")
    # zero salt volume is how an absent MS-TES is expressed
    if th.ms_volume < 0:
        raise ConfigError("ms_volume", "must be non-negative")
    if not th.rig_temp_standby > th.rig_temp_production:
        raise ConfigError("rig_temp_standby", "must exceed rig_temp_production")
    if not th.ambient_temp < th.rig_temp_production:
        raise ConfigError("ambient_temp", "must be below rig_temp_production")

    if not 0 < op.load_min < 1:
        raise ConfigError("load_min", f"must lie in (0, 1), got {op.load_min}")
    if not op.load_max >= 1:
        raise ConfigError("load_max", f"must be >= 1, got {op.load_max}")
    if op.ramp_up <= 0 or op.ramp_down <= 0:
        raise ConfigError("ramp_up" if op.ramp_up <= 0 else "ramp_down", "must be positive")
    if not op.asr_temp_act_min < op.asr_temp_act_max:
        raise ConfigError("asr_temp_act_min", "must be below asr_temp_act_max")
    if not op.ms_temp_min < op.ms_temp_max:
        raise ConfigError("ms_temp_min", "must be below ms_temp_max")
    if not op.hs_min <= op.hs_max:
        raise ConfigError("hs_min", "must not exceed hs_max")
    if not op.bes_energy_min <= op.bes_energy_max:
        raise ConfigError("bes_energy_min", "must not exceed bes_energy_max")
    for name in ("ms_exchanger_eff", "ms_heater_eff", "suh_eff"):
        if not 0 < getattr(op, name) <= 1:
            raise ConfigError(name, "efficiency must lie in (0, 1]")
    for name in ("cooling_duty_max", "ms_heat_duty_max", "suh_heat_duty_max", "ms_heater_power_max",
                 "suh_power_max", "rig_flow_intercept", "rig_flow_slope", "rig_flow_standby",
                 "h2_consumption_rated", "nh3_rate_rated", "hp_specific_power", "hp_flow_max",
                 "hs_min", "bes_energy_min", "bes_charge_max", "bes_discharge_max",
                 "aux_base_power", "aux_load_coeff", "grid_import_max"):
        if getattr(op, name) < 0:
            raise ConfigError(name, "must be non-negative")
    if op.suh_heat_duty_max > op.suh_eff * op.suh_power_max * (1 + 1e-12):
        raise ConfigError("suh_heat_duty_max", "exceeds suh_eff * suh_power_max")
    if len(op.transition_matrix) != 4 or any(len(r) != 4 for r in op.transition_matrix):
        raise ConfigError("transition_matrix", "must be 4x4")

    if ec.nh3_price < 0 or ec.grid_price < 0 or ec.startup_cost < 0:
        raise ConfigError("nh3_price" if ec.nh3_price < 0 else
                          "grid_price" if ec.grid_price < 0 else "startup_cost",
                          "prices must be non-negative")
    if ec.weight_profit <= 0:
        raise ConfigError("weight_profit", "must be positive")
    if ec.weight_temp < 0:
        raise ConfigError("weight_temp", "must be non-negative")
    if ec.discount_rate <= 0:
        raise ConfigError("discount_rate", "must be positive")
    for c in ec.component_costs:
        if c.life_years <= 0:
            raise ConfigError(_component_key(c.name, "life_years"), "must be positive")
        if c.unit_capital_cost < 0 or c.om_ratio < 0 or (c.capacity is not None and c.capacity < 0):
            raise ConfigError(_component_key(c.name, "unit_cost"), "costs must be non-negative")


# ---------------------------------------------------------------------------
# Annualised cost

def capital_recovery_factor(rate: float, years: float) -> float:
    g = (1.0 + rate) ** years
    return rate * g / (g - 1.0)


def component_capacities(params: PlantParams) -> dict[str, float]:
    """Capacity of every costed component in its cost unit."""
    th, op = params.thermal, params.operational
    derived = {
        "hydrogen_storage": op.hs_nameplate * H2_DENSITY_KG_PER_NM3,
        "battery": op.bes_nameplate / 3.6e6,
        # usable sensible heat between the salt temperature limits
        "molten_salt": th.ms_capacitance * (op.ms_temp_max - op.ms_temp_min) / 3.6e6,
    }
    return {c.name: derived[c.name] if c.capacity is None else c.capacity
            for c in params.economic.component_costs}


def capex_om_cost(params: PlantParams, days: float) -> float:
    """Investment plus O&M cost attributed to a horizon of ``days``, CNY."""
    ec = params.economic
    caps = component_capacities(params)
    inv = om = 0.0
    for c in ec.component_costs:
        capital = c.unit_capital_cost * caps[c.name]
        inv += capital * capital_recovery_factor(ec.discount_rate, c.life_years)
        om += capital * c.om_ratio
    return days * (inv + om) / 365.0


# ---------------------------------------------------------------------------
# Geometry-based estimation of lumped thermal parameters

@dataclass(frozen=True)
class ReactorGeometry:
    shell_mass: float
    shell_specific_heat: float
    internals_mass: float
    internals_specific_heat: float
    catalyst_mass: float
    catalyst_specific_heat: float
    wall_thickness: float
    insulation_thickness: float
    wall_conductivity: float
    insulation_conductivity: float
    side_wall_area: float
    end_wall_area: float
    side_insulation_area: float
    end_insulation_area: float


GEOMETRY_KEYS = {
    "shell_mass": "shell_mass_kg",
    "shell_specific_heat": "shell_specific_heat_J_per_kgK",
    "internals_mass": "internals_mass_kg",
    "internals_specific_heat": "internals_specific_heat_J_per_kgK",
    "catalyst_mass": "catalyst_mass_kg",
    "catalyst_specific_heat": "catalyst_specific_heat_J_per_kgK",
    "wall_thickness": "wall_thickness_m",
    "insulation_thickness": "insulation_thickness_m",
    "wall_conductivity": "wall_conductivity_W_per_mK",
    "insulation_conductivity": "insulation_conductivity_W_per_mK",
    "side_wall_area": "side_wall_area_m2",
    "end_wall_area": "end_wall_area_m2",
    "side_insulation_area": "side_insulation_area_m2",
    "end_insulation_area": "end_insulation_area_m2",
}


def load_geometry(path) -> ReactorGeometry:
    raw = tomllib.loads(Path(path).read_text())
    inverse = {v: k for k, v in GEOMETRY_KEYS.items()}
    values = {}
    for key, value in raw.items():
        if key not in inverse:
            raise UnknownKeyError(key, "unknown geometry key")
        values[inverse[key]] = float(value)
    missing = set(GEOMETRY_KEYS) - set(values)
    if missing:
        raise ConfigError(sorted(missing)[0], "missing geometry value")
    return ReactorGeometry(**values)


def estimate_capacitance(geom: ReactorGeometry) -> float:
    """Lumped heat capacity of shell, internals and catalyst, J/K."""
    parts = (
        ("shell", geom.shell_mass, geom.shell_specific_heat),
        ("internals", geom.internals_mass, geom.internals_specific_heat),
        ("catalyst", geom.catalyst_mass, geom.catalyst_specific_heat),
    )
    for name, m, c in parts:
        if m < 0 or not math.isfinite(m):
            raise ConfigError(f"{name}_mass", "must be non-negative and finite")
        if c < 0 or not math.isfinite(c):
            raise ConfigError(f"{name}_specific_heat", "must be non-negative and finite")
    total = sum(m * c for _, m, c in parts)
    if total <= 0:
        raise ConfigError("shell_mass", "total heat capacity must be positive")
    return total


def _layer_resistance(thickness, conductivity, area, name):
    if thickness == 0:
        return 0.0
    if thickness < 0:
        raise ConfigError(f"{name}_thickness", "must be non-negative")
    if conductivity <= 0:
        raise ConfigError(f"{name}_conductivity", "must be positive")
    if area <= 0:
        raise ConfigError(f"{name}_area", "must be positive")
    return thickness / (conductivity * area)


def estimate_loss_resistance(geom: ReactorGeometry) -> float:
    """Equivalent wall+insulation resistance to ambient, K/W.

    Each path is wall and insulation in series; the side wall and the two end
    caps act in parallel.
    """
    for name in ("side_wall_area", "end_wall_area", "side_insulation_area", "end_insulation_area"):
        if getattr(geom, name) <= 0:
            raise ConfigError(name, "must be positive")
    for name in ("wall_conductivity", "insulation_conductivity"):
        if getattr(geom, name) <= 0:
            raise ConfigError(name, "must be positive")
    side = (_layer_resistance(geom.wall_thickness, geom.wall_conductivity, geom.side_wall_area, "wall")
            + _layer_resistance(geom.insulation_thickness, geom.insulation_conductivity,
                                geom.side_insulation_area, "insulation"))
    end = (_layer_resistance(geom.wall_thickness, geom.wall_conductivity, geom.end_wall_area, "wall")
           + _layer_resistance(geom.insulation_thickness, geom.insulation_conductivity,
                               geom.end_insulation_area, "insulation"))
    if side == 0 or end == 0:
        return 0.0
    return 1.0 / (1.0 / side + 2.0 / end)
