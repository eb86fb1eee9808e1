"""Per-schedule performance metrics in the layout of the scheme comparison table."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from ..params import PlantParams
from ..sched.decode import breakdown_from_schedule
from ..sched.scenario import ScenarioProfile, Schedule


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class ScheduleMetrics:
    nh3_total: float  # t
    startstop_count: int
    grid_cost: float  # CNY
    capex_om: float  # CNY
    net_revenue: float  # CNY
    cum_temp_variation: float  # K
    renewable_utilization: float  # fraction
    renewable_available: float = 0.0  # J
    renewable_consumed: float = 0.0  # J

    def __post_init__(self):
        for f in fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise MetricsError(f"{f.name} is not finite")
        if not 0.0 <= self.renewable_utilization <= 1.0:
            raise MetricsError("renewable_utilization outside [0, 1]")
        if self.cum_temp_variation < 0:
            raise MetricsError("cum_temp_variation is negative")

    def to_dict(self) -> dict:
        return asdict(self)


# CSV header in comparison-table order, with units
METRIC_COLUMNS = (
    ("startstop_count", "startstop_count"),
    ("nh3_total_t", "nh3_total"),
    ("grid_cost_CNY", "grid_cost"),
    ("capex_om_CNY", "capex_om"),
    ("net_revenue_CNY", "net_revenue"),
    ("cum_temp_variation_K", "cum_temp_variation"),
    ("renewable_utilization", "renewable_utilization"),
)


def cumulative_variation(temps) -> float:
    """Sum of absolute changes between consecutive temperatures."""
    temps = np.asarray(temps, dtype=float)
    return float(np.abs(np.diff(temps)).sum()) if temps.size > 1 else 0.0


def renewable_use(schedule: Schedule) -> tuple[float, float]:
    """(consumed, available) renewable energy in J.

    Consumption in a step is the total electrical load less what the grid
    and the battery supplied, clipped to what was available.
    """
    load = (schedule.bes_charge + schedule.ms_heater_power + schedule.suh_power + schedule.aux_power
            + schedule.hp_power)
    avail = np.asarray(schedule.renewable, dtype=float)
    used = np.clip(load - schedule.grid_import - schedule.bes_discharge, 0.0, avail)
    return float(used.sum()) * schedule.dt, float(avail.sum()) * schedule.dt


def compute_metrics(schedule: Schedule, scenario: ScenarioProfile | None, params: PlantParams) -> ScheduleMetrics:
    """Metrics for one schedule.

    ``params`` must carry the storage sizes the schedule was solved with,
    since investment cost depends on them.  A horizon with no renewable
    availability counts as fully utilised.
    """
    n = schedule.steps
    if scenario is not None and scenario.horizon_steps != n:
        raise MetricsError(f"schedule has {n} steps, scenario {scenario.horizon_steps}")
    for name in ("load", "grid_import", "renewable", "inoff", "outoff", "nh3_output"):
        if len(getattr(schedule, name)) != n:
            raise MetricsError(f"{name} length differs from the mode sequence")
    if len(schedule.asr_temp) != n + 1:
        raise MetricsError("asr_temp must hold n + 1 boundary temperatures")
    days = n * schedule.dt / 86400.0
    bd = breakdown_from_schedule(schedule, params, days)
    consumed, available = renewable_use(schedule)
    util = 1.0 if available <= 0 else min(1.0, consumed / available)
    return ScheduleMetrics(
        nh3_total=float(np.sum(schedule.nh3_output)) * schedule.dt / 3600.0,
        startstop_count=int(np.sum(schedule.inoff) + np.sum(schedule.outoff)),
        grid_cost=bd.grid_cost,
        capex_om=bd.capex_om_cost,
        net_revenue=bd.net_revenue,
        cum_temp_variation=cumulative_variation(schedule.asr_temp),
        renewable_utilization=util,
        renewable_available=available,
        renewable_consumed=consumed,
    )


def total_metrics(rows) -> ScheduleMetrics:
    """Aggregate metrics over consecutive windows (sums; utilisation re-weighted)."""
    rows = list(rows)
    if not rows:
        raise MetricsError("nothing to aggregate")
    avail = sum(r.renewable_available for r in rows)
    used = sum(r.renewable_consumed for r in rows)
    return ScheduleMetrics(
        nh3_total=sum(r.nh3_total for r in rows),
        startstop_count=sum(r.startstop_count for r in rows),
        grid_cost=sum(r.grid_cost for r in rows),
        capex_om=sum(r.capex_om for r in rows),
        net_revenue=sum(r.net_revenue for r in rows),
        cum_temp_variation=sum(r.cum_temp_variation for r in rows),
        renewable_utilization=1.0 if avail <= 0 else min(1.0, used / avail),
        renewable_available=avail,
        renewable_consumed=used,
    )
