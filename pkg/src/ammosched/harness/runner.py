"""Scheme comparison, two-axis sensitivity sweeps and rolling-window runs.

Every job (one scheme, one grid cell, one window) owns its own model, so
independent jobs can run in a thread pool; the solver itself is a
subprocess or the bundled solver.  Results are returned in input order.
"""

from __future__ import annotations

import csv
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..milp import SolverConfig
from ..params import ConfigError, Mode, PlantParams
from ..sched.decode import ObjectiveBreakdown, verify_schedule
from ..sched.model import BuildOptions
from ..sched.scenario import ScenarioProfile, Schedule
from ..sched.solve import solve_scenario
from .metrics import METRIC_COLUMNS, ScheduleMetrics, compute_metrics, total_metrics
from .schemes import SCHEME_5, StorageScheme


@dataclass
class RunRecord:
    """Outcome of one deterministic solve.  ``error`` is set when the solve
    raised; ``metrics`` is None unless a schedule was obtained."""

    scheme: str
    status: str
    metrics: ScheduleMetrics | None = None
    schedule: Schedule | None = None
    breakdown: ObjectiveBreakdown | None = None
    verify: dict | None = None
    params: PlantParams | None = None
    error: str | None = None
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return self.metrics is not None


def run_one(scenario: ScenarioProfile, params: PlantParams, scheme: StorageScheme,
            solver: SolverConfig | None = None, options: BuildOptions | None = None,
            verify: bool = True) -> RunRecord:
    """Solve, verify and measure one scheme.  Failures are recorded, not raised."""
    try:
        res = solve_scenario(scenario, params, scheme, options, solver)
    except Exception as exc:  # a failed job must not stop the batch
        return RunRecord(scheme.name, "error", error=f"{type(exc).__name__}: {exc}")
    rec = RunRecord(scheme.name, res.status.value, params=res.ctx.params, wall_time=res.solution.wall_time)
    if res.ok:
        rec.schedule, rec.breakdown = res.schedule, res.breakdown
        rec.metrics = compute_metrics(res.schedule, scenario, res.ctx.params)
        if verify:
            rec.verify = verify_schedule(res.schedule, res.ctx.params)
    return rec


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_scheme_comparison(scenario: ScenarioProfile, base_params: PlantParams, schemes,
                          solver: SolverConfig | None = None, options: BuildOptions | None = None,
                          workers: int = 1) -> list[RunRecord]:
    """One deterministic solve, verification and metrics row per scheme."""
    schemes = list(schemes)
    if not schemes:
        raise ConfigError("schemes", "need at least one scheme")
    return _map(lambda s: run_one(scenario, base_params, s, solver, options), schemes, workers)


def _metric_cells(m: ScheduleMetrics | None) -> list:
    if m is None:
        return [""] * len(METRIC_COLUMNS)
    return [repr(getattr(m, attr)) if isinstance(getattr(m, attr), float) else getattr(m, attr)
            for _, attr in METRIC_COLUMNS]


def write_comparison_csv(records, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scheme", *(c for c, _ in METRIC_COLUMNS), "status"])
        for r in records:
            w.writerow([r.scheme, *_metric_cells(r.metrics), r.status])


# ---------------------------------------------------------------------------
# Two-axis sensitivity sweep

SWEEP_AXES = ("bes_energy", "hs_capacity", "ms_volume")


@dataclass
class SweepCell:
    value1: float
    value2: float
    record: RunRecord

    @property
    def metrics(self) -> ScheduleMetrics | None:
        return self.record.metrics


def _check_grid(name: str, grid) -> list[float]:
    grid = [float(g) for g in grid]
    if not grid:
        raise ConfigError(name, "grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(name, "grid must be strictly increasing")
    if grid[0] < 0:
        raise ConfigError(name, "sizes must be non-negative")
    return grid


def sensitivity_sweep(scenario: ScenarioProfile, base_params: PlantParams, axes, grids,
                      base_scheme: StorageScheme = SCHEME_5, solver: SolverConfig | None = None,
                      options: BuildOptions | None = None, workers: int = 1) -> list[SweepCell]:
    """Solve every (axis1, axis2) size pair on top of ``base_scheme``.

    Cells are ordered row-major over (grid1, grid2).  Battery power follows
    energy at the base scheme's power-to-energy ratio.
    """
    if len(axes) != 2 or len(grids) != 2 or axes[0] == axes[1]:
        raise ConfigError("axes", "need two distinct axes with one grid each")
    for a in axes:
        if a not in SWEEP_AXES:
            raise ConfigError("axes", f"unknown axis {a!r}; choose from {SWEEP_AXES}")
    g1, g2 = _check_grid(axes[0], grids[0]), _check_grid(axes[1], grids[1])
    ratio = base_scheme.bes_power / base_scheme.bes_energy if base_scheme.bes_energy > 0 else 1 / 4 / 3600.0

    def scheme_for(v1, v2):
        sizes = {axes[0]: v1, axes[1]: v2}
        if "bes_energy" in sizes:
            sizes["bes_power"] = sizes["bes_energy"] * ratio
        s = base_scheme.with_sizes(**sizes)
        return StorageScheme(**{**s.__dict__, "name": f"{base_scheme.name}[{axes[0]}={v1:g},{axes[1]}={v2:g}]"})

    cells = [(v1, v2) for v1 in g1 for v2 in g2]
    records = _map(lambda c: run_one(scenario, base_params, scheme_for(*c), solver, options, verify=False),
                   cells, workers)
    return [SweepCell(v1, v2, r) for (v1, v2), r in zip(cells, records)]


def write_sweep_csv(cells, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["axis1", "axis2", "net_revenue_CNY", "cum_temp_K"])
        for c in cells:
            m = c.metrics
            w.writerow([repr(c.value1), repr(c.value2), "" if m is None else repr(m.net_revenue),
                        "" if m is None else repr(m.cum_temp_variation)])


# ---------------------------------------------------------------------------
# Rolling windows over a long profile

@dataclass
class RollingResult:
    rows: list  # (window index, RunRecord) in window order, per scheme
    totals: dict = field(default_factory=dict)  # scheme -> ScheduleMetrics over all windows
    initial_states: dict = field(default_factory=dict)  # scheme -> list of scenario windows used

    def records(self, scheme: str) -> list[RunRecord]:
        return [r for _, r in self.rows if r.scheme == scheme]


def _carry_state(sched: Schedule) -> dict:
    last = sched.mode[-1]
    return dict(
        initial_asr_temp=float(sched.asr_temp[-1]),
        initial_ms_temp=float(sched.ms_temp[-1]),
        initial_hs_level=float(sched.hs_level[-1]),
        initial_bes_energy=float(sched.bes_energy[-1]),
        initial_mode=last,
        initial_load=float(sched.load[-1]) if last is Mode.PRODUCTION else None,
    )


def run_rolling(profile: ScenarioProfile, window_steps: int, params: PlantParams, schemes,
                chained: bool = True, solver: SolverConfig | None = None,
                options: BuildOptions | None = None, workers: int = 1) -> RollingResult:
    """Split ``profile`` into consecutive windows and solve each in turn.

    Chained mode replaces cyclic storage closure by carrying every final
    state (storage, temperatures, mode, load) into the next window.  Reset
    mode solves each window independently from the profile's initial
    state with cyclic closure.  An incomplete final window is dropped.
    If a chained window fails, the next one restarts from the profile's
    initial state.  Schemes are independent and run in the pool.
    """
    if window_steps <= 0:
        raise ConfigError("window_steps", "must be positive")
    n_win = profile.horizon_steps // window_steps
    if n_win == 0:
        raise ConfigError("window_steps", "profile shorter than one window")
    if profile.horizon_steps % window_steps:
        warnings.warn(f"dropping {profile.horizon_steps % window_steps} trailing steps "
                      "that do not fill a window", stacklevel=2)
    schemes = list(schemes)

    def run_scheme(scheme):
        out, windows, state = [], [], {}
        for k in range(n_win):
            win = profile.window(k * window_steps, window_steps, cyclic=not chained, **state)
            win.name = f"{profile.name}:w{k}"
            windows.append(win)
            rec = run_one(win, params, scheme, solver, options, verify=False)
            out.append((k, rec))
            state = _carry_state(rec.schedule) if chained and rec.ok else {}
        return out, windows

    results = _map(run_scheme, schemes, workers)
    rows, totals, starts = [], {}, {}
    for scheme, (out, windows) in zip(schemes, results):
        rows.extend(out)
        starts[scheme.name] = windows
        ok = [r.metrics for _, r in out if r.ok]
        if len(ok) == len(out):
            totals[scheme.name] = total_metrics(ok)
    rows.sort(key=lambda kr: (kr[0], [s.name for s in schemes].index(kr[1].scheme)))
    return RollingResult(rows, totals, starts)


def write_rolling_csv(result: RollingResult, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["window", "scheme", *(c for c, _ in METRIC_COLUMNS), "status"])
        for k, r in result.rows:
            w.writerow([k, r.scheme, *_metric_cells(r.metrics), r.status])
        for name, m in result.totals.items():
            w.writerow(["total", name, *_metric_cells(m), "optimal"])


def synthetic_year(steps: int = 8760, seed: int = 0, lull_hours=((800.0, 830.0), (4000.0, 4036.0),
                                                                  (7000.0, 7030.0)), **spec_kw) -> ScenarioProfile:
    """Year-long synthetic profile with three long lulls, for rolling runs."""
    from .profiles import ProfileSpec, gen_profile

    wind, pv = gen_profile(ProfileSpec(steps=steps, lulls=tuple(lull_hours), **spec_kw), seed)
    return ScenarioProfile(dt=3600.0, wind=wind, pv=pv, name=f"year_seed{seed}")


def nh3_by_window(result: RollingResult, scheme: str) -> np.ndarray:
    return np.array([r.metrics.nh3_total for r in result.records(scheme) if r.ok])
