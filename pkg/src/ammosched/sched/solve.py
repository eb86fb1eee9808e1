"""One-call build, solve and decode for a scenario."""

from __future__ import annotations

from dataclasses import dataclass

from ..milp import Solution, SolverConfig, Status
from ..params import PlantParams
from .decode import ObjectiveBreakdown, decode
from .model import BuildOptions, ScheduleModel, build_full_model
from .scenario import ScenarioProfile, Schedule


@dataclass
class SolveResult:
    ctx: ScheduleModel
    solution: Solution
    schedule: Schedule | None = None
    breakdown: ObjectiveBreakdown | None = None

    @property
    def status(self) -> Status:
        return self.solution.status

    @property
    def ok(self) -> bool:
        return self.schedule is not None


def solve_scenario(scenario: ScenarioProfile, params: PlantParams, scheme=None,
                   options: BuildOptions | None = None, solver: SolverConfig | None = None) -> SolveResult:
    """Build the model, solve it and decode the schedule when optimal."""
    ctx = build_full_model(scenario, params, scheme, options)
    sol = (solver or SolverConfig()).solve(ctx.model)
    res = SolveResult(ctx, sol)
    if sol.status is Status.OPTIMAL:
        res.schedule, res.breakdown = decode(ctx, sol)
    return res
