"""Scheduling model construction, decoding and verification."""

from .decode import DecodeError, ObjectiveBreakdown, breakdown_from_schedule, decode, verify_schedule
from .model import (BuildOptions, ScheduleModel, build_full_model, build_load_constraints,
                    build_mass_and_power, build_objective, build_state_logic, build_thermal_constraints)
from .solve import SolveResult, solve_scenario
from .scenario import (ScenarioError, ScenarioProfile, Schedule, read_schedule_csv, read_scenario,
                       schedule_to_json, write_schedule_csv, write_scenario)

__all__ = [
    "BuildOptions", "DecodeError", "ObjectiveBreakdown", "ScenarioError", "ScenarioProfile", "Schedule",
    "ScheduleModel", "SolveResult", "breakdown_from_schedule", "build_full_model", "build_load_constraints",
    "build_mass_and_power", "build_objective", "build_state_logic", "build_thermal_constraints", "decode",
    "read_schedule_csv", "read_scenario", "schedule_to_json", "solve_scenario", "verify_schedule", "write_schedule_csv",
    "write_scenario",
]
