"""Mixed-integer linear model representation and solver adapters."""

from .lp import SolutionParseError, emit_lp, parse_solution
from .model import (Constraint, Direction, LinExpr, MilpModel, ModelError, Sense, Solution, Status,
                    VarKind, VarRef, Violation, check_feasible)
from .solvers import (SolverConfig, SolverProcessError, SolverTimeoutError, TinySolverRefused, default_solver_command,
                      solve_external, solve_tiny)

__all__ = [
    "Constraint", "Direction", "LinExpr", "MilpModel", "ModelError", "Sense", "Solution", "Status",
    "VarKind", "VarRef", "Violation", "check_feasible", "emit_lp", "parse_solution",
    "SolutionParseError", "SolverConfig", "SolverProcessError", "SolverTimeoutError", "TinySolverRefused",
    "default_solver_command", "solve_external", "solve_tiny",
]
