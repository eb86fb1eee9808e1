"""Solver entry points: the bundled tiny solver and the external adapter."""

from __future__ import annotations

import math
import os
import shlex
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .lp import SolutionParseError, emit_lp, parse_solution
from .model import Direction, MilpModel, ModelError, Solution, Status
from .simplex import solve_lp

SOLVER_ENV = "AMMOSCHED_SOLVER"
DEFAULT_SOLVER = f"{shlex.quote(sys.executable)} -m ammosched.milp.highs_adapter {{lp}} {{sol}} --time-limit {{time}} --mip-gap {{gap}}"

INTEGRALITY_TOL = 1e-6
LP_TOL = 1e-9


class TinySolverRefused(ModelError):
    pass


class SolverProcessError(RuntimeError):
    pass


class SolverTimeoutError(RuntimeError):
    pass


__all__ = ["SolverConfig", "solve_tiny", "solve_external", "default_solver_command", "SolverProcessError",
           "SolverTimeoutError", "SolutionParseError", "TinySolverRefused"]


def solve_tiny(model: MilpModel, binary_limit: int = 20, tol: float = LP_TOL) -> Solution:
    """Exact solve by implicit enumeration of the free binaries.

    Each node solves the LP relaxation with the bundled dense simplex; a
    node is pruned only when its relaxation is infeasible or cannot beat
    the incumbent, so the result equals full enumeration.  Binaries whose
    bounds already fix them do not count towards ``binary_limit``.
    """
    if model.quadratic:
        raise ModelError("the bundled solver handles linear objectives only")
    free = model.free_binaries
    if len(free) > binary_limit:
        raise TinySolverRefused(f"{len(free)} free binaries exceed the limit of {binary_limit}")
    c, A, senses, b, lb, ub, isbin = model.to_dense()
    sign = -1.0 if model.direction is Direction.MAX else 1.0
    cmin = sign * c
    names = [v.name for v in model.vars]
    const = model.objective.constant

    def lp(lo, hi):
        fixed = lo == hi
        if fixed.all():
            x = lo.copy()
            ok = all(r <= 1e-7 * (1 + abs(bb)) for r, bb in
                     zip(_residuals(A, senses, b, x), b))
            return (Status.OPTIMAL, x, float(cmin @ x)) if ok else (Status.INFEASIBLE, None, math.inf)
        free_idx = np.flatnonzero(~fixed)
        b_eff = b - A[:, fixed] @ lo[fixed]
        res = solve_lp(cmin[free_idx], A[:, free_idx], senses, b_eff, lo[free_idx], hi[free_idx], tol=tol)
        if res.status is not Status.OPTIMAL:
            return res.status, None, math.inf
        x = lo.copy()
        x[free_idx] = res.x
        return Status.OPTIMAL, x, float(cmin @ x)

    best_x, best_val = None, math.inf
    stack = [(lb.copy(), ub.copy())]
    bin_idx = np.flatnonzero(isbin)
    while stack:
        lo, hi = stack.pop()
        st, x, val = lp(lo, hi)
        if st is Status.UNBOUNDED:
            return Solution(np.full(len(names), np.nan), math.nan, Status.UNBOUNDED, names)
        if st is Status.LIMIT:
            return Solution(np.full(len(names), np.nan), math.nan, Status.LIMIT, names)
        if st is not Status.OPTIMAL:
            continue
        if best_x is not None and val >= best_val - 1e-9 * (1 + abs(best_val)):
            continue
        frac = np.abs(x[bin_idx] - np.round(x[bin_idx]))
        if bin_idx.size == 0 or frac.max() <= INTEGRALITY_TOL:
            if bin_idx.size and (lo[bin_idx] != hi[bin_idx]).any():
                # re-solve with binaries pinned so the continuous part is exact
                lo2, hi2 = lo.copy(), hi.copy()
                lo2[bin_idx] = hi2[bin_idx] = np.round(x[bin_idx])
                st, x2, val2 = lp(lo2, hi2)
                if st is Status.OPTIMAL:
                    x, val = x2, val2
                else:
                    continue
            if val < best_val:
                best_x, best_val = x, val
            continue
        j = int(bin_idx[np.argmax(frac)])
        down, up = (lo.copy(), hi.copy()), (lo.copy(), hi.copy())
        down[1][j] = 0.0
        up[0][j] = 1.0
        # explore the side closer to the relaxation first
        stack.extend([down, up] if x[j] >= 0.5 else [up, down])
    if best_x is None:
        return Solution(np.full(len(names), np.nan), math.nan, Status.INFEASIBLE, names)
    return Solution(best_x, sign * best_val + const, Status.OPTIMAL, names)


def _residuals(A, senses, b, x):
    lhs = A @ x if A.size else np.zeros(len(b))
    out = []
    for v, s, bb in zip(lhs, senses, b):
        s = getattr(s, "value", s)
        out.append(max(0.0, v - bb) if s == "<=" else max(0.0, bb - v) if s == ">=" else abs(v - bb))
    return out


def default_solver_command() -> str:
    return os.environ.get(SOLVER_ENV) or DEFAULT_SOLVER


def solve_external(model: MilpModel, adapter_command: str | None = None,
                   time_limit: float = 600.0, workdir=None, keep_files: bool = False,
                   mip_gap: float = 1e-7) -> Solution:
    """Write the model as LP, run the adapter command and parse its solution.

    ``adapter_command`` is a template with ``{lp}``, ``{sol}`` and optionally
    ``{time}`` (seconds) and ``{gap}`` (relative MIP gap) placeholders; it defaults to $AMMOSCHED_SOLVER or the bundled
    HiGHS adapter.
    """
    command = adapter_command or default_solver_command()
    tmp = tempfile.mkdtemp(prefix="ammosched_", dir=workdir)
    lp_path = Path(tmp) / "model.lp"
    sol_path = Path(tmp) / "model.sol"
    lp_path.write_text(emit_lp(model))
    argv = shlex.split(command.format(lp=shlex.quote(str(lp_path)), sol=shlex.quote(str(sol_path)),
                                      time=repr(float(time_limit)), gap=repr(float(mip_gap))))
    t0 = time.perf_counter()
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=time_limit + 30.0)
    except subprocess.TimeoutExpired as exc:
        raise SolverTimeoutError(f"solver exceeded {time_limit:g} s") from exc
    except OSError as exc:
        raise SolverProcessError(f"cannot start solver: {exc}") from exc
    if proc.returncode != 0:
        tail = (proc.stderr or proc.stdout).strip().splitlines()[-3:]
        raise SolverProcessError(f"solver exited with code {proc.returncode}: {' | '.join(tail)}")
    if not sol_path.exists():
        raise SolverProcessError("solver produced no solution file")
    sol = parse_solution(sol_path.read_text(), model)
    sol.wall_time = time.perf_counter() - t0
    if not keep_files:
        for p in (lp_path, sol_path):
            p.unlink(missing_ok=True)
        os.rmdir(tmp)
    return sol


@dataclass(frozen=True)
class SolverConfig:
    """Which solver to call and with what limits.

    ``tiny`` forces the bundled enumeration solver; otherwise ``command`` (or
    the environment override, or the HiGHS adapter) is run as a subprocess.
    """

    command: str | None = None
    tiny: bool = False
    time_limit: float = 600.0
    mip_gap: float = 1e-7
    binary_limit: int = 20

    def solve(self, model: MilpModel) -> Solution:
        if self.tiny:
            t0 = time.perf_counter()
            sol = solve_tiny(model, self.binary_limit)
            sol.wall_time = time.perf_counter() - t0
            return sol
        return solve_external(model, self.command, self.time_limit, mip_gap=self.mip_gap)

    def describe(self) -> str:
        return "bundled" if self.tiny else (self.command or default_solver_command())
