"""File-based adapter: read an LP file with HiGHS, write a solution file.

Usage: ``python -m ammosched.milp.highs_adapter model.lp model.sol``
"""

from __future__ import annotations

import argparse
import sys

import highspy

from .lp import write_solution


def _status_word(h, model_status) -> str:
    S = highspy.HighsModelStatus
    if model_status in (S.kOptimal, S.kModelEmpty):
        return "optimal"
    if model_status == S.kInfeasible:
        return "infeasible"
    if model_status == S.kUnbounded:
        return "unbounded"
    if model_status == S.kUnboundedOrInfeasible:
        return ""
    if model_status in (S.kTimeLimit, S.kIterationLimit, S.kSolutionLimit, S.kInterrupt):
        return "limit"
    raise RuntimeError(f"unexpected HiGHS status {h.modelStatusToString(model_status)}")


def solve_file(lp_path: str, sol_path: str, time_limit: float | None = None,
               mip_gap: float = 1e-7, threads: int = 1) -> str:
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", mip_gap)
    h.setOptionValue("mip_abs_gap", 1e-9)
    h.setOptionValue("threads", threads)
    h.setOptionValue("random_seed", 0)
    if time_limit is not None:
        h.setOptionValue("time_limit", float(time_limit))
    if h.readModel(lp_path) != highspy.HighsStatus.kOk:
        raise RuntimeError(f"HiGHS could not read {lp_path}")
    h.run()
    word = _status_word(h, h.getModelStatus())
    if word == "":
        # presolve cannot tell the two apart; solving without it can
        h.setOptionValue("presolve", "off")
        h.run()
        word = _status_word(h, h.getModelStatus()) or "infeasible"
    values = {}
    objective = float("nan")
    if h.getModelStatus() == highspy.HighsModelStatus.kModelEmpty:
        objective = 0.0
    elif word in ("optimal", "limit") and h.getInfo().primal_solution_status >= 1:
        lp = h.getLp()
        x = h.getSolution().col_value
        values = dict(zip(lp.col_names_, x))
        objective = h.getInfo().objective_function_value
    write_solution(sol_path, word, objective, values)
    return word


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("lp")
    ap.add_argument("sol")
    ap.add_argument("--time-limit", type=float, default=None)
    ap.add_argument("--mip-gap", type=float, default=1e-7)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)
    solve_file(args.lp, args.sol, args.time_limit, args.mip_gap, args.threads)
    return 0


if __name__ == "__main__":
    sys.exit(main())
