"""CPLEX-LP text emission and solution-file parsing.

Supported LP subset: one objective (linear, optionally with a quadratic
``[ ... ] / 2`` block), ``Subject To`` rows, ``Bounds`` and ``Binaries``.
Variable names are sanitised to the LP character set; row names are
``c<index>`` and the original tags are kept on the model only.

Solution files are plain text::

    status optimal
    objective 12.5
    x_0 3
    b_1 1
"""

from __future__ import annotations

import math
import re

import numpy as np

from .model import Direction, MilpModel, Sense, Solution, Status

_BAD = re.compile(r"[^A-Za-z0-9_.()]")
_TERMS_PER_LINE = 8


class SolutionParseError(ValueError):
    pass


def lp_names(model: MilpModel) -> list[str]:
    """Deterministic LP-safe name per variable id."""
    out, seen = [], set()
    for v in model.vars:
        s = _BAD.sub("_", v.name.replace("[", "(").replace("]", ")"))
        if not s or not s[0].isalpha() or s[0] in "eE" or s in seen:
            s = f"x{v.id}_{s}"
        seen.add(s)
        out.append(s)
    return out


def _num(x: float) -> str:
    return repr(float(x))


def _terms(items, names) -> list[str]:
    parts = []
    for i, c in items:
        sign = "-" if c < 0 else "+"
        parts.append(f"{sign} {_num(abs(c))} {names[i]}")
    return parts


def _wrap(head: str, parts: list[str]) -> list[str]:
    lines = []
    for k in range(0, len(parts), _TERMS_PER_LINE):
        lines.append(("" if k else head) + " ".join(parts[k:k + _TERMS_PER_LINE]))
    return [(" " + ln if k else ln) for k, ln in enumerate(lines)] or [head]


def emit_lp(model: MilpModel) -> str:
    model.validate()
    names = lp_names(model)
    out = [f"\\ {model.name}", "Maximize" if model.direction is Direction.MAX else "Minimize"]
    obj = _terms(sorted(model.objective.terms.items()), names)
    if model.quadratic:
        q = []
        for (i, j), c in sorted(model.quadratic.items()):
            sign = "-" if c < 0 else "+"
            prod = f"{names[i]} ^ 2" if i == j else f"{names[i]} * {names[j]}"
            q.append(f"{sign} {_num(2 * abs(c))} {prod}")
        obj += ["+ ["] + q + ["] / 2"]
    if not obj:
        # a zero objective still needs a term for strict parsers
        obj = [f"0 {names[0]}"] if names else []
    out += _wrap(" obj: ", obj)
    out.append("Subject To")
    need_zero = False
    for r, con in enumerate(model.constraints):
        items = sorted(con.expr.terms.items())
        op = {Sense.LE: "<=", Sense.GE: ">=", Sense.EQ: "="}[con.sense]
        if not items:
            if con.residual(np.zeros(0)) == 0.0:
                continue
            need_zero = True
            parts = ["0 zero_"]
        else:
            parts = _terms(items, names)
        out += _wrap(f" c{r}: ", parts + [f"{op} {_num(con.rhs)}"])
    out.append("Bounds")
    for v, nm in zip(model.vars, names):
        lo, hi = v.lower, v.upper
        if lo == -math.inf and hi == math.inf:
            out.append(f" {nm} free")
        elif hi == math.inf:
            out.append(f" {nm} >= {_num(lo)}")
        elif lo == -math.inf:
            out.append(f" -inf <= {nm} <= {_num(hi)}")
        elif lo == hi:
            out.append(f" {nm} = {_num(lo)}")
        else:
            out.append(f" {_num(lo)} <= {nm} <= {_num(hi)}")
    if need_zero:
        out.append(" zero_ = 0.0")
    bins = [nm for v, nm in zip(model.vars, names) if v.is_binary]
    if bins:
        out.append("Binaries")
        for k in range(0, len(bins), _TERMS_PER_LINE):
            out.append(" " + " ".join(bins[k:k + _TERMS_PER_LINE]))
    out.append("End")
    return "\n".join(out) + "\n"


def write_solution(path, status: str, objective: float, values: dict) -> None:
    lines = [f"status {status}", f"objective {_num(objective)}"]
    lines += [f"{k} {_num(v)}" for k, v in values.items()]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_solution(text: str, model: MilpModel) -> Solution:
    """Parse solution-file text produced by an adapter for ``emit_lp(model)``.

    The LP file carries no objective constant, so it is added back here.
    """
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 2 or lines[0][0] != "status":
        raise SolutionParseError("missing 'status' header")
    try:
        status = Status(lines[0][1])
    except ValueError as exc:
        raise SolutionParseError(f"unknown status {lines[0][1]!r}") from exc
    names = lp_names(model)
    index = {nm: i for i, nm in enumerate(names)}
    x = np.full(len(model.vars), np.nan)
    reported = math.nan
    for parts in lines[1:]:
        if len(parts) != 2:
            raise SolutionParseError(f"malformed line {' '.join(parts)!r}")
        key, val = parts
        try:
            num = float(val)
        except ValueError as exc:
            raise SolutionParseError(f"bad number {val!r} for {key}") from exc
        if key == "objective":
            reported = num
        elif key in index:
            x[index[key]] = num
        elif key != "zero_":
            raise SolutionParseError(f"unknown variable {key!r}")
    if status in (Status.OPTIMAL, Status.LIMIT):
        if np.isnan(x).any():
            if status is Status.OPTIMAL:
                missing = names[int(np.flatnonzero(np.isnan(x))[0])]
                raise SolutionParseError(f"no value for variable {missing!r}")
            return Solution(x, math.nan, status, [v.name for v in model.vars])
        obj = model.objective_value(x)
        if not math.isnan(reported):
            target = reported + model.objective.constant
            if abs(obj - target) > 1e-6 * (1 + abs(target)):
                raise SolutionParseError(f"objective {target} does not match values ({obj})")
        return Solution(x, obj, status, [v.name for v in model.vars])
    return Solution(x, math.nan, status, [v.name for v in model.vars])

