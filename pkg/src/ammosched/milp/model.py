"""Solver-agnostic mixed-integer linear model representation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

INF = math.inf


class ModelError(ValueError):
    pass


class VarKind(str, Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"


class Sense(str, Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class Direction(str, Enum):
    MIN = "min"
    MAX = "max"


class Status(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    LIMIT = "limit"


class _Arith:
    """Arithmetic shared by variables and expressions."""

    def _expr(self) -> "LinExpr":
        raise NotImplementedError

    def __add__(self, other):
        return self._expr()._combine(other, 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        return self._expr()._combine(other, -1.0)

    def __rsub__(self, other):
        return (-1.0 * self._expr())._combine(other, 1.0)

    def __mul__(self, k):
        if not isinstance(k, (int, float, np.floating, np.integer)):
            raise ModelError("only scalar multiplication keeps an expression linear")
        k = float(k)
        e = self._expr()
        return LinExpr({i: c * k for i, c in e.terms.items()}, e.constant * k, e._refs)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __truediv__(self, k):
        return self * (1.0 / float(k))


@dataclass(eq=False)
class VarRef(_Arith):
    id: int
    name: str
    kind: VarKind
    lower: float
    upper: float

    def __hash__(self):
        return hash(self.id)

    def __repr__(self):
        return f"VarRef({self.id}, {self.name!r})"

    def _expr(self) -> "LinExpr":
        return LinExpr({self.id: 1.0}, 0.0, {self.id: self})

    @property
    def is_binary(self) -> bool:
        return self.kind is VarKind.BINARY


class LinExpr(_Arith):
    """Sum of coefficient * variable terms plus a constant.

    Terms are keyed by variable id so a variable appears at most once.
    """

    __slots__ = ("terms", "constant", "_refs")

    def __init__(self, terms=None, constant: float = 0.0, refs=None):
        self.terms: dict[int, float] = dict(terms or {})
        self.constant = float(constant)
        self._refs: dict[int, VarRef] = dict(refs or {})

    @classmethod
    def sum(cls, items) -> "LinExpr":
        out = cls()
        for it in items:
            out.iadd(it)
        return out

    def _expr(self):
        return self

    def iadd(self, other, k: float = 1.0) -> "LinExpr":
        """In-place ``self += k * other``."""
        if isinstance(other, VarRef):
            self.terms[other.id] = self.terms.get(other.id, 0.0) + k
            self._refs[other.id] = other
        elif isinstance(other, LinExpr):
            for i, c in other.terms.items():
                self.terms[i] = self.terms.get(i, 0.0) + k * c
            self._refs.update(other._refs)
            self.constant += k * other.constant
        elif isinstance(other, (int, float, np.floating, np.integer)):
            self.constant += k * float(other)
        else:
            raise ModelError(f"cannot add {type(other).__name__} to an expression")
        return self

    def _combine(self, other, k):
        out = LinExpr(self.terms, self.constant, self._refs)
        return out.iadd(other, k)

    @property
    def vars(self) -> list[VarRef]:
        return [self._refs[i] for i in self.terms]

    def items(self):
        """(VarRef, coefficient) pairs."""
        return [(self._refs[i], c) for i, c in self.terms.items()]

    def value(self, x) -> float:
        return self.constant + sum(c * float(x[i]) for i, c in self.terms.items())

    def __repr__(self):
        body = " + ".join(f"{c:g}*{self._refs[i].name}" for i, c in self.terms.items())
        return f"LinExpr({body or '0'} + {self.constant:g})"


def as_expr(obj) -> LinExpr:
    if isinstance(obj, LinExpr):
        return obj
    if isinstance(obj, VarRef):
        return obj._expr()
    if isinstance(obj, (int, float, np.floating, np.integer)):
        return LinExpr(constant=float(obj))
    raise ModelError(f"not a linear expression: {obj!r}")


@dataclass
class Constraint:
    expr: LinExpr  # constant folded into rhs, so expr.constant == 0
    sense: Sense
    rhs: float
    tag: str

    def residual(self, x) -> float:
        """Amount by which the constraint is violated (0 when satisfied)."""
        lhs = self.expr.value(x)
        if self.sense is Sense.LE:
            return max(0.0, lhs - self.rhs)
        if self.sense is Sense.GE:
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass
class Solution:
    x: np.ndarray
    objective_value: float
    status: Status
    names: list = field(default_factory=list)
    wall_time: float = 0.0  # seconds spent in the solver call

    @property
    def values(self) -> dict[str, float]:
        return dict(zip(self.names, map(float, self.x)))

    def __getitem__(self, var):
        if isinstance(var, VarRef):
            return float(self.x[var.id])
        return float(self.x[var])

    def value(self, expr) -> float:
        return as_expr(expr).value(self.x)


class MilpModel:
    def __init__(self, name: str = "model"):
        self.name = name
        self.vars: list[VarRef] = []
        self.constraints: list[Constraint] = []
        self.objective = LinExpr()
        self.direction = Direction.MAX
        # optional quadratic objective terms {(i, j): coef}; only emitted to LP
        self.quadratic: dict[tuple[int, int], float] = {}
        self._names: dict[str, VarRef] = {}

    # -- variables ---------------------------------------------------------
    def add_var(self, name: str, lower: float = 0.0, upper: float = INF,
                kind: VarKind = VarKind.CONTINUOUS) -> VarRef:
        if name in self._names:
            raise ModelError(f"duplicate variable name {name!r}")
        kind = VarKind(kind)
        if kind is VarKind.BINARY:
            lower, upper = max(0.0, lower), min(1.0, upper)
        if math.isnan(lower) or math.isnan(upper) or lower > upper:
            raise ModelError(f"invalid bounds [{lower}, {upper}] for {name}")
        v = VarRef(len(self.vars), name, kind, float(lower), float(upper))
        self.vars.append(v)
        self._names[name] = v
        return v

    def add_binary(self, name: str) -> VarRef:
        return self.add_var(name, 0.0, 1.0, VarKind.BINARY)

    def var(self, name: str) -> VarRef:
        return self._names[name]

    def fix(self, var: VarRef, value: float) -> None:
        self.set_bounds(var, value, value)

    def set_bounds(self, var: VarRef, lower: float, upper: float) -> None:
        if lower > upper:
            raise ModelError(f"invalid bounds [{lower}, {upper}] for {var.name}")
        var.lower, var.upper = float(lower), float(upper)

    @property
    def num_binaries(self) -> int:
        return sum(v.is_binary for v in self.vars)

    @property
    def free_binaries(self) -> list[VarRef]:
        return [v for v in self.vars if v.is_binary and v.lower < v.upper]

    # -- constraints -------------------------------------------------------
    def add(self, lhs, sense, rhs, tag: str) -> Constraint:
        """Add ``lhs sense rhs``; both sides may be expressions or numbers."""
        if not tag:
            raise ModelError("constraint tag must be non-empty")
        e = as_expr(lhs)._combine(as_expr(rhs), -1.0)
        bad = [i for i, c in e.terms.items() if not math.isfinite(c)]
        if bad or not math.isfinite(e.constant):
            raise ModelError(f"non-finite coefficient in {tag}")
        for i, ref in e._refs.items():
            if i >= len(self.vars) or self.vars[i] is not ref:
                raise ModelError(f"variable {ref.name} is not registered in this model")
        terms = {i: c for i, c in e.terms.items() if c != 0.0}
        con = Constraint(LinExpr(terms, 0.0, {i: e._refs[i] for i in terms}), Sense(sense),
                         -e.constant, tag)
        self.constraints.append(con)
        return con

    def set_objective(self, expr, direction=Direction.MAX) -> None:
        e = as_expr(expr)
        for i, ref in e._refs.items():
            if i >= len(self.vars) or self.vars[i] is not ref:
                raise ModelError(f"objective variable {ref.name} is not registered")
        self.objective = LinExpr({i: c for i, c in e.terms.items() if c != 0.0}, e.constant, e._refs)
        self.direction = Direction(direction)

    def objective_value(self, x) -> float:
        val = self.objective.value(x)
        for (i, j), c in self.quadratic.items():
            val += c * float(x[i]) * float(x[j])
        return val

    def validate(self) -> None:
        for v in self.vars:
            if v.lower > v.upper:
                raise ModelError(f"invalid bounds for {v.name}")
        for con in self.constraints:
            if not math.isfinite(con.rhs):
                raise ModelError(f"non-finite rhs in {con.tag}")

    # -- dense export for the bundled solver --------------------------------
    def to_dense(self):
        """Return (c, A, senses, b, lb, ub, is_binary) with c in the model direction."""
        n, m = len(self.vars), len(self.constraints)
        c = np.zeros(n)
        for i, k in self.objective.terms.items():
            c[i] = k
        A = np.zeros((m, n))
        b = np.empty(m)
        senses = []
        for r, con in enumerate(self.constraints):
            for i, k in con.expr.terms.items():
                A[r, i] = k
            b[r] = con.rhs
            senses.append(con.sense)
        lb = np.array([v.lower for v in self.vars])
        ub = np.array([v.upper for v in self.vars])
        isbin = np.array([v.is_binary for v in self.vars], dtype=bool)
        return c, A, senses, b, lb, ub, isbin

    def copy(self) -> "MilpModel":
        """Deep copy with fresh VarRefs (so bounds can be changed independently)."""
        new = MilpModel(self.name)
        for v in self.vars:
            new.add_var(v.name, v.lower, v.upper, v.kind)
        remap = lambda e: LinExpr(e.terms, e.constant, {i: new.vars[i] for i in e.terms})  # noqa: E731
        new.constraints = [Constraint(remap(c.expr), c.sense, c.rhs, c.tag) for c in self.constraints]
        new.objective = remap(self.objective)
        new.direction = self.direction
        new.quadratic = dict(self.quadratic)
        return new


@dataclass
class Violation:
    tag: str
    residual: float


def check_feasible(model: MilpModel, solution, tol: float = 1e-6) -> list[Violation]:
    """Every constraint, bound or integrality mark violated by more than ``tol``."""
    x = solution.x if isinstance(solution, Solution) else solution
    x = np.asarray(x, dtype=float)
    if x.shape != (len(model.vars),) or not np.all(np.isfinite(x)):
        raise ModelError("solution does not provide a finite value for every variable")
    out = []
    for con in model.constraints:
        r = con.residual(x)
        if r > tol:
            out.append(Violation(con.tag, r))
    for v in model.vars:
        val = x[v.id]
        r = max(v.lower - val, val - v.upper, 0.0)
        if r > tol:
            out.append(Violation(f"bound[{v.name}]", r))
        if v.is_binary:
            r = min(abs(val), abs(val - 1.0))
            if r > tol:
                out.append(Violation(f"integrality[{v.name}]", r))
    return out
