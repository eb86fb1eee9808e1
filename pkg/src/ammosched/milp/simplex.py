"""Dense two-phase tableau simplex for small LPs.

Only meant to back the tiny enumeration solver (a few hundred columns at
most).  Variables are shifted/split to be non-negative, finite upper bounds
become rows, and a Phase I with artificials finds a starting basis.  The
entering column is picked by Dantzig's rule; after a run of degenerate
pivots the rule falls back to Bland's, which cannot cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Sense, Status


@dataclass
class LPResult:
    status: Status
    x: np.ndarray | None
    objective: float


class _Tableau:
    def __init__(self, T: np.ndarray, basis: np.ndarray, tol: float):
        self.T = T  # last row is the reduced-cost row, last column the rhs
        self.basis = basis
        self.tol = tol

    def pivot(self, r: int, k: int) -> None:
        T = self.T
        T[r] /= T[r, k]
        col = T[:, k].copy()
        col[r] = 0.0
        nz = np.flatnonzero(np.abs(col) > 0)
        if nz.size:
            T[nz] -= np.outer(col[nz], T[r])
        self.basis[r] = k

    def run(self, allowed: np.ndarray, max_iter: int) -> Status:
        """Minimise the objective row over the columns flagged in ``allowed``."""
        T, tol = self.T, self.tol
        degenerate = 0
        for _ in range(max_iter):
            red = T[-1, :-1]
            cand = np.flatnonzero(allowed & (red < -tol))
            if cand.size == 0:
                return Status.OPTIMAL
            k = int(cand[0]) if degenerate > 50 else int(cand[np.argmin(red[cand])])
            col = T[:-1, k]
            rows = np.flatnonzero(col > tol)
            if rows.size == 0:
                return Status.UNBOUNDED
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + tol * max(1.0, abs(best))]
            r = int(ties[np.argmin(self.basis[ties])])
            degenerate = degenerate + 1 if best <= tol else 0
            self.pivot(r, k)
        return Status.LIMIT


def solve_lp(c, A, senses, b, lb, ub, tol: float = 1e-9, max_iter: int = 50_000) -> LPResult:
    """Minimise c·x subject to A x (senses) b and lb <= x <= ub."""
    c = np.asarray(c, float)
    A = np.asarray(A, float).reshape(len(senses), c.size)
    b = np.asarray(b, float)
    lb = np.asarray(lb, float)
    ub = np.asarray(ub, float)
    n = c.size
    if np.any(lb > ub + tol):
        return LPResult(Status.INFEASIBLE, None, math.nan)

    # x = shift + M y with y >= 0
    cols, shift = [], np.zeros(n)
    extra_rows = []  # (column index in y, bound) for y <= bound
    for j in range(n):
        lo, hi = lb[j], ub[j]
        if math.isfinite(lo):
            shift[j] = lo
            cols.append((j, 1.0))
            if math.isfinite(hi):
                extra_rows.append((len(cols) - 1, hi - lo))
        elif math.isfinite(hi):
            shift[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    ny = len(cols)
    M = np.zeros((n, ny))
    for k, (j, s) in enumerate(cols):
        M[j, k] = s

    rows_A = [A @ M] if A.size else [np.zeros((0, ny))]
    rhs = [b - A @ shift] if A.size else [np.zeros(0)]
    sense_list = [Sense(s) for s in senses]
    if extra_rows:
        E = np.zeros((len(extra_rows), ny))
        for r, (k, bound) in enumerate(extra_rows):
            E[r, k] = 1.0
        rows_A.append(E)
        rhs.append(np.array([bd for _, bd in extra_rows]))
        sense_list += [Sense.LE] * len(extra_rows)
    Ay = np.vstack(rows_A)
    by = np.concatenate(rhs)
    cy = M.T @ c
    m = by.size

    # equilibrate rows so pivot tolerances are scale free
    norms = np.abs(Ay).max(axis=1) if ny else np.zeros(m)
    for r in range(m):
        if norms[r] > 0:
            Ay[r] /= norms[r]
            by[r] /= norms[r]
        elif (sense_list[r] is Sense.LE and by[r] < -tol) or (sense_list[r] is Sense.GE and by[r] > tol) \
                or (sense_list[r] is Sense.EQ and abs(by[r]) > tol):
            return LPResult(Status.INFEASIBLE, None, math.nan)

    keep = norms > 0
    Ay, by = Ay[keep], by[keep]
    sense_list = [s for s, k in zip(sense_list, keep) if k]
    m = by.size

    n_slack = sum(s is not Sense.EQ for s in sense_list)
    width = ny + n_slack + m
    T = np.zeros((m + 1, width + 1))
    T[:m, :ny] = Ay
    T[:m, -1] = by
    slack = ny
    for r, s in enumerate(sense_list):
        if s is Sense.LE:
            T[r, slack] = 1.0
            slack += 1
        elif s is Sense.GE:
            T[r, slack] = -1.0
            slack += 1
    neg = T[:m, -1] < 0
    T[:m][neg] *= -1.0
    art0 = ny + n_slack
    T[np.arange(m), art0 + np.arange(m)] = 1.0
    basis = art0 + np.arange(m)

    # Phase I: minimise the artificial sum
    T[-1, :] = -T[:m, :].sum(axis=0)
    T[-1, art0:art0 + m] = 0.0
    tab = _Tableau(T, basis, tol)
    allowed = np.ones(width, bool)
    st = tab.run(allowed, max_iter)
    if st is Status.LIMIT:
        return LPResult(Status.LIMIT, None, math.nan)
    scale = max(1.0, np.abs(by).max(initial=0.0))
    if -T[-1, -1] > 1e-7 * scale:
        return LPResult(Status.INFEASIBLE, None, math.nan)

    # drive remaining artificials out of the basis
    drop = []
    for r in range(m):
        if tab.basis[r] >= art0:
            row = T[r, :art0]
            k = np.flatnonzero(np.abs(row) > 1e-9)
            if k.size:
                tab.pivot(r, int(k[np.argmax(np.abs(row[k]))]))
            else:
                drop.append(r)
    if drop:
        keep_rows = np.setdiff1d(np.arange(m + 1), drop)
        T = T[keep_rows]
        tab = _Tableau(T, tab.basis[np.setdiff1d(np.arange(m), drop)], tol)
    T = tab.T
    m = T.shape[0] - 1

    # Phase II
    T[-1, :] = 0.0
    T[-1, :ny] = cy
    for r in range(m):
        k = tab.basis[r]
        if T[-1, k] != 0.0:
            T[-1] -= T[-1, k] * T[r]
    allowed = np.zeros(width, bool)
    allowed[:art0] = True
    st = tab.run(allowed, max_iter)
    if st is not Status.OPTIMAL:
        return LPResult(st, None, math.nan)

    y = np.zeros(width)
    y[tab.basis] = T[:m, -1]
    y = np.maximum(y[:ny], 0.0)
    x = shift + M @ y
    x = np.clip(x, lb, ub)
    return LPResult(Status.OPTIMAL, x, float(c @ x))
