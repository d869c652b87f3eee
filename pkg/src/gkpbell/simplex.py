"""Dense-tableau two-phase primal simplex.

Small and deterministic.  Entering columns are priced by reduced cost over
column norm (a cheap steepest-edge rule); after a long run of degenerate
pivots the solver falls back to Bland's rule, which cannot cycle.  Finite
upper bounds are turned into explicit constraint rows, and unit columns of
the constraint matrix seed the phase-1 basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["LPSolution", "LinearProgram", "lp_solve"]


@dataclass(frozen=True)
class LinearProgram:
    """minimise c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lo <= x <= hi.

    ``bounds`` is a sequence of (lo, hi) pairs with ``None`` for infinite;
    the default is x >= 0.
    """

    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    bounds: tuple | None = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        n = c.size
        object.__setattr__(self, "c", c)
        for a_name, b_name in (("A_ub", "b_ub"), ("A_eq", "b_eq")):
            a, b = getattr(self, a_name), getattr(self, b_name)
            if (a is None) != (b is None):
                raise ValueError(f"{a_name} and {b_name} must be given together")
            if a is None:
                a, b = np.zeros((0, n)), np.zeros(0)
            a = np.atleast_2d(np.asarray(a, dtype=float))
            b = np.asarray(b, dtype=float).reshape(-1)
            if a.shape != (b.size, n):
                raise ValueError(f"{a_name} has shape {a.shape}, expected {(b.size, n)}")
            object.__setattr__(self, a_name, a)
            object.__setattr__(self, b_name, b)
        bounds = self.bounds
        if bounds is None:
            bounds = ((0.0, None),) * n
        bounds = tuple(
            (
                -math.inf if lo is None else float(lo),
                math.inf if hi is None else float(hi),
            )
            for lo, hi in bounds
        )
        if len(bounds) != n:
            raise ValueError("one (lo, hi) pair per variable is required")
        if any(lo > hi for lo, hi in bounds):
            raise ValueError("lower bound exceeds upper bound")
        object.__setattr__(self, "bounds", bounds)

    @property
    def n_vars(self) -> int:
        return self.c.size


@dataclass(frozen=True)
class LPSolution:
    status: str
    x: np.ndarray | None = field(repr=False)
    fun: float
    iterations: int
    message: str = ""

    @property
    def success(self) -> bool:
        return self.status == "optimal"


def _standard_form(lp: LinearProgram):
    """Map to min c'y, A y = b, y >= 0 with x = x0 + T y."""
    n = lp.n_vars
    cols = []  # (variable index, coefficient)
    x0 = np.zeros(n)
    upper_rows = []
    for i, (lo, hi) in enumerate(lp.bounds):
        if math.isfinite(lo):
            x0[i] = lo
            cols.append((i, 1.0))
            if math.isfinite(hi):
                upper_rows.append((len(cols) - 1, hi - lo))
        elif math.isfinite(hi):
            x0[i] = hi
            cols.append((i, -1.0))
        else:
            cols.append((i, 1.0))
            cols.append((i, -1.0))
    T = np.zeros((n, len(cols)))
    for j, (i, s) in enumerate(cols):
        T[i, j] = s
    ny = len(cols)
    a_ub = lp.A_ub @ T
    b_ub = lp.b_ub - lp.A_ub @ x0
    if upper_rows:
        extra = np.zeros((len(upper_rows), ny))
        for r, (j, ub) in enumerate(upper_rows):
            extra[r, j] = 1.0
        a_ub = np.vstack([a_ub, extra])
        b_ub = np.concatenate([b_ub, [ub for _, ub in upper_rows]])
    m_ub = a_ub.shape[0]
    a_eq = lp.A_eq @ T
    b_eq = lp.b_eq - lp.A_eq @ x0
    A = np.vstack([
        np.hstack([a_ub, np.eye(m_ub)]),
        np.hstack([a_eq, np.zeros((a_eq.shape[0], m_ub))]),
    ])
    b = np.concatenate([b_ub, b_eq])
    c = np.concatenate([T.T @ lp.c, np.zeros(m_ub)])
    offset = float(lp.c @ x0)
    return A, b, c, T, x0, offset, ny


class _Tableau:
    def __init__(self, A, b, tol):
        m, n = A.shape
        neg = b < 0
        A = A.copy()
        b = b.copy()
        A[neg] *= -1.0
        b[neg] *= -1.0
        # crash basis: reuse unit columns, add artificials only for uncovered rows
        basis = [-1] * m
        is_unit = (np.count_nonzero(A, axis=0) == 1) & (A.max(axis=0) == 1.0)
        for j in np.flatnonzero(is_unit):
            i = int(np.argmax(A[:, j]))
            if basis[i] < 0:
                basis[i] = int(j)
        uncovered = [i for i in range(m) if basis[i] < 0]
        n_art = len(uncovered)
        self.m, self.n = m, n
        # columns: structural n, artificial n_art, rhs
        self.T = np.zeros((m + 1, n + n_art + 1))
        self.T[:m, :n] = A
        for a, i in enumerate(uncovered):
            self.T[i, n + a] = 1.0
            basis[i] = n + a
        self.T[:m, -1] = b
        self.basis = basis
        self.uncovered = uncovered
        self.n_art = n_art
        self.tol = tol
        self.iterations = 0

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.basis[r] = j

    def run(self, allowed: int, max_iter: int, stall_limit: int = 200) -> str:
        """Iterate on the current objective row over the first ``allowed`` columns."""
        T, tol = self.T, self.tol
        stall = 0
        bland = False
        last_obj = T[-1, -1]
        while True:
            if self.iterations >= max_iter:
                return "iteration_limit"
            rc = T[-1, :allowed]
            if bland:
                cand = np.flatnonzero(rc < -tol)
                if cand.size == 0:
                    return "optimal"
                j = int(cand[0])
            else:
                neg = np.flatnonzero(rc < -tol)
                if neg.size == 0:
                    return "optimal"
                # steepest-edge style pricing: scale by the column norm
                norms = np.sqrt(1.0 + np.einsum("ij,ij->j", T[:-1, neg], T[:-1, neg]))
                j = int(neg[np.argmin(rc[neg] / norms)])
            colj = T[:-1, j]
            pos = colj > tol
            if not pos.any():
                return "unbounded"
            ratios = np.full(self.m, np.inf)
            ratios[pos] = T[:-1, -1][pos] / colj[pos]
            best = ratios.min()
            ties = np.flatnonzero(ratios <= best + tol * max(1.0, abs(best)))
            # among ties leave on the smallest basic index (Bland)
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, j)
            self.iterations += 1
            obj = T[-1, -1]
            if obj > last_obj + tol:
                stall, last_obj = 0, obj
                bland = False
            else:
                stall += 1
                if stall >= stall_limit:
                    bland = True


def lp_solve(lp: LinearProgram, tol: float = 1e-9, max_iter: int = 50000) -> LPSolution:
    """Solve ``lp``; status is optimal, infeasible, unbounded or iteration_limit."""
    A, b, c, Tmap, x0, offset, _ = _standard_form(lp)
    m, n = A.shape
    if m == 0:
        if np.any(c < -tol):
            return LPSolution("unbounded", None, -math.inf, 0, "no constraints and a descent direction")
        return LPSolution("optimal", x0.copy(), offset, 0)
    tab = _Tableau(A, b, tol)
    T = tab.T
    # phase 1: minimise the sum of artificials (already in reduced form)
    T[-1, :] = 0.0
    for i in tab.uncovered:
        T[-1, :n] -= T[i, :n]
        T[-1, -1] -= T[i, -1]
    status = tab.run(n + tab.n_art, max_iter)
    if status == "iteration_limit":
        return LPSolution(status, None, math.nan, tab.iterations, "phase 1 did not converge")
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if -T[-1, -1] > tol * scale * 10:
        return LPSolution("infeasible", None, math.nan, tab.iterations, f"phase-1 residual {-T[-1, -1]:.3e}")
    # remove artificials still basic (at zero level)
    keep = []
    for i in range(m):
        if tab.basis[i] >= n:
            row = T[i, :n]
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > tol:
                tab.pivot(i, j)
                keep.append(i)
            # otherwise the row is redundant
        else:
            keep.append(i)
    rows = keep + [m]
    tab.T = np.ascontiguousarray(np.hstack([T[rows][:, :n], T[rows][:, -1:]]))
    tab.basis = [tab.basis[i] for i in keep]
    tab.m = len(keep)
    T = tab.T
    # phase 2 objective row in reduced-cost form
    T[-1, :] = 0.0
    T[-1, :n] = c
    for i, j in enumerate(tab.basis):
        if c[j] != 0.0:
            T[-1] -= c[j] * T[i]
    status = tab.run(n, max_iter)
    if status != "optimal":
        return LPSolution(status, None, -math.inf if status == "unbounded" else math.nan, tab.iterations)
    y = np.zeros(n)
    for i, j in enumerate(tab.basis):
        y[j] = T[i, -1]
    ny = Tmap.shape[1]
    x = x0 + Tmap @ y[:ny]
    return LPSolution("optimal", x, float(lp.c @ x), tab.iterations)
