"""Local polytope: deterministic vertices and the 1-norm distance LP."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .behavior import Behavior
from .simplex import LinearProgram, lp_solve

__all__ = [
    "DistanceResult",
    "MAX_VERTICES",
    "distance_lp",
    "enumerate_deterministic_behaviors",
    "polytope_distance",
    "vertex_behavior",
]

MAX_VERTICES = 10**6
# dense simplex tableau size guard (rows x columns)
MAX_TABLEAU = 5 * 10**7


def _response_table(inputs: int, outputs: int) -> np.ndarray:
    """D[x, o, f] = 1 if response function f answers o on input x."""
    n_f = outputs**inputs
    f = np.arange(n_f)
    d = np.zeros((inputs, outputs, n_f))
    for x in range(inputs):
        d[x, (f // outputs**x) % outputs, f] = 1.0
    return d


def enumerate_deterministic_behaviors(n: int, inputs: int, outputs: int = 2) -> np.ndarray:
    """Vertex matrix: column lambda is the flattened deterministic behavior.

    Rows follow :meth:`Behavior.vector` (setting string major, outcome string
    minor); columns enumerate (f_1, ..., f_N) with f_1 most significant, and
    party j answers ``(f_j // O^x) % O`` to input x.
    """
    n_vertices = (outputs**inputs) ** n
    if n_vertices > MAX_VERTICES:
        raise ValueError(f"{n_vertices} deterministic strategies exceed the guard {MAX_VERTICES}")
    d = _response_table(inputs, outputs)
    t = np.ones(())
    for _ in range(n):
        t = np.multiply.outer(t, d)
    # axes are (x_1, o_1, f_1, x_2, o_2, f_2, ...)
    order = [3 * j for j in range(n)] + [3 * j + 1 for j in range(n)] + [3 * j + 2 for j in range(n)]
    t = t.transpose(order)
    return t.reshape((inputs**n) * (outputs**n), n_vertices)


def vertex_behavior(strategy, inputs: int, outputs: int = 2, tag: str | None = None) -> Behavior:
    """Behavior of the deterministic strategy given as one response index per party."""
    n = len(strategy)
    p = np.zeros((outputs,) * n + (inputs,) * n)
    for x in np.ndindex(*(inputs,) * n):
        o = tuple((int(f) // outputs**xj) % outputs for f, xj in zip(strategy, x))
        p[o + x] = 1.0
    return Behavior(n, inputs, p, tag, outputs)


@dataclass(frozen=True)
class DistanceResult:
    distance: float
    distance_per_setting: float
    weights: np.ndarray | None = field(repr=False)
    status: str
    iterations: int = 0
    solver: str = "simplex"

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def distance_lp(p: np.ndarray, vertices: np.ndarray) -> LinearProgram:
    """min sum(s+ + s-)  s.t.  V q + s+ - s- = p,  sum q = 1,  q, s >= 0."""
    d, n_v = vertices.shape
    c = np.concatenate([np.zeros(n_v), np.ones(2 * d)])
    a_eq = np.zeros((d + 1, n_v + 2 * d))
    a_eq[:d, :n_v] = vertices
    a_eq[:d, n_v : n_v + d] = np.eye(d)
    a_eq[:d, n_v + d :] = -np.eye(d)
    a_eq[d, :n_v] = 1.0
    b_eq = np.concatenate([p, [1.0]])
    return LinearProgram(c, A_eq=a_eq, b_eq=b_eq)


def polytope_distance(b: Behavior, tol: float = 1e-9, solver: str = "simplex") -> DistanceResult:
    """1-norm distance from ``b`` to the convex hull of deterministic behaviors.

    ``distance`` is the raw 1-norm over all (o, x) entries; the per-setting
    value divides it by the number of setting strings I^N.
    """
    vertices = enumerate_deterministic_behaviors(b.n_parties, b.inputs, b.outputs)
    p = b.vector()
    d, n_v = vertices.shape
    if (d + 2) * (n_v + 3 * d + 2) > MAX_TABLEAU:
        raise ValueError("distance LP too large for the dense solver")
    n_settings = b.inputs**b.n_parties
    if solver == "simplex":
        sol = lp_solve(distance_lp(p, vertices), tol=tol)
        if not sol.success:
            return DistanceResult(np.nan, np.nan, None, "numerical" if sol.status != "infeasible" else "infeasible", sol.iterations)
        x, its = sol.x, sol.iterations
    elif solver == "highs":
        from scipy.optimize import linprog

        lp = distance_lp(p, vertices)
        res = linprog(lp.c, A_eq=lp.A_eq, b_eq=lp.b_eq, bounds=(0, None), method="highs")
        if res.status != 0:
            return DistanceResult(np.nan, np.nan, None, "numerical", int(res.nit), solver)
        x, its = res.x, int(res.nit)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    q = x[:n_v]
    # recompute the objective from q so it reflects the actual residual
    dist = float(np.abs(p - vertices @ q).sum())
    if q.min() < -1e-10 or abs(q.sum() - 1.0) > 1e-9:
        return DistanceResult(dist, dist / n_settings, q, "numerical", its, solver)
    return DistanceResult(dist, dist / n_settings, q, "optimal", its, solver)
