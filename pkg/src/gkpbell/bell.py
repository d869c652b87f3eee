"""MABK, Cabello and CHSH functionals with their local-hidden-variable bounds."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Real

import numpy as np

from .behavior import Behavior, correlator_table

__all__ = [
    "BellResult",
    "MabkCoefficients",
    "VIOLATION_GUARD",
    "cabello_value",
    "chsh_value",
    "mabk_coefficients",
    "mabk_value",
]

VIOLATION_GUARD = 1e-10


@dataclass(frozen=True)
class BellResult:
    value: Real
    local_bound: Real
    functional: str
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def violated(self) -> bool:
        return self.value > self.local_bound + VIOLATION_GUARD

    @property
    def gap(self) -> float:
        return float(self.value - self.local_bound)


@dataclass(frozen=True)
class MabkCoefficients:
    """Exact coefficient maps x -> alpha_x for B_N and B'_N."""

    n_parties: int
    alpha: dict
    alpha_prime: dict

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        shape = (2,) * self.n_parties
        a = np.zeros(shape)
        ap = np.zeros(shape)
        for x, c in self.alpha.items():
            a[x] = float(c)
        for x, c in self.alpha_prime.items():
            ap[x] = float(c)
        return a, ap


@lru_cache(maxsize=None)
def mabk_coefficients(n: int) -> MabkCoefficients:
    """Run the recursion on formal correlator symbols.

    B_1 = A_1 and B'_1 = A'_1; then
    B_n  = B_{n-1} (A_n + A'_n)/2 + B'_{n-1} (A_n - A'_n)/2,
    B'_n = B'_{n-1} (A_n + A'_n)/2 - B_{n-1} (A_n - A'_n)/2.
    Input x_j = 0 stands for A_j and x_j = 1 for A'_j.
    """
    n = int(n)
    if n < 2:
        raise ValueError("MABK needs N >= 2")
    half = Fraction(1, 2)
    b = {(0,): Fraction(1)}
    bp = {(1,): Fraction(1)}
    for _ in range(2, n + 1):
        nb: dict = {}
        nbp: dict = {}
        for x, c in b.items():
            for a, s in ((0, 1), (1, -1)):
                nb[x + (a,)] = nb.get(x + (a,), 0) + half * c
                nbp[x + (a,)] = nbp.get(x + (a,), 0) - half * c * s
        for x, c in bp.items():
            for a, s in ((0, 1), (1, -1)):
                nb[x + (a,)] = nb.get(x + (a,), 0) + half * c * s
                nbp[x + (a,)] = nbp.get(x + (a,), 0) + half * c
        b = {x: c for x, c in nb.items() if c != 0}
        bp = {x: c for x, c in nbp.items() if c != 0}
    return MabkCoefficients(n, b, bp)


def _exact_table(b: Behavior) -> np.ndarray:
    # binary floats convert to Fractions without rounding
    return np.vectorize(Fraction, otypes=[object])(b.p)


def _correlators(b: Behavior, exact: bool) -> np.ndarray:
    if not exact:
        return correlator_table(b)
    t = _exact_table(b)
    for _ in range(b.n_parties):
        t = t[0] - t[1]
    return t


def mabk_value(b: Behavior, exact: bool = False) -> BellResult:
    """S = 2^floor(N/2) * max(|<B_N>|, |<B'_N>|) with bound 2^floor(N/2).

    With ``exact=True`` the evaluation runs in rational arithmetic on the
    binary values of p (useful for deterministic vertices).
    """
    if b.inputs != 2:
        raise ValueError(f"MABK needs two inputs per party, got {b.inputs}")
    n = b.n_parties
    coeffs = mabk_coefficients(n)
    e = _correlators(b, exact)
    if exact:
        vb = sum((c * e[x] for x, c in coeffs.alpha.items()), Fraction(0))
        vbp = sum((c * e[x] for x, c in coeffs.alpha_prime.items()), Fraction(0))
    else:
        a, ap = coeffs.as_arrays()
        vb, vbp = float((a * e).sum()), float((ap * e).sum())
    prefactor = 2 ** (n // 2)
    branch = "B" if abs(vb) >= abs(vbp) else "B'"
    value = prefactor * max(abs(vb), abs(vbp))
    return BellResult(value, prefactor, "MABK", {"branch": branch, "B": vb, "B'": vbp})


def cabello_value(b: Behavior, exact: bool = False, require_tag: bool = True) -> BellResult:
    """Probability functional with LHV bound 0; inputs must follow x=0 -> Z, x=1 -> X."""
    if b.inputs != 2:
        raise ValueError("Cabello functional needs two inputs per party")
    if require_tag and b.tag != "ZX":
        raise ValueError(f"Cabello functional requires the 'ZX' input convention, behavior is tagged {b.tag!r}")
    n = b.n_parties
    if n < 2:
        raise ValueError("Cabello functional needs N >= 2")
    p = _exact_table(b) if exact else b.p
    zero = (0,) * n
    ones = (1,) * n

    def e(j):
        return tuple(1 if i == j else 0 for i in range(n))

    terms = [p[zero + zero]] + [p[e(j) + zero] for j in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        x = tuple(1 if k in (i, j) else 0 for k in range(n))
        terms += [-p[e(i) + x], -p[e(j) + x]]
    terms += [-p[zero + ones], -p[ones + ones]]
    value = sum(terms, Fraction(0)) if exact else float(np.sum(terms))
    return BellResult(value, 0, "Cabello", {"settings_used": 2 + n * (n - 1) // 2})


def chsh_value(b: Behavior, exact: bool = False) -> BellResult:
    """|E00 + E01 + E10 - E11| with bound 2."""
    if b.n_parties != 2 or b.inputs != 2:
        raise ValueError("CHSH needs a two-party, two-input behavior")
    e = _correlators(b, exact)
    s = e[0, 0] + e[0, 1] + e[1, 0] - e[1, 1]
    return BellResult(abs(s) if exact else float(abs(s)), 2, "CHSH")
