"""Exact CHSH enumeration for Pauli measurements on local-Clifford Bell pairs.

Everything here is integer arithmetic.  A single-qubit Clifford is stored as
``M / sqrt(2)^e`` with ``M`` a 2x2 matrix of Gaussian integers (pairs of
Python ints) and ``e`` in {0, 1}; global phases are quotiented out.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CliffordElement",
    "NogoReport",
    "SIGNED_PAULIS",
    "SignedPauli",
    "chsh_pauli_max",
    "clifford_group",
    "pauli_pair_correlator",
    "verify_nogo",
]

GInt = tuple[int, int]
GMat = tuple[tuple[GInt, GInt], tuple[GInt, GInt]]


def _gmul(a: GInt, b: GInt) -> GInt:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gadd(a: GInt, b: GInt) -> GInt:
    return (a[0] + b[0], a[1] + b[1])


def _gconj(a: GInt) -> GInt:
    return (a[0], -a[1])


def _matmul(a: GMat, b: GMat) -> GMat:
    return tuple(
        tuple(_gadd(_gmul(a[i][0], b[0][j]), _gmul(a[i][1], b[1][j])) for j in range(2))
        for i in range(2)
    )


def _dagger(a: GMat) -> GMat:
    return tuple(tuple(_gconj(a[j][i]) for j in range(2)) for i in range(2))


def _entries(a: GMat):
    return [a[i][j] for i in range(2) for j in range(2)]


def _map(a: GMat, f) -> GMat:
    return tuple(tuple(f(a[i][j]) for j in range(2)) for i in range(2))


_AXIS_MATRICES: dict[str, GMat] = {
    "X": (((0, 0), (1, 0)), ((1, 0), (0, 0))),
    "Y": (((0, 0), (0, -1)), ((0, 1), (0, 0))),
    "Z": (((1, 0), (0, 0)), ((0, 0), (-1, 0))),
}


@dataclass(frozen=True, order=True)
class SignedPauli:
    axis: str
    sign: int = 1

    def __post_init__(self):
        if self.axis not in _AXIS_MATRICES:
            raise ValueError(f"axis must be X, Y or Z, got {self.axis!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def matrix(self) -> GMat:
        s = self.sign
        return _map(_AXIS_MATRICES[self.axis], lambda z: (s * z[0], s * z[1]))

    def __str__(self) -> str:
        return ("+" if self.sign > 0 else "-") + self.axis


SIGNED_PAULIS: tuple[SignedPauli, ...] = tuple(
    SignedPauli(axis, sign) for axis in "XYZ" for sign in (1, -1)
)


def _pauli_from_matrix(m: GMat) -> SignedPauli:
    for p in SIGNED_PAULIS:
        if p.matrix() == m:
            return p
    raise ValueError(f"matrix {m} is not a signed Pauli")


def pauli_pair_correlator(a: SignedPauli, b: SignedPauli) -> int:
    """<Phi+| A (x) B |Phi+> = tr(A B^T) / 2, evaluated exactly."""
    ma, mb = a.matrix(), b.matrix()
    tr = (0, 0)
    for i in range(2):
        for j in range(2):
            tr = _gadd(tr, _gmul(ma[i][j], mb[i][j]))
    if tr[1] != 0 or tr[0] % 2:
        raise ArithmeticError("correlator is not an integer")
    return tr[0] // 2


def _div_one_plus_i(z: GInt) -> GInt | None:
    # (a + bi)/(1 + i) = ((a + b) + (b - a) i) / 2
    re, im = z[0] + z[1], z[1] - z[0]
    if re % 2 or im % 2:
        return None
    return (re // 2, im // 2)


def _canonical(m: GMat, e: int) -> tuple[GMat, int]:
    """Reduce the sqrt(2) power and fix the global phase."""
    while True:
        ents = _entries(m)
        if e >= 2 and all(z[0] % 2 == 0 and z[1] % 2 == 0 for z in ents):
            m = _map(m, lambda z: (z[0] // 2, z[1] // 2))
            e -= 2
            continue
        if e >= 1:
            divided = [_div_one_plus_i(z) for z in ents]
            if all(d is not None for d in divided):
                # 1 + i = sqrt(2) e^{i pi/4}; the phase is dropped
                m = ((divided[0], divided[1]), (divided[2], divided[3]))
                e -= 1
                continue
        break
    lead = next(z for z in _entries(m) if z != (0, 0))
    for unit in ((1, 0), (0, 1), (-1, 0), (0, -1)):
        u = _gmul(unit, lead)
        if u[0] > 0 and u[1] >= 0:
            m = _map(m, lambda z, unit=unit: _gmul(unit, z))
            break
    return m, e


@dataclass(frozen=True)
class CliffordElement:
    """Single-qubit Clifford ``matrix / sqrt(2)^exponent`` modulo global phase."""

    matrix: GMat
    exponent: int

    @classmethod
    def make(cls, matrix: GMat, exponent: int) -> "CliffordElement":
        m, e = _canonical(matrix, exponent)
        return cls(m, e)

    def __matmul__(self, other: "CliffordElement") -> "CliffordElement":
        return CliffordElement.make(_matmul(self.matrix, other.matrix), self.exponent + other.exponent)

    def conjugate_pauli(self, p: SignedPauli, adjoint_first: bool = False) -> SignedPauli:
        """U P U^dagger, or U^dagger P U with ``adjoint_first``."""
        u, ud = self.matrix, _dagger(self.matrix)
        if adjoint_first:
            u, ud = ud, u
        m = _matmul(_matmul(u, p.matrix()), ud)
        scale = 2**self.exponent
        if any(z[0] % scale or z[1] % scale for z in _entries(m)):
            raise ArithmeticError("conjugation left the Pauli group")
        return _pauli_from_matrix(_map(m, lambda z: (z[0] // scale, z[1] // scale)))

    def is_identity(self) -> bool:
        return self == IDENTITY


IDENTITY = CliffordElement.make((((1, 0), (0, 0)), ((0, 0), (1, 0))), 0)
HADAMARD = CliffordElement.make((((1, 0), (1, 0)), ((1, 0), (-1, 0))), 1)
PHASE = CliffordElement.make((((1, 0), (0, 0)), ((0, 0), (0, 1))), 0)


def clifford_group() -> tuple[CliffordElement, ...]:
    """Closure of {H, S} under multiplication, in breadth-first discovery order."""
    gens = (HADAMARD, PHASE)
    seen = {IDENTITY: None}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                prod = g @ h
                if prod not in seen:
                    seen[prod] = None
                    nxt.append(prod)
        frontier = nxt
    group = tuple(seen)
    # closure and invariance of the signed-Pauli set
    members = set(group)
    for a in group:
        for b in group:
            if a @ b not in members:
                raise ArithmeticError("generated set is not closed")
        for p in SIGNED_PAULIS:
            a.conjugate_pauli(p)
    return group


_CORR = np.array([[pauli_pair_correlator(a, b) for b in SIGNED_PAULIS] for a in SIGNED_PAULIS], dtype=np.int64)


def _perm(u: CliffordElement) -> np.ndarray:
    return np.array([SIGNED_PAULIS.index(u.conjugate_pauli(p, adjoint_first=True)) for p in SIGNED_PAULIS])


def _chsh_table(u_a: CliffordElement, u_b: CliffordElement) -> np.ndarray:
    """|S| for every (A0, A1, B0, B1) choice, shape (6, 6, 6, 6)."""
    # local conjugation moves the Cliffords onto the observables
    c = _CORR[np.ix_(_perm(u_a), _perm(u_b))]
    a0b0 = c[:, None, :, None]
    a0b1 = c[:, None, None, :]
    a1b0 = c[None, :, :, None]
    a1b1 = c[None, :, None, :]
    return np.abs(a0b0 + a0b1 + a1b0 - a1b1)


def chsh_pauli_max(u_a: CliffordElement, u_b: CliffordElement, single_bob_observable: bool = False) -> int:
    """Largest |S_CHSH| over all 6^4 signed-Pauli choices on (U_A x U_B)|Phi+>."""
    s = _chsh_table(u_a, u_b)
    if single_bob_observable:
        idx = np.arange(6)
        s = s[:, :, idx, idx]
    return int(s.max())


@dataclass(frozen=True)
class NogoReport:
    global_max: int
    clifford_pairs: int
    combinations: int
    attaining_max: int


def verify_nogo() -> NogoReport:
    group = clifford_group()
    best = 0
    hits = 0
    for u_a, u_b in itertools.product(group, repeat=2):
        s = _chsh_table(u_a, u_b)
        m = int(s.max())
        if m > best:
            best, hits = m, 0
        if m == best:
            hits += int((s == m).sum())
    pairs = len(group) ** 2
    return NogoReport(best, pairs, pairs * 6**4, hits)
