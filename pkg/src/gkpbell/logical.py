"""Pauli-string coefficient tables of logical N-qubit states.

A state is stored as the dense real tensor ``c[k1, ..., kN] = tr(rho P_k1 x ... x P_kN)``
with ``k = 0, 1, 2, 3`` for ``I, X, Y, Z``.  The all-identity entry is 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

__all__ = [
    "LogicalState",
    "MAX_DENSE_PARTIES",
    "MAX_PSD_CHECK_PARTIES",
    "PAULI_MATRICES",
    "from_density_matrix",
    "ghz_coefficients",
    "pauli_string_matrix",
    "w_coefficients",
]

MAX_DENSE_PARTIES = 12
MAX_PSD_CHECK_PARTIES = 10
SPARSE_TOL = 1e-14

PAULI_MATRICES = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def pauli_string_matrix(k: tuple[int, ...] | str) -> np.ndarray:
    """Dense Kronecker product of single-qubit Paulis (first index = first party)."""
    if isinstance(k, str):
        k = tuple(int(ch) for ch in k)
    out = np.ones((1, 1), dtype=complex)
    for kj in k:
        out = np.kron(out, PAULI_MATRICES[kj])
    return out


def _coeffs_to_rho(coeffs: np.ndarray) -> np.ndarray:
    n = coeffs.ndim
    t = coeffs.astype(complex)
    # contract one party at a time; each step appends that party's (row, col) pair
    for _ in range(n):
        t = np.tensordot(t, PAULI_MATRICES, axes=([0], [0]))
    order = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    dim = 2**n
    return t.transpose(order).reshape(dim, dim) / dim


def _rho_to_coeffs(rho: np.ndarray, n: int) -> np.ndarray:
    t = rho.reshape((2,) * (2 * n))
    # interleave (row_j, col_j) so party j's indices are adjacent
    order = [ax for j in range(n) for ax in (j, n + j)]
    t = t.transpose(order)
    # tr(rho P) = sum_{ab} rho_ab P_ba
    basis = PAULI_MATRICES.transpose(0, 2, 1)
    for _ in range(n):
        t = np.tensordot(t, basis, axes=([0, 1], [1, 2]))
    return t


@dataclass(frozen=True)
class LogicalState:
    """Pauli coefficient table of an N-qubit logical state."""

    n_parties: int
    coeffs: np.ndarray = field(compare=False, repr=False)
    name: str = "custom"

    def __post_init__(self):
        n = int(self.n_parties)
        if not 1 <= n <= MAX_DENSE_PARTIES:
            raise ValueError(f"n_parties must lie in [1, {MAX_DENSE_PARTIES}], got {self.n_parties!r}")
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (4,) * n:
            raise ValueError(f"coefficient tensor must have shape {(4,) * n}, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        if abs(c[(0,) * n] - 1.0) > 1e-12:
            raise ValueError("all-identity coefficient must equal 1 (unit trace)")
        if np.max(np.abs(c)) > 1.0 + 1e-12:
            raise ValueError("Pauli coefficients must satisfy |c| <= 1")
        c[np.abs(c) < SPARSE_TOL] = 0.0
        c.flags.writeable = False
        object.__setattr__(self, "n_parties", n)
        object.__setattr__(self, "coeffs", c)
        if n <= MAX_PSD_CHECK_PARTIES:
            lam = np.linalg.eigvalsh(self.density_matrix())
            if lam[0] < -1e-9:
                raise ValueError(f"coefficients do not define a PSD operator (min eigenvalue {lam[0]:.3e})")

    def coefficient(self, k: tuple[int, ...] | str) -> float:
        if isinstance(k, str):
            k = tuple(int(ch) for ch in k)
        if len(k) != self.n_parties:
            raise ValueError("Pauli string length must equal n_parties")
        return float(self.coeffs[tuple(k)])

    def nonzero(self) -> dict[str, float]:
        """Sparse view: k-string -> coefficient for all retained entries."""
        idx = np.argwhere(self.coeffs != 0.0)
        return {"".join(map(str, row)): float(self.coeffs[tuple(row)]) for row in idx}

    def density_matrix(self) -> np.ndarray:
        return _coeffs_to_rho(self.coeffs)

    def to_dict(self) -> dict:
        return {
            "n": self.n_parties,
            "coeffs": [{"k": k, "c": c} for k, c in self.nonzero().items()],
        }

    def to_json(self, path: str | Path | None = None) -> str:
        text = json.dumps(self.to_dict(), indent=1, sort_keys=True)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    @classmethod
    def from_dict(cls, data: dict, name: str = "custom") -> "LogicalState":
        try:
            n = int(data["n"])
            entries = data["coeffs"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed coefficient table: {exc}") from exc
        if not 1 <= n <= MAX_DENSE_PARTIES:
            raise ValueError(f"n out of range: {n}")
        c = np.zeros((4,) * n)
        for entry in entries:
            k = str(entry["k"])
            if len(k) != n or any(ch not in "0123" for ch in k):
                raise ValueError(f"invalid Pauli string {k!r}")
            c[tuple(int(ch) for ch in k)] = float(entry["c"])
        return cls(n, c, name)

    @classmethod
    def from_json(cls, source: str | Path) -> "LogicalState":
        """Load from a JSON string or a path to a JSON file."""
        text = str(source)
        if not text.lstrip().startswith("{"):
            text = Path(source).read_text()
        return cls.from_dict(json.loads(text))


def from_density_matrix(rho, tol: float = 1e-9, name: str = "custom") -> LogicalState:
    """Pauli coefficients of a 2^N x 2^N density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise ValueError("dimension must be a power of two")
    if n > MAX_PSD_CHECK_PARTIES:
        raise ValueError(f"density-matrix input limited to N <= {MAX_PSD_CHECK_PARTIES}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError("density matrix must have unit trace")
    if np.linalg.eigvalsh(rho)[0] < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    c = _rho_to_coeffs(rho, n)
    if np.max(np.abs(c.imag)) > 1e-10:
        raise ValueError("Pauli coefficients are not real; input is not Hermitian")
    return LogicalState(n, c.real, name)


def _digit_counts(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Numbers of X, Y and Z factors in every Pauli string, as (4,)*n arrays."""
    counts = []
    for target in (1, 2, 3):
        total = np.zeros((4,) * n, dtype=np.int8)
        for j in range(n):
            shape = [1] * n
            shape[j] = 4
            total += (np.arange(4) == target).astype(np.int8).reshape(shape)
        counts.append(total)
    return counts[0], counts[1], counts[2]


def _check_n(n: int) -> int:
    n = int(n)
    if not 2 <= n <= MAX_DENSE_PARTIES:
        raise ValueError(f"N must lie in [2, {MAX_DENSE_PARTIES}], got {n}")
    return n


@lru_cache(maxsize=None)
def ghz_coefficients(n: int) -> LogicalState:
    """(|0...0> + |1...1>)/sqrt(2).

    Diagonal strings (I/Z only) give 1 for an even number of Z; strings built
    only from X and Y give Re(i^#Y); every other string vanishes.
    """
    n = _check_n(n)
    nx, ny, nz = _digit_counts(n)
    offdiag = np.array([1.0, 0.0, -1.0, 0.0])[ny % 4]
    c = np.where(nx + ny == 0, (nz % 2 == 0).astype(float), 0.0)
    c = np.where(nx + ny == n, offdiag, c)
    return LogicalState(n, c, "ghz")


@lru_cache(maxsize=None)
def w_coefficients(n: int) -> LogicalState:
    """Single excitation spread uniformly over N sites.

    Diagonal strings give (N - 2 #Z)/N.  Strings with XX or YY on one pair
    and I/Z elsewhere give 2/N; mixed XY pairs cancel.
    """
    n = _check_n(n)
    nx, ny, nz = _digit_counts(n)
    c = np.where(nx + ny == 0, (n - 2.0 * nz) / n, 0.0)
    hop = ((nx == 2) & (ny == 0)) | ((ny == 2) & (nx == 0))
    c = np.where(hop, 2.0 / n, c)
    return LogicalState(n, c, "w")


def state_by_name(name: str, n: int) -> LogicalState:
    key = name.lower()
    if key == "ghz":
        return ghz_coefficients(n)
    if key == "w":
        return w_coefficients(n)
    raise ValueError(f"unknown state {name!r}")
