"""Finite-energy square-lattice GKP model.

The encoded Pauli operators ``V_eps sigma_k V_eps^dagger`` have Wigner functions
that are Gaussian mixtures on a contracted square lattice.  Peaks sit at
``sech(eps) * sqrt(pi)/2 * m`` for ``m`` in one of four parity cosets of Z^2,
carry an envelope weight ``exp(-pi/4 tanh(eps) |m|^2)`` and a sign pattern,
and share the isotropic covariance ``sigma^2 = tanh(eps)/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SQRT_PI = math.sqrt(math.pi)

# parity (m1 mod 2, m2 mod 2) of each coset; k = 0, X, Y, Z
COSET_PARITY = {0: (0, 0), 1: (1, 0), 2: (1, 1), 3: (0, 1)}

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class FiniteEnergyParams:
    """Squeezing model generated by the energy filter ``exp(-eps * n)``."""

    epsilon: float

    def __post_init__(self):
        eps = float(self.epsilon)
        if not math.isfinite(eps) or eps <= 0:
            raise ValueError(f"epsilon must be finite and positive, got {self.epsilon!r}")
        object.__setattr__(self, "epsilon", eps)

    @property
    def tanh(self) -> float:
        return math.tanh(self.epsilon)

    @property
    def sigma_sq(self) -> float:
        """Peak parameter; the variance of every Wigner peak."""
        return 0.5 * math.tanh(self.epsilon)

    @property
    def Sigma_sq(self) -> float:
        """Envelope parameter ``coth(eps)/2``."""
        return 0.5 / math.tanh(self.epsilon)

    @property
    def lattice_scale(self) -> float:
        return 1.0 / math.cosh(self.epsilon)

    @property
    def r_db(self) -> float:
        return -10.0 * math.log10(math.tanh(self.epsilon))


def params_from_db(r_db: float) -> FiniteEnergyParams:
    """Build parameters from the squeezing ``r_dB = -10 log10(tanh eps)``."""
    r_db = float(r_db)
    if not math.isfinite(r_db) or r_db <= 0:
        raise ValueError(f"r_db must be finite and positive, got {r_db!r}")
    return FiniteEnergyParams(math.atanh(10.0 ** (-r_db / 10.0)))


@dataclass(frozen=True)
class NoiseChannel:
    """Beam-splitter loss with a thermal environment port."""

    eta: float = 1.0
    n_th: float = 0.0

    def __post_init__(self):
        eta, n_th = float(self.eta), float(self.n_th)
        if not (0.0 < eta <= 1.0):
            raise ValueError(f"eta must lie in (0, 1], got {self.eta!r}")
        if not (n_th >= 0.0 and math.isfinite(n_th)):
            raise ValueError(f"n_th must be finite and >= 0, got {self.n_th!r}")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "n_th", n_th)

    @property
    def is_identity(self) -> bool:
        return self.eta == 1.0


IDENTITY_CHANNEL = NoiseChannel()


def _check_k(k: int) -> int:
    if k not in COSET_PARITY:
        raise ValueError(f"Pauli index must be in {{0,1,2,3}}, got {k!r}")
    return int(k)


def envelope_weight(params: FiniteEnergyParams, m: tuple[int, int]) -> float:
    m1, m2 = m
    return math.exp(-0.25 * math.pi * params.tanh * (m1 * m1 + m2 * m2))


def coset_membership(k: int, m: tuple[int, int]) -> bool:
    p1, p2 = COSET_PARITY[_check_k(k)]
    return (m[0] % 2, m[1] % 2) == (p1, p2)


def _sign_array(k: int, m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    # exponents are integers on the coset; (-1)^e == 1 - 2 (e mod 2)
    if k == 0:
        return np.ones(np.shape(m1), dtype=np.int64)
    if k == 1:
        e = m2 // 2
    elif k == 2:
        e = (m1 + m2) // 2
    else:
        e = m1 // 2
    return 1 - 2 * (e % 2)


def sign_pattern(k: int, m: tuple[int, int]) -> int:
    if not coset_membership(k, m):
        raise ValueError(f"site {m} is not in coset M_{k}")
    return int(_sign_array(k, np.asarray(m[0]), np.asarray(m[1])))


@lru_cache(maxsize=256)
def _sites(k: int, radius: int) -> tuple[np.ndarray, np.ndarray]:
    p1, p2 = COSET_PARITY[k]
    r1 = np.arange(-radius, radius + 1)
    a = r1[(r1 % 2) == p1]
    b = r1[(r1 % 2) == p2]
    m1, m2 = np.meshgrid(a, b, indexing="ij")
    m1, m2 = m1.ravel(), m2.ravel()
    m1.flags.writeable = False
    m2.flags.writeable = False
    return m1, m2


def lattice_sites(k: int, radius: int) -> list[tuple[int, int]]:
    """Sites of coset ``M_k`` with ``max(|m1|, |m2|) <= radius``, row-major in (m1, m2)."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    m1, m2 = _sites(_check_k(k), int(radius))
    return list(zip(m1.tolist(), m2.tolist()))


def site_arrays(k: int, radius: int) -> tuple[np.ndarray, np.ndarray]:
    """Array form of :func:`lattice_sites` (read-only views)."""
    return _sites(_check_k(k), int(radius))


def _tail_bound(a: float, radius: int) -> float:
    """Upper bound on sum of exp(-a |m|^2) over sites with max|m_i| > radius."""
    # 1-D tail over |j| > R, dominated by a geometric series
    ratio = math.exp(-a * (2 * radius + 3))
    tail_1d = 2.0 * math.exp(-a * (radius + 1) ** 2) / (1.0 - ratio)
    full_1d = 1.0 + math.sqrt(math.pi / a)
    return 2.0 * tail_1d * full_1d


def truncation_radius(params: FiniteEnergyParams, tol: float = DEFAULT_TOL) -> int:
    """Smallest radius whose envelope tail is below ``tol``."""
    if tol >= 1.0:
        return 1
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    a = 0.25 * math.pi * params.tanh
    # start from the Gaussian estimate, then walk down/up to the exact threshold
    r = max(1, int(math.sqrt(max(0.0, -math.log(tol)) / a)))
    while r > 1 and _tail_bound(a, r - 1) < tol:
        r -= 1
    while _tail_bound(a, r) >= tol:
        r += 1
    return r


def coset_terms(k: int, params: FiniteEnergyParams, radius: int):
    """Return (m1, m2, signed weights) with the Y prefactor folded into the weights."""
    m1, m2 = site_arrays(k, radius)
    w = np.exp(-0.25 * math.pi * params.tanh * (m1 * m1 + m2 * m2).astype(float))
    w = w * _sign_array(k, m1, m2)
    if k == 2:
        w = -w
    return m1, m2, w


def pauli_trace(k: int, params: FiniteEnergyParams, tol: float = DEFAULT_TOL) -> float:
    """Trace of the encoded Pauli operator (each Gaussian integrates to one)."""
    _check_k(k)
    _, _, w = coset_terms(k, params, truncation_radius(params, tol))
    return math.fsum(w)


def wigner_value(
    k: int,
    params: FiniteEnergyParams,
    channel: NoiseChannel = IDENTITY_CHANNEL,
    q: float = 0.0,
    p: float = 0.0,
    tol: float = DEFAULT_TOL,
) -> float:
    """Wigner function of the encoded Pauli ``k`` after the loss/thermal channel."""
    _check_k(k)
    var = channel.eta * params.sigma_sq + (1.0 - channel.eta) * (channel.n_th + 0.5)
    # peak heights are 1/(2 pi var), so the weight tail must be tighter by that factor
    m1, m2, w = coset_terms(k, params, truncation_radius(params, tol * 2.0 * math.pi * var))
    scale = math.sqrt(channel.eta) * params.lattice_scale * SQRT_PI / 2.0
    d2 = (q - scale * m1) ** 2 + (p - scale * m2) ** 2
    return math.fsum(w * np.exp(-d2 / (2.0 * var))) / (2.0 * math.pi * var)
