"""Independent Fock-space / wavefunction oracle for binned-homodyne probabilities.

Apart from :func:`compare_with_series`, which reports the two side by side,
nothing here touches the lattice Gaussian mixture or the erf series.  Codewords
are built as position wavefunctions by applying the energy-filter kernel to the
ideal combs, projected onto Hermite functions, rotated with ``exp(-i theta n)``
and integrated over the periodic bins by Gauss-Legendre quadrature on each
bin interval.  Loss is applied with the attenuation Kraus operators; thermal
noise is added by numerically convolving the output marginal.

Scale convention: the unnormalised codewords carry the factor
``(2 sqrt(pi) sigma^2)^(-1/2)`` so that ``V sigma_k V^dagger`` has the same
trace normalisation as the lattice Gaussian mixture (unit-mass central peak).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .lattice import SQRT_PI, FiniteEnergyParams

PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class OracleResolutionError(RuntimeError):
    """Quadrature or truncation not fine enough for the requested accuracy."""


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Normalised oscillator eigenfunctions ``psi_n(x)`` for n = 0..n_max.

    Uses the three-term recurrence on the normalised functions, which stays
    finite well beyond the range where ``H_n / sqrt(2^n n!)`` overflows.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def energy_filter_kernel(x, x0, epsilon: float):
    """Closed-form ``<x| exp(-eps n) |x0>``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    x, x0 = np.asarray(x, dtype=float), np.asarray(x0, dtype=float)
    sh, ch = math.sinh(epsilon), math.cosh(epsilon)
    pref = math.exp(0.5 * epsilon) / math.sqrt(2.0 * math.pi * sh)
    return pref * np.exp(-((x * x + x0 * x0) * ch - 2.0 * x * x0) / (2.0 * sh))


def mehler_kernel_sum(x, x0, epsilon: float, n_terms: int = 200):
    """Truncated eigenfunction expansion ``sum_n exp(-eps n) psi_n(x) psi_n(x0)``."""
    x, x0 = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(x0, dtype=float))
    hx = hermite_functions(n_terms - 1, x)
    h0 = hermite_functions(n_terms - 1, x0)
    decay = np.exp(-epsilon * np.arange(n_terms)).reshape((-1,) + (1,) * x.ndim)
    return (decay * hx * h0).sum(axis=0)


def _comb_sites(mu: int, params: FiniteEnergyParams, tol: float = 1e-18) -> np.ndarray:
    # envelope exp(-sigma^2 x_s^2) below tol beyond |x_s| = smax
    smax = math.sqrt(-math.log(tol) / params.sigma_sq)
    s_hi = int(math.ceil(smax / (2 * SQRT_PI))) + 1
    s = np.arange(-s_hi, s_hi + 1)
    return (2 * s + mu) * SQRT_PI


def filtered_comb(mu: int, params: FiniteEnergyParams, x) -> np.ndarray:
    """Unnormalised finite-energy codeword ``exp(-eps n)|mu_ideal>`` in position space."""
    if mu not in (0, 1):
        raise ValueError("codeword index must be 0 or 1")
    x = np.asarray(x, dtype=float)
    s2 = params.sigma_sq
    xs = _comb_sites(mu, params)
    kappa = 1.0 / math.sqrt(2.0 * SQRT_PI * s2)
    out = np.zeros(x.shape)
    for x0 in xs:
        out += np.exp(-((x - x0 * params.lattice_scale) ** 2) / (4.0 * s2) - s2 * x0 * x0)
    return kappa * out


def _position_grid(params: FiniteEnergyParams, half_width: float | None = None, step: float | None = None):
    if half_width is None:
        half_width = math.sqrt(-math.log(1e-20) / params.sigma_sq) + 8.0
    if step is None:
        # peak amplitude std is sqrt(2) sigma; resolve it with >= 16 points
        step = min(0.02, math.sqrt(2.0 * params.sigma_sq) / 16.0)
    n = int(math.ceil(2 * half_width / step)) + 1
    return np.linspace(-half_width, half_width, n)


def codeword_norm_sq(mu: int, params: FiniteEnergyParams) -> float:
    x = _position_grid(params)
    psi = filtered_comb(mu, params, x)
    return float(np.sum(psi * psi) * (x[1] - x[0]))


def gkp_wavefunction(mu: int, params: FiniteEnergyParams, x) -> np.ndarray:
    """Normalised finite-energy codeword wavefunction (normalisation by quadrature)."""
    return filtered_comb(mu, params, x) / math.sqrt(codeword_norm_sq(mu, params))


@dataclass(frozen=True)
class FockVector:
    amplitudes: np.ndarray
    norm_sq: float  # squared norm of the represented wavefunction
    residual: float  # relative weight outside the truncated space

    @property
    def n_max(self) -> int:
        return len(self.amplitudes) - 1


def default_n_max(params: FiniteEnergyParams, target: float = 1e-16) -> int:
    """Cutoff where the filtered-comb tail ``~exp(-2 eps n)`` drops below ``target``."""
    eps = params.epsilon
    n = (-math.log(target) + math.log(1.0 / (2.0 * eps))) / (2.0 * eps)
    return int(min(900, max(40, math.ceil(n))))


@lru_cache(maxsize=64)
def _codeword_amplitudes(mu: int, params: FiniteEnergyParams, n_max: int):
    half = max(math.sqrt(2 * n_max + 1) + 12.0, 12.0)
    step = min(0.01, math.sqrt(2.0 * params.sigma_sq) / 16.0)
    x = np.linspace(-half, half, int(math.ceil(2 * half / step)) + 1)
    h = x[1] - x[0]
    psi = filtered_comb(mu, params, x)
    amps = hermite_functions(n_max, x) @ psi * h
    norm_sq = codeword_norm_sq(mu, params)
    residual = max(0.0, 1.0 - float(np.dot(amps, amps)) / norm_sq)
    amps.flags.writeable = False
    return amps, norm_sq, residual


def fock_codeword(
    mu: int,
    params: FiniteEnergyParams,
    n_max: int | None = None,
    normalize: bool = True,
    max_residual: float = 1e-8,
) -> FockVector:
    """Photon-number amplitudes ``<n|mu_L^eps>`` by quadrature against Hermite functions."""
    if n_max is None:
        n_max = default_n_max(params)
    amps, norm_sq, residual = _codeword_amplitudes(mu, params, int(n_max))
    if residual > max_residual:
        suggestion = default_n_max(params)
        raise OracleResolutionError(
            f"Fock truncation residual {residual:.2e} at n_max={n_max}; try n_max>={suggestion}"
        )
    if normalize:
        amps = amps / math.sqrt(norm_sq)
    return FockVector(np.array(amps), norm_sq, residual)


def encoded_pauli_operator(k: int, params: FiniteEnergyParams, n_max: int | None = None) -> np.ndarray:
    """Fock matrix of ``V_eps sigma_k V_eps^dagger`` with unnormalised codewords."""
    if n_max is None:
        n_max = default_n_max(params)
    # residual check is relative; the operator accuracy is what the callers verify
    v = np.stack(
        [fock_codeword(mu, params, n_max, normalize=False, max_residual=1e-6).amplitudes for mu in (0, 1)],
        axis=1,
    ).astype(complex)
    return v @ PAULIS[k] @ v.conj().T


def rotate(op: np.ndarray, theta: float) -> np.ndarray:
    """``U op U^dagger`` with ``U = exp(-i theta n)``."""
    ph = np.exp(-1j * theta * np.arange(op.shape[0]))
    return ph[:, None] * op * ph.conj()[None, :]


def _bin_intervals(o: int, period: float, half_width: float):
    s_lo = int(math.floor((-half_width / period - o - 0.5) / 2.0)) - 1
    s_hi = int(math.ceil((half_width / period - o + 0.5) / 2.0)) + 1
    centres = (2 * np.arange(s_lo, s_hi + 1) + o) * period
    keep = (centres + period / 2 > -half_width) & (centres - period / 2 < half_width)
    return centres[keep]


def _bin_nodes(o: int, period: float, half_width: float, n_gl: int):
    xg, wg = np.polynomial.legendre.leggauss(n_gl)
    centres = _bin_intervals(o, period, half_width)
    x = (centres[:, None] + 0.5 * period * xg[None, :]).ravel()
    w = np.tile(0.5 * period * wg, len(centres))
    return x, w


@lru_cache(maxsize=32)
def bin_integral_matrix(n_max: int, o: int, period: float = SQRT_PI, n_gl: int = 96) -> np.ndarray:
    """``I[n, m] = int_{R_o} psi_n(x) psi_m(x) dx`` by per-bin Gauss-Legendre quadrature."""
    half = math.sqrt(2 * n_max + 1) + 12.0
    x, w = _bin_nodes(o, period, half, n_gl)
    phi = hermite_functions(n_max, x)
    mat = (phi * w) @ phi.T
    mat.flags.writeable = False
    return mat


def check_bin_resolution(n_max: int, period: float = SQRT_PI, n_gl: int = 96, tol: float = 1e-7) -> float:
    """Step-halving check: compare ``n_gl`` against ``2 n_gl`` nodes per bin."""
    worst = 0.0
    for o in (0, 1):
        a = bin_integral_matrix(n_max, o, period, n_gl)
        b = bin_integral_matrix(n_max, o, period, 2 * n_gl)
        worst = max(worst, float(np.abs(a - b).max()))
    if worst > tol:
        raise OracleResolutionError(f"bin quadrature disagreement {worst:.2e} exceeds {tol:.1e}")
    return worst


def oracle_bin_probability(
    op: np.ndarray,
    theta: float,
    o: int,
    period: float = SQRT_PI,
    n_gl: int = 96,
) -> float:
    """``tr(M_o^(theta) op)`` for an operator given in the truncated Fock basis."""
    if o not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    n_max = op.shape[0] - 1
    mat = bin_integral_matrix(n_max, o, float(period), n_gl)
    rot = rotate(op, theta)
    return float(np.real(np.sum(rot * mat.T)))


def apply_pure_loss(op: np.ndarray, eta: float, max_trace_loss: float = 1e-6) -> np.ndarray:
    """Attenuation channel ``sum_l A_l op A_l^dagger`` in the truncated Fock basis."""
    if not (0.0 < eta <= 1.0):
        raise ValueError("eta must lie in (0, 1]")
    if eta == 1.0:
        return op.copy()
    dim = op.shape[0]
    n = np.arange(dim)
    out = np.zeros_like(op)
    for ell in range(dim):
        nn = n[ell:]
        # A_l|n> = sqrt(C(n,l) eta^(n-l) (1-eta)^l) |n-l>
        log_a = 0.5 * (
            gammaln(nn + 1) - gammaln(ell + 1) - gammaln(nn - ell + 1)
            + (nn - ell) * math.log(eta) + ell * math.log1p(-eta)
        )
        a = np.exp(log_a)
        if a.max() < 1e-300:
            break
        out[: dim - ell, : dim - ell] += np.outer(a, a) * op[ell:, ell:]
    lost = abs(np.trace(out) - np.trace(op))
    if lost > max_trace_loss * max(1.0, abs(np.trace(op))):
        raise OracleResolutionError(f"loss channel changed the trace by {lost:.2e}")
    return out


_LOSS_CACHE: dict = {}


def _cached_loss(op: np.ndarray, eta: float) -> np.ndarray:
    key = (hashlib.sha1(np.ascontiguousarray(op).tobytes()).hexdigest(), op.shape, float(eta))
    if key not in _LOSS_CACHE:
        if len(_LOSS_CACHE) >= 16:
            _LOSS_CACHE.pop(next(iter(_LOSS_CACHE)))
        _LOSS_CACHE[key] = apply_pure_loss(op, eta)
    return _LOSS_CACHE[key]


def position_marginal(op: np.ndarray, theta: float, x) -> np.ndarray:
    """``<q_theta| op |q_theta>`` on the points ``x`` (``op`` Hermitian)."""
    phi = hermite_functions(op.shape[0] - 1, x)
    # phi is real, so only the real part of the rotated operator contributes
    rot = np.real(rotate(op, theta))
    return np.einsum("nx,nx->x", phi, rot @ phi)


def thermal_bin_probabilities(
    op: np.ndarray,
    eta: float,
    n_th: float,
    theta: float,
    period: float = SQRT_PI,
    n_gl: int = 96,
) -> tuple[float, float]:
    """Both bin probabilities after loss plus thermal noise.

    The pure-loss output marginal is convolved with a zero-mean Gaussian of
    variance ``(1 - eta) n_th`` (trapezoid rule on a uniform grid) and the
    result integrated over the bins.
    """
    if n_th < 0:
        raise ValueError("n_th must be >= 0")
    lossy = _cached_loss(op, eta)
    var = (1.0 - eta) * n_th
    if var == 0.0:
        return tuple(oracle_bin_probability(lossy, theta, o, period, n_gl) for o in (0, 1))
    n_max = op.shape[0] - 1
    half = math.sqrt(2 * n_max + 1) + 12.0
    # the marginal is at least as wide as the vacuum-loss floor (1 - eta)/2
    width = math.sqrt(min(var, 0.5 * (1.0 - eta)))
    step = min(0.05, width / 4.0)
    x = np.arange(-half, half + step / 2, step)
    dens = position_marginal(lossy, theta, x)
    pad = 12.0 * math.sqrt(var)
    probs = []
    for o in (0, 1):
        y, w = _bin_nodes(o, period, half + pad, n_gl)
        total = 0.0
        for chunk in np.array_split(np.arange(len(y)), max(1, len(y) // 2048)):
            yc = y[chunk]
            kern = np.exp(-((yc[:, None] - x[None, :]) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)
            total += float(np.dot(w[chunk], kern @ dens) * step)
        probs.append(total)
    return probs[0], probs[1]


def thermal_marginal(op: np.ndarray, eta: float, n_th: float, theta: float, x) -> np.ndarray:
    """Quadrature density after loss and thermal noise, evaluated at ``x``."""
    lossy = _cached_loss(op, eta)
    x = np.asarray(x, dtype=float)
    var = (1.0 - eta) * n_th
    if var == 0.0:
        return position_marginal(lossy, theta, x)
    half = math.sqrt(2 * (op.shape[0] - 1) + 1) + 12.0
    step = min(0.05, math.sqrt(min(var, 0.5 * (1.0 - eta))) / 4.0)
    grid = np.arange(-half, half + step / 2, step)
    dens = position_marginal(lossy, theta, grid)
    kern = np.exp(-((x.reshape(-1, 1) - grid[None, :]) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)
    return (kern @ dens * step).reshape(x.shape)


def thermal_bin_probability(
    op: np.ndarray,
    eta: float,
    n_th: float,
    theta: float,
    o: int,
    period: float = SQRT_PI,
    n_gl: int = 96,
) -> float:
    if o not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    return thermal_bin_probabilities(op, eta, n_th, theta, period, n_gl)[o]


def fock_wigner(op: np.ndarray, q: float, p: float, half_width: float | None = None, step: float = 0.005) -> float:
    """Wigner function ``(1/2pi) int dy e^{ipy} <q - y/2| op |q + y/2>`` by quadrature."""
    n_max = op.shape[0] - 1
    if half_width is None:
        half_width = 2.0 * (math.sqrt(2 * n_max + 1) + 10.0)
    y = np.arange(-half_width, half_width + step / 2, step)
    a = hermite_functions(n_max, q - y / 2)
    b = hermite_functions(n_max, q + y / 2)
    kernel = np.einsum("ny,nm,my->y", a, op, b, optimize=True)
    return float(np.real(np.sum(np.exp(1j * p * y) * kernel) * step / (2 * math.pi)))


@dataclass(frozen=True)
class OracleComparison:
    r_db: float
    eta: float
    n_th: float
    label: str
    period: float
    series: np.ndarray = field(repr=False)
    oracle: np.ndarray = field(repr=False)

    @property
    def max_deviation(self) -> float:
        return float(np.abs(self.series - self.oracle).max())


def compare_with_series(r_db: float, settings, channel=None, n_max: int | None = None) -> list[OracleComparison]:
    """Oracle versus erf-series overlap tables for each setting (all k and o)."""
    from .homodyne import overlap_table
    from .lattice import IDENTITY_CHANNEL, params_from_db

    channel = IDENTITY_CHANNEL if channel is None else channel
    params = params_from_db(r_db)
    ops = [encoded_pauli_operator(k, params, n_max) for k in range(4)]
    out = []
    for s in settings:
        series = overlap_table(s, params, channel).t
        orc = np.empty((4, 2))
        for k in range(4):
            if channel.eta == 1.0:
                orc[k] = [oracle_bin_probability(ops[k], s.theta, o, s.period) for o in (0, 1)]
            else:
                orc[k] = thermal_bin_probabilities(ops[k], channel.eta, channel.n_th, s.theta, s.period)
        out.append(OracleComparison(r_db, channel.eta, channel.n_th, s.label, s.period, series, orc))
    return out
