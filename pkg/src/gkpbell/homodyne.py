"""Binned-homodyne overlaps ``t_{k,o} = tr(M_o sigma_k^eps)`` via the erf series.

Each Gaussian peak of the encoded Pauli Wigner function projects onto the
measured quadrature as a 1-D Gaussian; integrating it over the periodic bins
gives the binning function ``B_o(mu)``.  ``erf``/``erfc`` come from
``scipy.special`` (Cephes rational approximations, accurate to a few ulp).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import erfc, erfcinv

from .lattice import (
    DEFAULT_TOL,
    IDENTITY_CHANNEL,
    SQRT_PI,
    FiniteEnergyParams,
    NoiseChannel,
    _check_k,
    coset_terms,
    truncation_radius,
)

__all__ = [
    "MeasurementSetting",
    "NoiseChannel",
    "OverlapTable",
    "binning_function",
    "effective_sigma",
    "overlap_table",
    "projected_mean",
    "single_mode_overlap",
]

TWO_PI = 2.0 * math.pi
# lattice-aligned bin period along the diagonal quadrature
DIAGONAL_PERIOD = SQRT_PI / math.sqrt(2.0)

_LABEL_ANGLES = {"Z": 0.0, "Y": math.pi / 4, "X": math.pi / 2}


@dataclass(frozen=True)
class MeasurementSetting:
    """Homodyne angle plus the bin period of the outcome digitisation.

    Bins are ``R_o = U_s [(2s+o)d - d/2, (2s+o)d + d/2)`` with ``d = period``.
    The default period ``sqrt(pi)`` is aligned with the code lattice for the
    q and p quadratures.  Along the diagonal (``theta = pi/4``) the projected
    lattice has period ``sqrt(pi/2)``, which :meth:`from_label` uses for ``Y``
    unless ``y_binning="literal"`` is requested.
    """

    theta: float
    label: str = "custom"
    period: float = SQRT_PI

    def __post_init__(self):
        theta = float(self.theta) % TWO_PI
        if not math.isfinite(theta):
            raise ValueError(f"theta must be finite, got {self.theta!r}")
        if self.label not in ("X", "Y", "Z", "custom"):
            raise ValueError(f"unknown setting label {self.label!r}")
        if self.label != "custom" and not math.isclose(
            theta, _LABEL_ANGLES[self.label], abs_tol=1e-12
        ):
            raise ValueError(f"label {self.label} requires theta={_LABEL_ANGLES[self.label]}")
        if not (self.period > 0 and math.isfinite(self.period)):
            raise ValueError("bin period must be positive")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "period", float(self.period))

    @classmethod
    def from_label(cls, label: str, y_binning: str = "aligned") -> "MeasurementSetting":
        label = label.upper()
        if label not in _LABEL_ANGLES:
            raise ValueError(f"unknown Pauli label {label!r}")
        period = SQRT_PI
        if label == "Y":
            if y_binning == "aligned":
                period = DIAGONAL_PERIOD
            elif y_binning != "literal":
                raise ValueError(f"y_binning must be 'aligned' or 'literal', got {y_binning!r}")
        return cls(_LABEL_ANGLES[label], label, period)

    @property
    def logical_pauli(self) -> tuple[int, int] | None:
        """(sign, k) of the logical observable realised in the ideal limit, if any."""
        if self.label in ("X", "Z") and self.period == SQRT_PI:
            return (1, 1 if self.label == "X" else 3)
        if self.label == "Y" and self.period == DIAGONAL_PERIOD:
            # diagonal readout with these bins realises -Y in the ideal limit
            return (-1, 2)
        return None


def _interval_mass(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """0.5 * (erf(hi) - erf(lo)) for lo <= hi, without cancellation in the tails."""
    out = np.empty(np.broadcast(lo, hi).shape)
    lo, hi = np.broadcast_arrays(lo, hi)
    pos = lo >= 0
    neg = hi <= 0
    mid = ~(pos | neg)
    out[pos] = 0.5 * (erfc(lo[pos]) - erfc(hi[pos]))
    out[neg] = 0.5 * (erfc(-hi[neg]) - erfc(-lo[neg]))
    out[mid] = 1.0 - 0.5 * (erfc(-lo[mid]) + erfc(hi[mid]))
    return out


def _l_cutoff(sigma: float, period: float, tol: float) -> int:
    # Gaussian mass beyond z*sigma is below tol/10; reduced means lie in [-d, d)
    z = math.sqrt(2.0) * float(erfcinv(min(tol / 10.0, 0.5)))
    return int(math.ceil((z * sigma + 3.0 * period) / (2.0 * period)))


def binning_function(
    mu,
    sigma: float,
    o: int,
    l_max: int | None = None,
    period: float = SQRT_PI,
    tol: float = DEFAULT_TOL,
):
    """Probability that a Gaussian ``N(mu, sigma^2)`` lands in bin ``R_o``.

    With an explicit ``l_max`` the raw truncated series is summed.  Otherwise
    ``mu`` is first reduced modulo the bin lattice period ``2d`` and the
    cutoff is chosen so the neglected mass is below ``tol / 10``.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    if o not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    mu_arr = np.asarray(mu, dtype=float)
    if l_max is None:
        two_d = 2.0 * period
        mu_arr = mu_arr - two_d * np.floor((mu_arr + period) / two_d)
        l_max = _l_cutoff(sigma, period, tol)
    ell = np.arange(-l_max, l_max + 1, dtype=float).reshape((-1,) + (1,) * mu_arr.ndim)
    scale = math.sqrt(2.0) * sigma
    lo = ((2.0 * ell + o - 0.5) * period - mu_arr) / scale
    hi = ((2.0 * ell + o + 0.5) * period - mu_arr) / scale
    total = _interval_mass(lo, hi).sum(axis=0)
    return float(total) if np.ndim(total) == 0 else total


def projected_mean(
    params: FiniteEnergyParams,
    setting: MeasurementSetting,
    m: tuple[int, int],
    eta: float = 1.0,
) -> float:
    scale = math.sqrt(eta) * params.lattice_scale * SQRT_PI / 2.0
    return scale * (m[0] * math.cos(setting.theta) + m[1] * math.sin(setting.theta))


def effective_sigma(params: FiniteEnergyParams, channel: NoiseChannel = IDENTITY_CHANNEL) -> float:
    eta = channel.eta
    return math.sqrt(eta * params.sigma_sq + (1.0 - eta) * (channel.n_th + 0.5))


@dataclass(frozen=True)
class OverlapTable:
    """``t[k, o]`` for one setting; rows k = 0..3 (I, X, Y, Z), columns o = 0, 1."""

    setting: MeasurementSetting
    t: np.ndarray = field(compare=False, repr=False)

    def traces(self) -> np.ndarray:
        return self.t.sum(axis=1)


@lru_cache(maxsize=4096)
def overlap_table(
    setting: MeasurementSetting,
    params: FiniteEnergyParams,
    channel: NoiseChannel = IDENTITY_CHANNEL,
    tol: float = DEFAULT_TOL,
) -> OverlapTable:
    """All eight single-mode overlaps for one setting (cached)."""
    radius = truncation_radius(params, tol)
    sigma = effective_sigma(params, channel)
    scale = math.sqrt(channel.eta) * params.lattice_scale * SQRT_PI / 2.0
    c, s = math.cos(setting.theta), math.sin(setting.theta)
    t = np.empty((4, 2))
    for k in range(4):
        m1, m2, w = coset_terms(k, params, radius)
        mu = scale * (m1 * c + m2 * s)
        # B errors are amplified by the total weight of the lattice sum
        btol = tol / max(1.0, float(np.abs(w).sum()))
        for o in (0, 1):
            b = binning_function(mu, sigma, o, period=setting.period, tol=btol)
            t[k, o] = math.fsum(w * b)
    t.flags.writeable = False
    return OverlapTable(setting, t)


def single_mode_overlap(
    k: int,
    o: int,
    setting: MeasurementSetting,
    params: FiniteEnergyParams,
    channel: NoiseChannel = IDENTITY_CHANNEL,
    tol: float = DEFAULT_TOL,
) -> float:
    _check_k(k)
    if o not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    return float(overlap_table(setting, params, channel, tol).t[k, o])
