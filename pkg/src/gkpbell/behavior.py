"""N-party behaviors p(o|x) for GKP-encoded logical states under binned homodyne.

The probability of an outcome string factorises into single-mode overlaps:
``p(o|x) = (1/Z) sum_k c_k prod_j t[k_j, o_j]`` evaluated at party j's setting
``x_j``.  The sum over Pauli strings is done as a dense tensor contraction,
one party at a time.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .homodyne import MeasurementSetting, overlap_table
from .lattice import DEFAULT_TOL, IDENTITY_CHANNEL, FiniteEnergyParams, NoiseChannel, pauli_trace
from .logical import LogicalState

__all__ = [
    "Behavior",
    "BehaviorError",
    "MAX_DENSE_ENTRIES",
    "SettingScheme",
    "assemble_behavior",
    "assemble_correlators",
    "correlator_table",
    "full_correlator",
    "marginal",
]

# 2^9 outcomes x 2^9 inputs, the largest dense table allowed
MAX_DENSE_ENTRIES = 4**9
CHECK_TOL = 1e-9


class BehaviorError(ArithmeticError):
    """Assembled behavior violates normalisation, positivity or no-signalling."""


@dataclass(frozen=True)
class SettingScheme:
    """Per-party measurement settings indexed by the input x_j.

    ``tag`` names the Pauli labels of the inputs in order (e.g. ``"ZX"`` means
    x=0 is Z and x=1 is X); functionals that rely on a convention check it.
    """

    settings: tuple[tuple[MeasurementSetting, ...], ...]
    tag: str | None = None

    def __post_init__(self):
        settings = tuple(tuple(party) for party in self.settings)
        if not settings:
            raise ValueError("scheme needs at least one party")
        inputs = {len(party) for party in settings}
        if len(inputs) != 1:
            raise ValueError("all parties must have the same number of inputs")
        if inputs.pop() < 1:
            raise ValueError("each party needs at least one input")
        for party in settings:
            for s in party:
                if not isinstance(s, MeasurementSetting):
                    raise TypeError("settings must be MeasurementSetting instances")
        object.__setattr__(self, "settings", settings)

    @classmethod
    def uniform(cls, n_parties: int, labels, y_binning: str = "aligned") -> "SettingScheme":
        """Every party uses the same Pauli-labelled settings, e.g. ``("Y", "X")``."""
        labels = tuple(str(lab).upper() for lab in labels)
        row = tuple(MeasurementSetting.from_label(lab, y_binning) for lab in labels)
        return cls((row,) * int(n_parties), "".join(labels))

    @property
    def n_parties(self) -> int:
        return len(self.settings)

    @property
    def inputs(self) -> int:
        return len(self.settings[0])


def _index_strings(n: int, base: int) -> list[str]:
    return ["".join(map(str, t)) for t in itertools.product(range(base), repeat=n)]


@dataclass(frozen=True)
class Behavior:
    """Conditional probability table; ``p[o_1..o_N, x_1..x_N]``."""

    n_parties: int
    inputs: int
    p: np.ndarray = field(compare=False, repr=False)
    tag: str | None = None
    outputs: int = 2

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        shape = (self.outputs,) * self.n_parties + (self.inputs,) * self.n_parties
        if p.shape != shape:
            raise ValueError(f"probability table must have shape {shape}, got {p.shape}")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    def prob(self, o, x) -> float:
        return float(self.p[tuple(o) + tuple(x)])

    def vector(self) -> np.ndarray:
        """Flat view ordered by setting string, then outcome string."""
        n = self.n_parties
        axes = list(range(n, 2 * n)) + list(range(n))
        return self.p.transpose(axes).reshape(-1)

    @classmethod
    def from_vector(cls, vec, n_parties: int, inputs: int, tag: str | None = None, outputs: int = 2):
        n = n_parties
        t = np.asarray(vec, dtype=float).reshape((inputs,) * n + (outputs,) * n)
        axes = list(range(n, 2 * n)) + list(range(n))
        return cls(n, inputs, t.transpose(axes), tag, outputs)

    def check(self, tol: float = CHECK_TOL) -> dict[str, float]:
        """Worst normalisation, positivity and no-signalling deviations."""
        n = self.n_parties
        out_axes = tuple(range(n))
        norm = float(np.max(np.abs(self.p.sum(axis=out_axes) - 1.0)))
        neg = float(max(0.0, -self.p.min()))
        ns = 0.0
        for j in range(n):
            m = self.p.sum(axis=j)
            # after removing o_j, party j's input sits on axis n - 1 + j
            ref = np.take(m, [0], axis=n - 1 + j)
            ns = max(ns, float(np.max(np.abs(m - ref))))
        return {"normalization": norm, "negativity": neg, "no_signaling": ns}

    def validate(self, tol: float = CHECK_TOL) -> None:
        dev = self.check(tol)
        bad = {k: v for k, v in dev.items() if v > tol}
        if bad:
            raise BehaviorError(f"behavior fails consistency checks (tol {tol}): {bad}")

    # --- export -----------------------------------------------------------
    def to_dict(self) -> dict:
        n = self.n_parties
        p = {}
        for x in _index_strings(n, self.inputs):
            for o in _index_strings(n, self.outputs):
                p[f"{o};{x}"] = float(self.p[tuple(map(int, o)) + tuple(map(int, x))])
        return {"n": n, "inputs": self.inputs, "p": p}

    def to_json(self, path: str | Path | None = None) -> str:
        text = json.dumps(self.to_dict(), indent=1)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "o", "p"])
        n = self.n_parties
        for x in _index_strings(n, self.inputs):
            for o in _index_strings(n, self.outputs):
                val = self.p[tuple(map(int, o)) + tuple(map(int, x))]
                writer.writerow([x, o, repr(float(val))])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_dict(cls, data: dict, tag: str | None = None) -> "Behavior":
        n, inputs = int(data["n"]), int(data["inputs"])
        p = np.zeros((2,) * n + (inputs,) * n)
        for key, val in data["p"].items():
            o, x = key.split(";")
            p[tuple(map(int, o)) + tuple(map(int, x))] = float(val)
        return cls(n, inputs, p, tag)


def _party_tensors(scheme: SettingScheme, params, channel, tol) -> list[np.ndarray]:
    """T_j[k, o, x] = t_{k,o} for party j's setting x."""
    out = []
    for party in scheme.settings:
        tables = [overlap_table(s, params, channel, tol).t for s in party]
        out.append(np.stack(tables, axis=-1))
    return out


def _normalizer(state: LogicalState, params: FiniteEnergyParams, tol: float) -> float:
    tr = np.array([pauli_trace(k, params, tol) for k in range(4)])
    z = state.coeffs
    for _ in range(state.n_parties):
        z = np.tensordot(z, tr, axes=([0], [0]))
    return float(z)


def assemble_behavior(
    state: LogicalState,
    scheme: SettingScheme,
    params: FiniteEnergyParams,
    channel: NoiseChannel = IDENTITY_CHANNEL,
    tol: float = DEFAULT_TOL,
    validate: bool = True,
) -> Behavior:
    """Full behavior table of the encoded state for the given settings."""
    n = state.n_parties
    if scheme.n_parties != n:
        raise ValueError(f"scheme has {scheme.n_parties} parties but the state has {n}")
    inputs = scheme.inputs
    if (2 * inputs) ** n > MAX_DENSE_ENTRIES:
        raise ValueError(
            f"dense behavior with N={n}, I={inputs} exceeds {MAX_DENSE_ENTRIES} entries; "
            "use assemble_correlators"
        )
    norm = _normalizer(state, params, tol)
    if not (norm > 0 and math.isfinite(norm)):
        raise BehaviorError(f"normalisation constant is not positive: {norm}")
    t = state.coeffs
    for tj in _party_tensors(scheme, params, channel, tol):
        t = np.tensordot(t, tj, axes=([0], [0]))
    # axes are now (o_1, x_1, o_2, x_2, ...)
    t = t.transpose(list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2)))
    total = float(t[(Ellipsis,) + (0,) * n].sum())
    if abs(total - norm) > 1e-9 * max(1.0, abs(norm)):
        raise BehaviorError(f"outcome sum {total} disagrees with trace normaliser {norm}")
    b = Behavior(n, inputs, t / norm, scheme.tag)
    if validate:
        b.validate()
    return b


def assemble_correlators(
    state: LogicalState,
    scheme: SettingScheme,
    params: FiniteEnergyParams,
    channel: NoiseChannel = IDENTITY_CHANNEL,
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Full correlators E[x_1..x_N] without materialising p (works to N = 12)."""
    n = state.n_parties
    if scheme.n_parties != n:
        raise ValueError("party count mismatch between state and scheme")
    norm = _normalizer(state, params, tol)
    t = state.coeffs
    for tj in _party_tensors(scheme, params, channel, tol):
        t = np.tensordot(t, tj[:, 0, :] - tj[:, 1, :], axes=([0], [0]))
    return t / norm


def full_correlator(b: Behavior, x) -> float:
    """E(x) = sum_o (-1)^{|o|} p(o|x)."""
    x = tuple(int(v) for v in x)
    if len(x) != b.n_parties or any(not 0 <= v < b.inputs for v in x):
        raise ValueError(f"invalid setting string {x}")
    slab = b.p[(Ellipsis,) + x]
    sign = np.ones(())
    for j in range(b.n_parties):
        shape = [1] * b.n_parties
        shape[j] = 2
        sign = sign * np.array([1.0, -1.0]).reshape(shape)
    return float((sign * slab).sum())


def correlator_table(b: Behavior) -> np.ndarray:
    """All E(x) at once, shape (I,)*N."""
    t = b.p
    for _ in range(b.n_parties):
        t = t[0] - t[1]
    return t


def marginal(b: Behavior, parties, inputs, complement_inputs=None) -> np.ndarray:
    """Outcome distribution of ``parties`` for their ``inputs``.

    The remaining parties' outcomes are summed out; their inputs default to 0.
    """
    parties = tuple(int(j) for j in parties)
    inputs = tuple(int(v) for v in inputs)
    n = b.n_parties
    if not parties:
        raise ValueError("party subset must be nonempty")
    if len(set(parties)) != len(parties) or any(not 0 <= j < n for j in parties):
        raise ValueError(f"invalid party subset {parties}")
    if len(inputs) != len(parties):
        raise ValueError("one input per selected party is required")
    rest = [j for j in range(n) if j not in parties]
    if complement_inputs is None:
        complement_inputs = (0,) * len(rest)
    x = [0] * n
    for j, v in zip(parties, inputs):
        x[j] = v
    for j, v in zip(rest, complement_inputs):
        x[j] = int(v)
    slab = b.p[(Ellipsis,) + tuple(x)]
    reduced = slab.sum(axis=tuple(rest)) if rest else slab
    # order the remaining axes as listed in ``parties``
    kept = sorted(parties)
    return np.transpose(reduced, [kept.index(j) for j in parties])
