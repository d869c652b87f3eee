"""Experiment driver: parameter sweeps, critical-squeezing search and reports."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .behavior import BehaviorError, SettingScheme, assemble_behavior
from .bell import VIOLATION_GUARD, cabello_value, chsh_value, mabk_value
from .lattice import NoiseChannel, params_from_db
from .logical import LogicalState, state_by_name
from .polytope import polytope_distance

__all__ = [
    "BELL_COLUMNS",
    "ConfigError",
    "CriticalSqueezingResult",
    "DISTANCE_COLUMNS",
    "SweepConfig",
    "critical_squeezing",
    "emit_report",
    "evaluate_point",
    "run_sweep",
]

CSV_SCHEMA_VERSION = 1
BELL_COLUMNS = ("r_db", "eta", "n_th", "N", "functional", "value", "bound", "violated", "status")
DISTANCE_COLUMNS = ("r_db", "eta", "n_th", "inputs", "distance_raw", "distance_per_setting", "status")
FUNCTIONALS = ("mabk", "cabello", "chsh", "distance")
# distance above this counts as outside the local polytope
DISTANCE_GUARD = 1e-7

_DEFAULT_LABELS = {
    "mabk": ("Y", "X"),
    "cabello": ("Z", "X"),
    "chsh": ("Z", "X"),
}


class ConfigError(ValueError):
    pass


def _grid(spec, name: str) -> tuple[float, ...]:
    """Accept a scalar, a list, or {"min", "max", "step"}."""
    if isinstance(spec, (int, float)):
        values = [float(spec)]
    elif isinstance(spec, (list, tuple)):
        values = [float(v) for v in spec]
    elif isinstance(spec, dict):
        try:
            lo, hi, step = float(spec["min"]), float(spec["max"]), float(spec["step"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{name}: grid needs numeric min/max/step") from exc
        if step <= 0 or hi < lo:
            raise ConfigError(f"{name}: need step > 0 and max >= min")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        values = [round(lo + i * step, 12) for i in range(count)]
    else:
        raise ConfigError(f"{name}: unsupported grid specification {spec!r}")
    if not values:
        raise ConfigError(f"{name}: grid is empty")
    if not all(math.isfinite(v) for v in values):
        raise ConfigError(f"{name}: grid values must be finite")
    return tuple(values)


@dataclass(frozen=True)
class SweepConfig:
    state: str = "ghz"
    n_parties: int = 3
    inputs: int = 2
    functional: str = "mabk"
    r_db: tuple = (10.0,)
    eta: tuple = (1.0,)
    n_th: tuple = (0.0,)
    settings: tuple | None = None
    y_binning: str = "aligned"
    lattice_tol: float = 1e-12
    lp_tol: float = 1e-9
    bisection_tol_db: float = 0.01
    output: str | None = None

    def __post_init__(self):
        if self.functional not in FUNCTIONALS:
            raise ConfigError(f"functional must be one of {FUNCTIONALS}, got {self.functional!r}")
        if not isinstance(self.n_parties, int) or not 2 <= self.n_parties <= 12:
            raise ConfigError("n_parties must be an integer in [2, 12]")
        if self.inputs not in (2, 3):
            raise ConfigError("inputs must be 2 or 3")
        if self.functional in ("mabk", "cabello", "chsh") and self.inputs != 2:
            raise ConfigError(f"{self.functional} requires inputs = 2")
        if self.functional == "chsh" and self.n_parties != 2:
            raise ConfigError("chsh requires n_parties = 2")
        if self.functional == "distance" and (2**self.inputs) ** self.n_parties > 10**6:
            raise ConfigError("distance: too many deterministic strategies")
        for name in ("r_db", "eta", "n_th"):
            object.__setattr__(self, name, _grid(getattr(self, name), name))
        if any(r <= 0 for r in self.r_db):
            raise ConfigError("r_db values must be positive")
        if any(not 0 < e <= 1 for e in self.eta):
            raise ConfigError("eta values must lie in (0, 1]")
        if any(n < 0 for n in self.n_th):
            raise ConfigError("n_th values must be >= 0")
        labels = self.settings
        if labels is None:
            fallback = ("X", "Y", "Z") if self.inputs == 3 else ("Z", "X")
            labels = _DEFAULT_LABELS.get(self.functional, fallback)
        labels = tuple(str(v).upper() for v in labels)
        if len(labels) != self.inputs or any(v not in ("X", "Y", "Z") for v in labels):
            raise ConfigError(f"settings must list {self.inputs} labels from X, Y, Z")
        if self.functional == "cabello" and labels != ("Z", "X"):
            raise ConfigError("cabello requires settings ['Z', 'X']")
        object.__setattr__(self, "settings", labels)
        if self.y_binning not in ("aligned", "literal"):
            raise ConfigError("y_binning must be 'aligned' or 'literal'")
        for name in ("lattice_tol", "lp_tol", "bisection_tol_db"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        self.logical_state()

    def logical_state(self) -> LogicalState:
        key = self.state.lower()
        if key in ("ghz", "w"):
            return state_by_name(key, self.n_parties)
        try:
            st = LogicalState.from_json(Path(self.state))
        except OSError as exc:
            raise ConfigError(f"cannot read state file {self.state!r}: {exc}") from exc
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"invalid state file {self.state!r}: {exc}") from exc
        if st.n_parties != self.n_parties:
            raise ConfigError("state file party count disagrees with n_parties")
        return st

    def scheme(self) -> SettingScheme:
        return SettingScheme.uniform(self.n_parties, self.settings, self.y_binning)

    def to_dict(self) -> dict:
        d = asdict(self)
        for name in ("r_db", "eta", "n_th", "settings"):
            d[name] = list(d[name])
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data = dict(data)
        if "N" in data:
            data["n_parties"] = data.pop("N")
        tols = data.pop("tolerances", None) or {}
        for key, target in (("lattice", "lattice_tol"), ("lp", "lp_tol"), ("bisection_db", "bisection_tol_db")):
            if key in tols:
                data[target] = tols[key]
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path) -> "SweepConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def _functional_value(config: SweepConfig, r_db: float, eta: float, n_th: float):
    """(value, bound) of the configured functional at one parameter point."""
    params = params_from_db(r_db)
    channel = NoiseChannel(eta, n_th)
    b = assemble_behavior(config.logical_state(), config.scheme(), params, channel, config.lattice_tol)
    if config.functional == "mabk":
        res = mabk_value(b)
    elif config.functional == "cabello":
        res = cabello_value(b)
    elif config.functional == "chsh":
        res = chsh_value(b)
    else:
        d = polytope_distance(b, tol=config.lp_tol)
        if not d.optimal:
            raise ArithmeticError(f"LP status {d.status}")
        return d, 0.0
    return res.value, res.local_bound


def evaluate_point(config: SweepConfig, r_db: float, eta: float, n_th: float) -> dict:
    """One CSV row; failures are reported in the status column."""
    base = {"r_db": r_db, "eta": eta, "n_th": n_th}
    try:
        value, bound = _functional_value(config, r_db, eta, n_th)
        status = "ok"
    except (BehaviorError, ArithmeticError, ValueError) as exc:
        value, bound, status = None, 0.0, f"error: {exc}".replace("\n", " ")
    if config.functional == "distance":
        return {
            **base,
            "inputs": config.inputs,
            "distance_raw": value.distance if value is not None else math.nan,
            "distance_per_setting": value.distance_per_setting if value is not None else math.nan,
            "status": status,
        }
    if value is None:
        value = math.nan
    return {
        **base,
        "N": config.n_parties,
        "functional": config.functional,
        "value": float(value),
        "bound": float(bound),
        "violated": bool(value > bound + VIOLATION_GUARD),
        "status": status,
    }


def _eval_star(args):
    return evaluate_point(*args)


def run_sweep(config: SweepConfig, workers: int = 1) -> list[dict]:
    """Evaluate every grid point; rows sorted by (r_db, eta, n_th)."""
    points = sorted((r, e, n) for r in config.r_db for e in config.eta for n in config.n_th)
    jobs = [(config, r, e, n) for r, e, n in points]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_eval_star, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_eval_star(j) for j in jobs]
    rows.sort(key=lambda row: (row["r_db"], row["eta"], row["n_th"]))
    return rows


@dataclass(frozen=True)
class CriticalSqueezingResult:
    r_crit: float | None
    bracket: tuple[float, float] | None
    functional: str
    n_parties: int
    eta: float
    n_th: float
    status: str = "found"
    gaps: tuple = field(default=(), compare=False, repr=False)

    @property
    def found(self) -> bool:
        return self.r_crit is not None


def _margin(config: SweepConfig, r_db: float, eta: float, n_th: float) -> float:
    value, bound = _functional_value(config, r_db, eta, n_th)
    if config.functional == "distance":
        return value.distance - DISTANCE_GUARD
    return float(value - bound) - VIOLATION_GUARD


def critical_squeezing(
    config: SweepConfig,
    eta: float = 1.0,
    n_th: float = 0.0,
    r_range: tuple[float, float] = (2.0, 20.0),
    step: float = 0.25,
    tol_db: float | None = None,
) -> CriticalSqueezingResult:
    """First crossing of (value - bound) on a coarse grid, refined by bisection."""
    tol_db = config.bisection_tol_db if tol_db is None else tol_db
    lo_r, hi_r = float(r_range[0]), float(r_range[1])
    if not (0 < lo_r < hi_r) or step <= 0 or tol_db <= 0:
        raise ConfigError("need 0 < r_min < r_max, step > 0 and tol_db > 0")
    grid = _grid({"min": lo_r, "max": hi_r, "step": step}, "r_range")
    gaps = []
    prev = None
    for r in grid:
        g = _margin(config, r, eta, n_th)
        gaps.append((r, g))
        if g > 0:
            if prev is None:
                return CriticalSqueezingResult(
                    r, None, config.functional, config.n_parties, eta, n_th, "violated-at-range-start", tuple(gaps)
                )
            lo, hi = prev, r
            while hi - lo > tol_db:
                mid = 0.5 * (lo + hi)
                if _margin(config, mid, eta, n_th) > 0:
                    hi = mid
                else:
                    lo = mid
            return CriticalSqueezingResult(hi, (lo, hi), config.functional, config.n_parties, eta, n_th, "found", tuple(gaps))
        prev = r
    return CriticalSqueezingResult(None, None, config.functional, config.n_parties, eta, n_th, "none-in-range", tuple(gaps))


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_report(rows: list[dict], config: SweepConfig | None = None, csv_path=None, json_path=None) -> tuple[str, str]:
    """Render (and optionally write) the CSV detail and JSON summary."""
    if not rows:
        raise ValueError("cannot emit a report for an empty result set")
    columns = tuple(rows[0].keys())
    buf = io.StringIO()
    buf.write(f"# gkpbell {__version__} csv-schema v{CSV_SCHEMA_VERSION}: {','.join(columns)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    csv_text = buf.getvalue()

    summary = {
        "version": __version__,
        "csv_schema": CSV_SCHEMA_VERSION,
        "config": config.to_dict() if config is not None else None,
        "points": len(rows),
        "failed": sum(1 for r in rows if r.get("status", "ok") != "ok"),
    }
    if "value" in columns:
        vals = [r["value"] for r in rows if r["status"] == "ok"]
        summary["violated"] = sum(1 for r in rows if r["violated"])
        summary["max_value"] = max(vals) if vals else None
        summary["min_value"] = min(vals) if vals else None
    if "distance_raw" in columns:
        vals = [r["distance_raw"] for r in rows if r["status"] == "ok"]
        summary["max_distance_raw"] = max(vals) if vals else None
    summary["rows"] = [{c: (None if isinstance(r[c], float) and math.isnan(r[c]) else r[c]) for c in columns} for r in rows]
    json_text = json.dumps(summary, indent=1, sort_keys=True) + "\n"
    for path, text in ((csv_path, csv_text), (json_path, json_text)):
        if path is None:
            continue
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"failed writing report to {path}: {exc}") from exc
    return csv_text, json_text


def config_for(state: str, functional: str, n: int, **kwargs) -> SweepConfig:
    return SweepConfig(state=state, functional=functional, n_parties=n, **kwargs)


def heat_map(config: SweepConfig) -> np.ndarray:
    """Boolean violation grid indexed [eta, n_th] at the first r_db value."""
    r = config.r_db[0]
    out = np.zeros((len(config.eta), len(config.n_th)), dtype=bool)
    for i, e in enumerate(config.eta):
        for j, n in enumerate(config.n_th):
            out[i, j] = _margin(config, r, e, n) > 0
    return out
