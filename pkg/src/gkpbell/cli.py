"""Command-line entry point: ``gkpbell <subcommand> ...``.

Exit codes: 0 success, 1 invalid config, 2 numerical failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _summary_path(out: str | None) -> str | None:
    return None if out is None else str(Path(out).with_suffix(".json"))


def _cmd_sweep(args, force_distance: bool = False) -> int:
    from .harness import SweepConfig, emit_report, run_sweep

    config = SweepConfig.load(args.config)
    if force_distance and config.functional != "distance":
        config = replace(config, functional="distance", settings=None)
    out = args.out or config.output
    rows = run_sweep(config, workers=args.workers)
    csv_text, json_text = emit_report(rows, config)
    if args.format == "json":
        _write(json_text, out)
    else:
        _write(csv_text, out)
        if out is not None:
            Path(_summary_path(out)).write_text(json_text)
    return EXIT_OK if all(r["status"] == "ok" for r in rows) else EXIT_NUMERIC


def _cmd_critical(args) -> int:
    from .harness import SweepConfig, critical_squeezing, emit_report

    config = SweepConfig.load(args.config)
    lo, hi = min(config.r_db), max(config.r_db)
    if lo == hi:
        lo, hi = 2.0, 20.0
    rows = []
    for eta in config.eta:
        for n_th in config.n_th:
            res = critical_squeezing(config, eta, n_th, (lo, hi), args.step)
            rows.append(
                {
                    "eta": eta,
                    "n_th": n_th,
                    "N": config.n_parties,
                    "functional": config.functional,
                    "r_crit": res.r_crit if res.r_crit is not None else "none-in-range",
                    "bracket_lo": res.bracket[0] if res.bracket else "",
                    "bracket_hi": res.bracket[1] if res.bracket else "",
                    "status": res.status,
                }
            )
    csv_text, json_text = emit_report(rows, config)
    _write(json_text if args.format == "json" else csv_text, args.out)
    return EXIT_OK


def _cmd_nogo(args) -> int:
    from .nogo import verify_nogo

    t0 = time.perf_counter()
    rep = verify_nogo()
    payload = {
        "global_max_abs_chsh": rep.global_max,
        "clifford_pairs": rep.clifford_pairs,
        "combinations": rep.combinations,
        "combinations_attaining_max": rep.attaining_max,
        "seconds": round(time.perf_counter() - t0, 3),
    }
    if args.format == "json":
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    else:
        text = "".join(f"{k},{v}\n" for k, v in payload.items())
    _write(text, args.out)
    return EXIT_OK if rep.global_max == 2 else EXIT_NUMERIC


def _cmd_oracle(args) -> int:
    from .homodyne import MeasurementSetting
    from .lattice import NoiseChannel
    from .oracle import compare_with_series

    settings = [MeasurementSetting.from_label(lab) for lab in ("Z", "Y", "X")]
    lines = ["r_db,eta,n_th,setting,period,max_deviation,tol,result"]
    ok = True
    for r in args.r_db:
        for eta in args.eta:
            for n_th in args.n_th if eta < 1 else [0.0]:
                for c in compare_with_series(r, settings, NoiseChannel(eta, n_th)):
                    dev = c.max_deviation
                    passed = dev < args.tol
                    ok &= passed
                    lines.append(
                        f"{r!r},{eta!r},{n_th!r},{c.label},{c.period!r},{dev:.3e},{args.tol:.1e},{'pass' if passed else 'FAIL'}"
                    )
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gkpbell", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gkpbell {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="JSON config file")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    common(sub.add_parser("sweep", help="evaluate a functional over a parameter grid"))
    p = sub.add_parser("critical-squeezing", help="smallest squeezing with a violation")
    common(p)
    p.add_argument("--step", type=float, default=0.25, help="coarse scan step in dB")
    common(sub.add_parser("distance", help="distance to the local polytope over a grid"))
    common(sub.add_parser("verify-nogo", help="exhaustive Clifford/Pauli CHSH enumeration"), False)
    p = sub.add_parser("oracle-check", help="compare erf-series overlaps with the Fock oracle")
    common(p, False)
    p.add_argument("--r-db", type=float, nargs="+", default=[5.0, 10.0])
    p.add_argument("--eta", type=float, nargs="+", default=[1.0])
    p.add_argument("--n-th", type=float, nargs="+", default=[0.0])
    p.add_argument("--tol", type=float, default=1e-6)
    return parser


def main(argv=None) -> int:
    from .behavior import BehaviorError
    from .harness import ConfigError

    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    handlers = {
        "sweep": _cmd_sweep,
        "critical-squeezing": _cmd_critical,
        "distance": lambda a: _cmd_sweep(a, force_distance=True),
        "verify-nogo": _cmd_nogo,
        "oracle-check": _cmd_oracle,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BehaviorError, ArithmeticError, RuntimeError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: I/O: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
