"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import itertools
import math
import time

import numpy as np
import pytest

from gkpbell.behavior import Behavior, SettingScheme, assemble_behavior
from gkpbell.bell import cabello_value, mabk_value
from gkpbell.homodyne import DIAGONAL_PERIOD, MeasurementSetting, overlap_table
from gkpbell.lattice import SQRT_PI, NoiseChannel, params_from_db, pauli_trace
from gkpbell.logical import ghz_coefficients, w_coefficients
from gkpbell.nogo import verify_nogo
from gkpbell.oracle import compare_with_series
from gkpbell.polytope import enumerate_deterministic_behaviors, polytope_distance, vertex_behavior

GRID_DB = [2.0 + 0.25 * i for i in range(73)]  # 2 .. 20 dB


@pytest.fixture
def report(capsys):
    def _report(tag, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {tag}: {detail}")
        assert ok, f"{tag}: {detail}"

    return _report


def _ghz_mabk(r, n=3, channel=NoiseChannel()):
    b = assemble_behavior(ghz_coefficients(n), SettingScheme.uniform(n, "YX"), params_from_db(r), channel)
    return b, mabk_value(b).value


def _w_cabello(r, n=3, channel=NoiseChannel()):
    b = assemble_behavior(w_coefficients(n), SettingScheme.uniform(n, "ZX"), params_from_db(r), channel)
    return b, cabello_value(b).value


def _oracle_settings():
    # theta = 0, pi/4 (both diagonal bin widths), pi/2
    return [
        MeasurementSetting.from_label("Z"),
        MeasurementSetting(math.pi / 4, period=SQRT_PI),
        MeasurementSetting.from_label("Y"),
        MeasurementSetting.from_label("X"),
    ]


def test_c01_oracle_equivalence_lossless(report):
    t0 = time.perf_counter()
    worst = 0.0
    for r in (5.0, 10.0, 15.0):
        for c in compare_with_series(r, _oracle_settings()):
            worst = max(worst, c.max_deviation)
    dt = time.perf_counter() - t0
    report("C1 oracle equivalence (eta=1)", worst < 1e-6 and dt < 120, f"max dev {worst:.2e} < 1e-6, {dt:.1f} s")


def test_c02_oracle_equivalence_loss_thermal(report):
    t0 = time.perf_counter()
    worst = 0.0
    for n_th in (0.0, 0.1):
        for r in (5.0, 10.0, 15.0):
            for c in compare_with_series(r, _oracle_settings(), NoiseChannel(0.8, n_th)):
                worst = max(worst, c.max_deviation)
    dt = time.perf_counter() - t0
    report("C2 oracle equivalence (eta=0.8)", worst < 1e-5 and dt < 300, f"max dev {worst:.2e} < 1e-5, {dt:.1f} s")


def test_c03_trace_sum_rules(report):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        theta = rng.uniform(0, 2 * math.pi)
        r, eta, n_th = rng.uniform(1, 20), rng.uniform(0.3, 1.0), rng.uniform(0, 1.0)
        period = rng.choice([SQRT_PI, DIAGONAL_PERIOD])
        p = params_from_db(r)
        t = overlap_table(MeasurementSetting(theta, period=period), p, NoiseChannel(eta, n_th)).t
        for k in range(4):
            worst = max(worst, abs(t[k].sum() - pauli_trace(k, p)))
    report("C3 trace sum rules", worst < 1e-10, f"max |t0+t1-tr| {worst:.2e} over 100 points")


def test_c04_behavior_sanity(report):
    rng = np.random.default_rng(7)
    worst = {"normalization": 0.0, "negativity": 0.0, "no_signaling": 0.0}
    for _ in range(50):
        r, eta, n_th = rng.uniform(1, 20), rng.uniform(0.3, 1.0), rng.uniform(0, 1.0)
        angles = rng.uniform(0, 2 * math.pi, size=(3, 2))
        scheme = SettingScheme(tuple(tuple(MeasurementSetting(a) for a in row) for row in angles))
        for state in (ghz_coefficients(3), w_coefficients(3)):
            b = assemble_behavior(state, scheme, params_from_db(r), NoiseChannel(eta, n_th), validate=False)
            for key, v in b.check().items():
                worst[key] = max(worst[key], v)
    ok = all(v <= 1e-9 for v in worst.values())
    report("C4 behavior sanity", ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_c05_ideal_limit(report):
    _, s_m = _ghz_mabk(20.0)
    _, s_c = _w_cabello(20.0)
    ok = abs(s_m - 4) < 1e-2 and abs(s_c - 0.25) < 1e-3
    report("C5 ideal limit", ok, f"GHZ3 MABK {s_m:.6f} (4), W3 Cabello {s_c:.6f} (0.25)")


@pytest.fixture(scope="module")
def threshold_scan():
    ghz = [(r, *_ghz_mabk(r)) for r in GRID_DB]
    w = [(r, *_w_cabello(r)) for r in GRID_DB]
    return {"ghz": ghz, "w": w}


def _crossings(gaps):
    signs = [g > 1e-10 for g in gaps]
    return sum(a != b for a, b in zip(signs, signs[1:])), signs


def _first_violation(rows, bound):
    return next(r for r, _, v in rows if v - bound > 1e-10)


def test_c06_violation_thresholds(report, threshold_scan):
    n_m, _ = _crossings([v - 2 for _, _, v in threshold_scan["ghz"]])
    n_c, _ = _crossings([v for _, _, v in threshold_scan["w"]])
    ok = n_m == 1 and n_c == 1
    detail = f"sign changes MABK {n_m}, Cabello {n_c}"
    if ok:
        r_g = _first_violation(threshold_scan["ghz"], 2)
        r_w = _first_violation(threshold_scan["w"], 0)
        ok = r_w < r_g
        detail += f"; grid r_crit W {r_w} dB < GHZ {r_g} dB"
    report("C6 violation thresholds", ok, detail)


def test_c07_scaling_with_n(report):
    mabk = {n: _ghz_mabk(15.0, n)[1] for n in range(3, 8)}
    cab = {n: _w_cabello(15.0, n)[1] for n in range(3, 8)}
    above = all(mabk[n] > 2 ** (n // 2) for n in mabk)
    c_vals = [cab[n] for n in range(3, 8)]
    grows = all(v > 0 for v in c_vals) and all(a < b for a, b in zip(c_vals, c_vals[1:]))
    detail = "MABK " + " ".join(f"N{n}={v:.4f}/{2 ** (n // 2)}" for n, v in mabk.items())
    detail += "; Cabello " + " ".join(f"N{n}={v:.4f}" for n, v in cab.items())
    report("C7 scaling with N", above and grows, detail)


def test_c08_nogo_exact(report):
    t0 = time.perf_counter()
    rep = verify_nogo()
    dt = time.perf_counter() - t0
    ok = rep.global_max == 2 and rep.clifford_pairs == 576 and dt < 60
    report("C8 no-go", ok, f"max |S| = {rep.global_max} over {rep.combinations} combinations, {dt:.1f} s")


def test_c09_polytope_geometry(report, threshold_scan):
    rng = np.random.default_rng(99)
    worst_local = 0.0
    for inputs in (2, 3):
        v = enumerate_deterministic_behaviors(3, inputs)
        for _ in range(20):
            w = rng.dirichlet(np.full(v.shape[1], 0.2))
            d = polytope_distance(Behavior.from_vector(v @ w, 3, inputs))
            assert d.optimal
            worst_local = max(worst_local, d.distance)
    # every behavior certified as violating in the threshold scan lies outside
    min_viol = math.inf
    for key, bound in (("ghz", 2), ("w", 0)):
        for r, b, val in threshold_scan[key]:
            if val - bound > 1e-10:
                min_viol = min(min_viol, polytope_distance(b).distance)
    # 3-input W plateau at high squeezing
    plateau = []
    for r in (16.0, 18.0, 20.0, 22.0, 24.0):
        b = assemble_behavior(w_coefficients(3), SettingScheme.uniform(3, "XYZ"), params_from_db(r))
        plateau.append(polytope_distance(b))
    raw = np.array([d.distance for d in plateau])
    per = np.array([d.distance_per_setting for d in plateau])
    flat = raw.max() - raw.min() < 0.05
    raw_match = bool(np.all(np.abs(raw - 2) < 0.05))
    per_match = bool(np.all(np.abs(per - 2) < 0.05))
    ok = worst_local <= 1e-8 and min_viol > 0 and flat and (raw_match or per_match)
    detail = (
        f"local max D {worst_local:.1e}; min D on violating points {min_viol:.3e}; "
        f"W3 plateau raw {raw.mean():.6f} (matches 2: {raw_match}), "
        f"per-setting {per.mean():.6f} (matches 2: {per_match})"
    )
    report("C9 polytope geometry", ok, detail)


def test_c10_lhv_bounds_exact(report):
    worst = {}
    for n in (3, 4):
        m_max, c_max = None, None
        for strategy in itertools.product(range(4), repeat=n):
            v = vertex_behavior(strategy, 2, tag="ZX")
            m = mabk_value(v, exact=True).value
            c = cabello_value(v, exact=True).value
            m_max = m if m_max is None else max(m_max, m)
            c_max = c if c_max is None else max(c_max, c)
        worst[n] = (m_max, c_max)
    ok = all(m <= 2 ** (n // 2) and c <= 0 for n, (m, c) in worst.items())
    detail = "; ".join(f"N={n}: max MABK {m} <= {2 ** (n // 2)}, max Cabello {c} <= 0" for n, (m, c) in worst.items())
    report("C10 LHV bounds on vertices", ok, detail)


def test_c11_heat_map_monotone(report):
    t0 = time.perf_counter()
    etas = np.round(np.linspace(0.5, 1.0, 11), 10)
    nths = np.round(np.linspace(0.0, 0.5, 11), 10)
    viol = np.zeros((etas.size, nths.size), dtype=bool)
    for i, eta in enumerate(etas):
        for j, n_th in enumerate(nths):
            viol[i, j] = _ghz_mabk(12.0, 3, NoiseChannel(float(eta), float(n_th)))[1] - 2 > 1e-10
    ok = True
    for i, j in zip(*np.nonzero(viol)):
        if not viol[i:, : j + 1].all():
            ok = False
    dt = time.perf_counter() - t0
    detail = f"{viol.sum()}/{viol.size} violated cells, monotone {ok}, {dt:.1f} s"
    report("C11 heat map monotone", ok and 0 < viol.sum() < viol.size and dt < 900, detail)
