import itertools
from fractions import Fraction

import numpy as np
import pytest

from gkpbell.behavior import Behavior, SettingScheme, assemble_behavior
from gkpbell.bell import cabello_value, chsh_value, mabk_coefficients, mabk_value
from gkpbell.homodyne import MeasurementSetting
from gkpbell.lattice import params_from_db
from gkpbell.logical import ghz_coefficients, w_coefficients
from gkpbell.polytope import vertex_behavior


def test_mabk_two_party_coefficients():
    c = mabk_coefficients(2)
    h = Fraction(1, 2)
    assert c.alpha == {(0, 0): h, (0, 1): h, (1, 0): h, (1, 1): -h}
    assert c.alpha_prime == {(0, 0): -h, (0, 1): h, (1, 0): h, (1, 1): h}


def test_mabk_three_party_coefficients():
    c = mabk_coefficients(3)
    # B_3 = (A'BC + AB'C + ABC' - A'B'C') / 2
    h = Fraction(1, 2)
    assert c.alpha == {(1, 0, 0): h, (0, 1, 0): h, (0, 0, 1): h, (1, 1, 1): -h}


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_primed_polynomial_is_relabelled_original(n):
    # swapping A <-> A' for every party maps B_n to +-B'_n
    c = mabk_coefficients(n)
    swapped = {tuple(1 - v for v in x): a for x, a in c.alpha.items()}
    neg = {x: -a for x, a in c.alpha_prime.items()}
    assert swapped in (c.alpha_prime, neg)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_lhv_maximum_of_b_is_one(n):
    c = mabk_coefficients(n)
    best = 0
    for signs in itertools.product((1, -1), repeat=2 * n):
        val = sum(a * np.prod([signs[2 * j + xj] for j, xj in enumerate(x)]) for x, a in c.alpha.items())
        best = max(best, abs(val))
    assert best == 1


def _vertices(n):
    for strategy in itertools.product(range(4), repeat=n):
        yield vertex_behavior(strategy, 2, tag="ZX")


@pytest.mark.parametrize("n", [2, 3])
def test_deterministic_vertices_respect_bounds(n):
    for v in _vertices(n):
        assert mabk_value(v, exact=True).value <= 2 ** (n // 2)
        assert cabello_value(v, exact=True).value <= 0


def test_mabk_at_two_parties_contains_chsh():
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = rng.random((2, 2, 2, 2))
        p /= p.sum(axis=(0, 1), keepdims=True)
        b = Behavior(2, 2, p)
        res = mabk_value(b)
        chsh = chsh_value(b).value
        # the B branch is CHSH / 2; S keeps the larger of the two CHSH variants
        assert 2 * abs(res.detail["B"]) == pytest.approx(chsh, abs=1e-14)
        assert res.value >= chsh - 1e-14


@pytest.mark.parametrize("r", [15.0, 20.0])
def test_ghz3_mabk_near_maximal(r):
    b = assemble_behavior(ghz_coefficients(3), SettingScheme.uniform(3, "YX"), params_from_db(r))
    res = mabk_value(b)
    assert res.local_bound == 2
    assert res.value == pytest.approx(4.0, abs=1e-2)
    assert res.violated


def test_w3_cabello_near_quarter():
    b = assemble_behavior(w_coefficients(3), SettingScheme.uniform(3, "ZX"), params_from_db(20.0))
    res = cabello_value(b)
    assert res.value == pytest.approx(0.25, abs=1e-3)
    assert res.violated


def test_mabk_grows_with_squeezing():
    vals = [
        mabk_value(assemble_behavior(ghz_coefficients(3), SettingScheme.uniform(3, "YX"), params_from_db(r))).value
        for r in (3.0, 5.0, 8.0, 12.0)
    ]
    assert vals == sorted(vals)


def test_chsh_bounded_for_pauli_aligned_settings():
    # Pauli-aligned settings on a Bell pair never exceed the classical bound
    state = ghz_coefficients(2)
    p = params_from_db(20.0)
    for a in itertools.product("XYZ", repeat=2):
        for b_ in itertools.product("XYZ", repeat=2):
            row_a = tuple(MeasurementSetting.from_label(v) for v in a)
            row_b = tuple(MeasurementSetting.from_label(v) for v in b_)
            beh = assemble_behavior(state, SettingScheme((row_a, row_b)), p)
            assert chsh_value(beh).value <= 2 + 1e-3


def test_exact_mode_returns_fractions():
    v = vertex_behavior((1, 2, 3), 2, tag="ZX")
    assert isinstance(mabk_value(v, exact=True).value, Fraction)
    assert isinstance(cabello_value(v, exact=True).value, Fraction)


def test_input_checks():
    three = Behavior(2, 3, np.full((2, 2, 3, 3), 0.25))
    with pytest.raises(ValueError):
        mabk_value(three)
    with pytest.raises(ValueError):
        chsh_value(three)
    with pytest.raises(ValueError, match="ZX"):
        cabello_value(vertex_behavior((0, 0, 0), 2, tag="XZ"))
    with pytest.raises(ValueError):
        mabk_coefficients(1)
    assert cabello_value(vertex_behavior((0, 0, 0), 2), require_tag=False).value <= 0
