import itertools

import numpy as np
import pytest
from qubit_oracle import dense_coefficients, ghz_vector, w_vector

from gkpbell.logical import (
    LogicalState,
    from_density_matrix,
    ghz_coefficients,
    pauli_string_matrix,
    w_coefficients,
)


def test_ghz2_matches_bell_pair_correlators():
    c = ghz_coefficients(2)
    assert c.coefficient("11") == 1.0
    assert c.coefficient("22") == -1.0
    assert c.coefficient("33") == 1.0
    for k in ("12", "13", "21", "23", "31", "32", "10", "01", "30"):
        assert c.coefficient(k) == 0.0


def test_ghz3_xxx():
    assert ghz_coefficients(3).coefficient("111") == 1.0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_analytic_tables_match_dense_traces(n):
    g = ghz_coefficients(n)
    w = w_coefficients(n)
    assert np.abs(g.coeffs - dense_coefficients(ghz_vector(n))).max() < 1e-14
    assert np.abs(w.coeffs - dense_coefficients(w_vector(n))).max() < 1e-14
    assert np.count_nonzero(g.coeffs) == 2**n


def test_w3_single_party_z():
    w = w_coefficients(3)
    assert w.coefficient("300") == pytest.approx(1 / 3)
    assert w.coefficient("000") == 1.0


@pytest.mark.parametrize("n", [3, 4, 5])
def test_w_permutation_symmetric(n):
    c = w_coefficients(n).coeffs
    for perm in itertools.permutations(range(n)):
        assert np.array_equal(c, c.transpose(perm))


def test_tables_are_real_and_bounded():
    for n in range(2, 8):
        for s in (ghz_coefficients(n), w_coefficients(n)):
            assert s.coeffs.dtype == np.float64
            assert np.abs(s.coeffs).max() <= 1.0


def test_maximally_mixed_state():
    s = from_density_matrix(np.eye(8) / 8)
    assert s.nonzero() == {"000": 1.0}


def test_bell_pair_density_matrix_reproduces_ghz2():
    phi = ghz_vector(2)
    s = from_density_matrix(np.outer(phi, phi.conj()))
    assert np.abs(s.coeffs - ghz_coefficients(2).coeffs).max() < 1e-15


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_density_matrix_round_trip(n):
    rng = np.random.default_rng(n)
    dim = 2**n
    a = rng.normal(size=(dim, 3)) + 1j * rng.normal(size=(dim, 3))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    s = from_density_matrix(rho)
    assert np.abs(s.density_matrix() - rho).max() < 1e-12
    # explicit reconstruction from the Pauli expansion
    if n <= 3:
        recon = sum(
            s.coeffs[k] * pauli_string_matrix(k) for k in itertools.product(range(4), repeat=n)
        ) / dim
        assert np.abs(recon - rho).max() < 1e-12


def test_density_matrix_validation():
    with pytest.raises(ValueError, match="Hermitian"):
        from_density_matrix(np.array([[0.5, 0.2], [0.0, 0.5]]))
    with pytest.raises(ValueError, match="trace"):
        from_density_matrix(np.eye(2))
    with pytest.raises(ValueError, match="positive"):
        from_density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError, match="power of two"):
        from_density_matrix(np.eye(3) / 3)


def test_logical_state_invariants_enforced():
    c = np.zeros((4, 4))
    with pytest.raises(ValueError, match="identity"):
        LogicalState(2, c)
    c[0, 0] = 1.0
    c[1, 1] = 1.5
    with pytest.raises(ValueError, match=r"\|c\|"):
        LogicalState(2, c)
    c[1, 1] = 1.0
    c[2, 2] = 1.0
    c[3, 3] = 1.0  # XX = YY = ZZ = +1 has a negative eigenvalue
    with pytest.raises(ValueError, match="PSD"):
        LogicalState(2, c)
    with pytest.raises(ValueError, match="shape"):
        LogicalState(2, np.ones(4))


def test_party_count_limits():
    for bad in (1, 13):
        with pytest.raises(ValueError):
            ghz_coefficients(bad)
        with pytest.raises(ValueError):
            w_coefficients(bad)


def test_json_round_trip(tmp_path):
    for s in (ghz_coefficients(3), w_coefficients(4)):
        text = s.to_json()
        back = LogicalState.from_json(text)
        assert np.array_equal(back.coeffs, s.coeffs)
        path = tmp_path / "state.json"
        s.to_json(path)
        assert np.array_equal(LogicalState.from_json(path).coeffs, s.coeffs)
    data = ghz_coefficients(2).to_dict()
    assert data["n"] == 2
    assert {"k": "22", "c": -1.0} in data["coeffs"]


def test_json_rejects_bad_strings():
    with pytest.raises(ValueError):
        LogicalState.from_dict({"n": 2, "coeffs": [{"k": "00", "c": 1.0}, {"k": "4", "c": 0.1}]})
    with pytest.raises(ValueError):
        LogicalState.from_dict({"coeffs": []})


def test_large_n_tables_skip_dense_psd_check():
    s = ghz_coefficients(12)
    assert s.coeffs.shape == (4,) * 12
    assert s.coefficient("1" * 12) == 1.0
    assert s.coefficient("2" * 12) == 1.0  # Re(i^12)
