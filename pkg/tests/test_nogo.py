import itertools
import time

import numpy as np

from gkpbell.nogo import (
    HADAMARD,
    IDENTITY,
    PHASE,
    SIGNED_PAULIS,
    SignedPauli,
    chsh_pauli_max,
    clifford_group,
    pauli_pair_correlator,
    verify_nogo,
)


def test_group_has_24_elements():
    g = clifford_group()
    assert len(g) == 24
    assert g[0] == IDENTITY


def test_inverse_exists_for_every_element():
    g = clifford_group()
    for a in g:
        assert any((a @ b).is_identity() for b in g)


def test_generators_act_as_expected():
    x, y, z = (SignedPauli(a, 1) for a in "XYZ")
    assert HADAMARD.conjugate_pauli(x) == z
    assert HADAMARD.conjugate_pauli(z) == x
    assert HADAMARD.conjugate_pauli(y) == SignedPauli("Y", -1)
    assert PHASE.conjugate_pauli(x) == y
    assert PHASE.conjugate_pauli(z) == z


def test_bell_pair_pauli_correlators():
    x, y, z = (SignedPauli(a, 1) for a in "XYZ")
    assert pauli_pair_correlator(x, x) == 1
    assert pauli_pair_correlator(y, y) == -1
    assert pauli_pair_correlator(z, z) == 1
    assert pauli_pair_correlator(x, z) == 0
    assert pauli_pair_correlator(SignedPauli("Z", -1), z) == -1


def test_conjugation_permutes_signed_paulis():
    for u in clifford_group():
        images = {u.conjugate_pauli(p) for p in SIGNED_PAULIS}
        assert images == set(SIGNED_PAULIS)


def test_chsh_max_for_identity_pair():
    assert chsh_pauli_max(IDENTITY, IDENTITY) == 2
    assert chsh_pauli_max(IDENTITY, HADAMARD, single_bob_observable=True) <= 2


def test_global_maximum_is_classical():
    t0 = time.perf_counter()
    rep = verify_nogo()
    assert time.perf_counter() - t0 < 60
    assert rep.global_max == 2
    assert rep.clifford_pairs == 576
    assert rep.combinations == 576 * 6**4
    assert rep.attaining_max > 0


def test_correlation_values_only_zero_or_unit():
    vals = {pauli_pair_correlator(a, b) for a, b in itertools.product(SIGNED_PAULIS, repeat=2)}
    assert vals == {-1, 0, 1}
    assert np.all(np.isin(list(vals), [-1, 0, 1]))
