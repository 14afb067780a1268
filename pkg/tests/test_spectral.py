"""Tests for diagonalization and eigenstate observables."""

import numpy as np
import pytest

from spinscramble.models import (
    EXTENDED_CLUSTER,
    RANDOM_ISING,
    ModelParams,
    build_hamiltonian,
    sample_realization,
)
from spinscramble.pauli import build_operator, cluster_k, sigma_x
from spinscramble.spectral import (
    POISSON_GAP_RATIO,
    EigenstateObservable,
    diagonalize,
    eigenstate_half_chain_ee,
    gap_ratio,
    mid_spectrum_indices,
    spin_glass_correlator,
    state_entanglement_entropies,
    string_operator,
    string_order,
    validate_spectrum,
)

from oracles import entropy_oracle, kron_pauli, ptrace_loops, random_unit_vector


def random_spectrum(L, seed, model=RANDOM_ISING, g=0.2, delta=0.0):
    params = ModelParams(model=model, L=L, g=g, delta=delta)
    real = sample_realization(params, seed=seed, index=0)
    ham = build_hamiltonian(params, real)
    return ham, diagonalize(ham)


def test_diagonalize_diagonal_matrix():
    ham = np.diag([3.0, 1.0, 2.0])
    s = diagonalize(ham)
    assert np.allclose(s.eigenvalues, [1.0, 2.0, 3.0])
    # each eigenvector picks out one axis
    assert np.allclose(np.abs(s.eigenvectors), np.eye(3)[:, [1, 2, 0]])


def test_diagonalize_residual_and_trace():
    for seed in range(4):
        ham, s = random_spectrum(6, seed, delta=1.0)
        scale = np.abs(ham).max()
        assert validate_spectrum(s, ham) < 1e-9 * scale
        assert abs(s.eigenvalues.sum() - np.trace(ham)) < 1e-8 * max(scale, 1.0)
        assert s.dimension == 64
        assert s.n_sites == 6


def test_observable_average_validation():
    values = np.array([1.0, 2.0])
    with pytest.raises(ValueError):
        EigenstateObservable(values=values, average=3.0, window="all")
    obs = EigenstateObservable(values=values, average=1.5, window="all")
    assert obs.window == "all"


def test_mid_spectrum_window():
    idx = mid_spectrum_indices(256)
    assert idx.tolist() == list(range(120, 136))
    assert mid_spectrum_indices(1024).tolist() == list(range(504, 520))
    # tiny spectra fall back to every state
    assert mid_spectrum_indices(8).tolist() == list(range(8))


def test_entanglement_matches_partial_trace_oracle():
    rng = np.random.default_rng(11)
    L = 5
    for _ in range(30):
        cut = int(rng.integers(1, L))
        state = random_unit_vector(1 << L, rng)
        mine = state_entanglement_entropies(state[:, None], L, cut)[0]
        assert abs(mine - entropy_oracle(state, list(range(cut)), L)) < 1e-9
        rho = ptrace_loops(state, list(range(cut)), L)
        assert abs(np.trace(rho).real - 1.0) < 1e-12


def test_entanglement_complement_symmetry():
    # entropy of the first c sites equals the entropy of the remaining L-c
    rng = np.random.default_rng(12)
    L = 6
    for _ in range(8):
        state = random_unit_vector(1 << L, rng)
        for cut in (1, 2, 3, 4, 5):
            mine = state_entanglement_entropies(state[:, None], L, cut)[0]
            other = entropy_oracle(state, list(range(cut, L)), L)
            assert abs(mine - other) < 1e-9


def test_entanglement_bounds_and_validation():
    rng = np.random.default_rng(13)
    L = 6
    states = np.stack([random_unit_vector(1 << L, rng) for _ in range(6)], axis=1)
    for cut in (1, 2, 3):
        ee = state_entanglement_entropies(states, L, cut)
        assert np.all(ee >= -1e-12)
        assert np.all(ee <= min(cut, L - cut) + 1e-9)
    with pytest.raises(ValueError):
        state_entanglement_entropies(states, L, 0)
    with pytest.raises(ValueError):
        state_entanglement_entropies(states, L, L)


def test_product_eigenstates_have_zero_ee():
    # field-only Hamiltonian: eigenstates are computational basis states
    from spinscramble.pauli import sigma_z

    L = 5
    rng = np.random.default_rng(14)
    terms = [(rng.uniform(0.5, 1.5), sigma_z(i, L)) for i in range(L)]
    s = diagonalize(build_operator(terms, L))
    obs = eigenstate_half_chain_ee(s)
    assert obs.values.max() < 1e-9
    assert obs.average < 1e-9
    assert obs.window == "all"


def test_cat_state_has_one_bit():
    L = 4
    state = np.zeros(1 << L)
    state[0] = state[-1] = 1.0 / np.sqrt(2.0)
    for cut in (1, 2, 3):
        ee = state_entanglement_entropies(state[:, None], L, cut)[0]
        assert abs(ee - 1.0) < 1e-12


def test_spin_glass_correlator_pure_ising():
    # bond-only chain: every eigenstate is an x-basis product state, so each
    # pair correlator has magnitude exactly 1
    L = 6
    rng = np.random.default_rng(15)
    terms = [
        (rng.uniform(0.5, 2.0), sigma_x(i, L) * sigma_x(i + 1, L))
        for i in range(L - 1)
    ]
    s = diagonalize(build_operator(terms, L))
    obs = spin_glass_correlator(s, states=np.arange(s.dimension))
    assert np.abs(obs.values - 1.0).max() < 1e-9
    assert abs(obs.average - 1.0) < 1e-9


def test_spin_glass_correlator_pure_field():
    from spinscramble.pauli import sigma_z

    L = 6
    rng = np.random.default_rng(16)
    terms = [(rng.uniform(0.5, 1.5), sigma_z(i, L)) for i in range(L)]
    s = diagonalize(build_operator(terms, L))
    obs = spin_glass_correlator(s, states=np.arange(s.dimension))
    assert obs.values.max() < 1e-12


def test_spin_glass_correlator_matches_dense_oracle():
    L = 6
    ham, s = random_spectrum(L, seed=7, delta=1.5)
    idx = mid_spectrum_indices(s.dimension)
    r = L // 2
    expected = np.zeros(len(idx))
    for i in range(L - r):
        dense = kron_pauli(L, {i: "X", i + r: "X"})
        window = s.eigenvectors[:, idx]
        expected += np.abs(np.einsum("ik,ij,jk->k", window.conj(), dense, window))
    expected /= L - r
    obs = spin_glass_correlator(s)
    assert np.abs(obs.values - expected).max() < 1e-10
    assert obs.window == "mid16"
    with pytest.raises(ValueError):
        spin_glass_correlator(s, r=L)


def test_string_operator_dense_form():
    L = 6
    op = string_operator(1, 4, L)
    dense = kron_pauli(L, {1: "X", 2: "Y", 3: "Y", 4: "X"})
    assert np.abs(op.to_matrix() - dense).max() < 1e-12
    op = string_operator(0, 5, L)
    dense = kron_pauli(L, {0: "X", 1: "Y", 2: "Z", 3: "Z", 4: "Y", 5: "X"})
    assert np.abs(op.to_matrix() - dense).max() < 1e-12
    with pytest.raises(ValueError):
        string_operator(1, 3, L)


def test_string_operator_equals_cluster_product():
    # the string between i and j is exactly the product of the cluster
    # stabilizers K_{i+1} ... K_{j-1}, including the phase
    L = 6
    for i, j in [(1, 4), (0, 5), (2, 5), (0, 3)]:
        prod = cluster_k(i + 1, L)
        for k in range(i + 2, j):
            prod = prod * cluster_k(k, L)
        op = string_operator(i, j, L)
        assert op.x_mask == prod.x_mask
        assert op.z_mask == prod.z_mask
        assert op.phase == prod.phase
        assert op == prod


def test_string_order_pure_cluster():
    # stabilizer Hamiltonian: every eigenstate has <O_st> = +/-1 exactly
    L = 6
    rng = np.random.default_rng(17)
    terms = [(rng.uniform(0.5, 1.5), cluster_k(k, L)) for k in range(1, L - 1)]
    s = diagonalize(build_operator(terms, L))
    o_st, phi_st = string_order(s, states=np.arange(s.dimension))
    assert np.abs(np.abs(o_st) - 1.0).max() < 1e-9
    assert abs(phi_st - 1.0) < 1e-9


def test_string_order_z_product_states():
    from spinscramble.pauli import sigma_z

    L = 6
    rng = np.random.default_rng(18)
    terms = [(rng.uniform(0.5, 1.5), sigma_z(i, L)) for i in range(L)]
    s = diagonalize(build_operator(terms, L))
    o_st, phi_st = string_order(s, states=np.arange(s.dimension))
    assert np.abs(o_st).max() < 1e-12
    assert phi_st < 1e-12


def test_string_order_default_endpoints():
    L = 6
    _, s = random_spectrum(L, seed=9, model=EXTENDED_CLUSTER, delta=-1.0)
    o_default, phi_default = string_order(s)
    o_explicit, phi_explicit = string_order(s, i=1, j=L - 2)
    assert np.array_equal(o_default, o_explicit)
    assert phi_default == phi_explicit
    assert np.all(np.abs(o_default) <= 1.0 + 1e-9)
    assert 0.0 <= phi_default <= 1.0 + 1e-9


def test_gap_ratio_equally_spaced():
    assert abs(gap_ratio(np.arange(10.0)) - 1.0) < 1e-12


def test_gap_ratio_degenerate_levels():
    assert gap_ratio(np.array([0.0, 1.0, 1.0, 2.0])) == 0.0
    with pytest.raises(ValueError):
        gap_ratio(np.array([0.0, 1.0]))


def test_gap_ratio_poisson_sampling():
    # uncorrelated levels: mean ratio approaches 2 ln 2 - 1
    rng = np.random.default_rng(19)
    spectra = np.sort(rng.uniform(size=(2000, 128)), axis=1)
    mean = np.mean([gap_ratio(row) for row in spectra])
    assert abs(mean - POISSON_GAP_RATIO) < 0.01


def test_half_chain_ee_on_random_realization():
    for model in (RANDOM_ISING, EXTENDED_CLUSTER):
        _, s = random_spectrum(8, seed=3, model=model, delta=0.0)
        obs = eigenstate_half_chain_ee(s)
        assert obs.values.shape == (256,)
        assert np.all(obs.values >= -1e-12)
        assert np.all(obs.values <= 4.0 + 1e-9)
        assert 0.0 < obs.average < 4.0
