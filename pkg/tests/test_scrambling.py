"""Tests for channel states, operator entanglement, TMI, and Haar baseline."""

import json

import numpy as np
import pytest

from spinscramble.models import (
    EXTENDED_CLUSTER,
    RANDOM_ISING,
    ModelParams,
    build_hamiltonian,
    sample_realization,
)
from spinscramble.scrambling import (
    SATURATION_WINDOW,
    ChannelState,
    Partition,
    TmiResult,
    channel_state,
    haar_random_unitary,
    haar_reference,
    partition_from_tag,
    saturation_tmi,
    subsystem_oee,
    tmi,
    tmi_doubled_space,
    tmi_series,
)
from spinscramble.spectral import diagonalize

from oracles import doubled_space_vector, entropy_oracle


def spectrum_for(L, seed, model=RANDOM_ISING, g=0.2, delta=0.0):
    params = ModelParams(model=model, L=L, g=g, delta=delta)
    real = sample_realization(params, seed=seed, index=0)
    return diagonalize(build_hamiltonian(params, real))


def test_partition_constructors():
    half = Partition.equal_half(8)
    assert (half.l_a, half.l_b, half.l_c, half.l_d) == (4, 4, 4, 4)
    assert half.scheme == "equal-half"
    two = Partition.two_site(10)
    assert (two.l_a, two.l_c, two.l_d) == (2, 8, 2)
    rp = Partition.r_partition(10, 3)
    assert (rp.l_a, rp.l_c, rp.l_d) == (3, 7, 3)
    assert rp.scheme == "r=3"
    for tag, L in [("equal-half", 8), ("two-site", 10), ("r=4", 10)]:
        part = partition_from_tag(tag, L)
        assert part.scheme == tag
    with pytest.raises(ValueError):
        Partition.equal_half(7)
    with pytest.raises(ValueError):
        Partition.r_partition(10, 1)
    with pytest.raises(ValueError):
        Partition.r_partition(10, 6)
    with pytest.raises(ValueError):
        Partition(L=4, l_a=0, l_c=2, scheme="equal-half")
    with pytest.raises(ValueError):
        partition_from_tag("thirds", 9)


def test_channel_state_time_zero_is_identity():
    s = spectrum_for(4, seed=0)
    cs = channel_state(s, 0.0)
    expected = np.eye(16) / 4.0
    assert np.abs(cs.matrix - expected).max() < 1e-12


def test_channel_state_norm_and_shape():
    s = spectrum_for(5, seed=1, delta=2.0)
    for t in (0.3, 7.0, 1e6, 1e10):
        cs = channel_state(s, t)
        assert cs.matrix.shape == (32, 32)
        assert abs(np.linalg.norm(cs.matrix) - 1.0) < 1e-10
        vec = cs.doubled_vector()
        assert vec.shape == (1024,)
        assert abs(np.linalg.norm(vec) - 1.0) < 1e-10


def test_channel_state_matches_doubled_space_oracle():
    import scipy.linalg

    s = spectrum_for(3, seed=2, delta=1.0)
    ham = s.eigenvectors @ np.diag(s.eigenvalues) @ s.eigenvectors.T
    unitary = scipy.linalg.expm(-5j * ham)
    expected = doubled_space_vector(unitary)
    cs = channel_state(s, 5.0)
    assert np.abs(cs.doubled_vector() - expected).max() < 1e-12
    # the map does not depend on which real orthonormal basis is summed over
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.standard_normal((8, 8)))
    assert np.abs(doubled_space_vector(unitary, basis=q) - expected).max() < 1e-12


def test_oee_time_zero_values():
    s = spectrum_for(6, seed=4)
    cs = channel_state(s, 0.0)
    part = Partition.equal_half(6)
    assert abs(subsystem_oee(cs, part, "A") - 3.0) < 1e-9
    assert abs(subsystem_oee(cs, part, "AC")) < 1e-9
    assert abs(subsystem_oee(cs, part, "AD") - 6.0) < 1e-9
    two = Partition.two_site(6)
    assert abs(subsystem_oee(cs, two, "A") - 2.0) < 1e-9
    assert abs(subsystem_oee(cs, two, "AD") - 4.0) < 1e-9
    assert abs(subsystem_oee(cs, two, "AC") - 2.0) < 1e-9


def test_oee_validation():
    s = spectrum_for(4, seed=5)
    cs = channel_state(s, 1.0)
    part = Partition.equal_half(4)
    with pytest.raises(ValueError):
        subsystem_oee(cs, part, "")
    with pytest.raises(ValueError):
        subsystem_oee(cs, part, "ABCD")
    with pytest.raises(ValueError):
        subsystem_oee(cs, part, "AE")
    with pytest.raises(ValueError):
        subsystem_oee(cs, Partition.equal_half(6), "A")


def test_oee_matches_loop_oracle():
    # fast reshape/Gram path against the explicit doubled-space partial trace
    s = spectrum_for(3, seed=6, delta=1.5)
    part = Partition(L=3, l_a=1, l_c=2, scheme="r=1")
    sites = {"A": [0], "B": [1, 2], "C": [3, 4], "D": [5]}
    rng = np.random.default_rng(7)
    for _ in range(5):
        cs = channel_state(s, float(rng.uniform(0.5, 20.0)))
        vec = cs.doubled_vector()
        for which in ("A", "B", "CD", "AC", "AD", "ACD", "BD"):
            keep = sorted(sum((sites[x] for x in which), []))
            expected = entropy_oracle(vec, keep, 6)
            assert abs(subsystem_oee(cs, part, which) - expected) < 1e-9


def test_infinite_temperature_marginals():
    # unitarity pins every single-subsystem marginal at maximal entropy
    for model, L in ((RANDOM_ISING, 6), (EXTENDED_CLUSTER, 5)):
        s = spectrum_for(L, seed=8, model=model, delta=-1.0)
        part = Partition(L=L, l_a=2, l_c=L - 2, scheme="two-site")
        for t in (0.7, 13.0, 4e5):
            cs = channel_state(s, t)
            for letter, size in (
                ("A", part.l_a), ("B", part.l_b), ("C", part.l_c), ("D", part.l_d)
            ):
                assert abs(subsystem_oee(cs, part, letter) - size) < 1e-9
            assert abs(
                subsystem_oee(cs, part, "ACD") - subsystem_oee(cs, part, "B")
            ) < 1e-9
            assert abs(subsystem_oee(cs, part, "CD") - L) < 1e-9


def test_tmi_time_zero_is_zero():
    for model in (RANDOM_ISING, EXTENDED_CLUSTER):
        s = spectrum_for(6, seed=9, model=model, delta=2.0)
        cs = channel_state(s, 0.0)
        for part in (
            Partition.equal_half(6),
            Partition.two_site(6),
            Partition.r_partition(6, 3),
        ):
            assert abs(tmi(cs, part).i3) < 1e-9


def test_tmi_fast_matches_definition_mode():
    rng = np.random.default_rng(10)
    for L in (4, 5):
        s = spectrum_for(L, seed=L, delta=-1.0)
        for _ in range(4):
            cs = channel_state(s, float(rng.uniform(0.5, 50.0)))
            part = Partition(L=L, l_a=2, l_c=int(rng.integers(1, L)), scheme="ad-hoc")
            fast = tmi(cs, part)
            slow = tmi_doubled_space(cs, part)
            assert abs(fast.i3 - slow.i3) < 1e-9
            assert abs(fast.i_ac - slow.i_ac) < 1e-9
            assert abs(fast.i_ad - slow.i_ad) < 1e-9
            assert abs(fast.i_acd - slow.i_acd) < 1e-9


def test_tmi_definition_mode_guard():
    s = spectrum_for(7, seed=11)
    cs = channel_state(s, 1.0)
    with pytest.raises(ValueError):
        tmi_doubled_space(cs, Partition(L=7, l_a=2, l_c=3, scheme="x"))


def test_bmi_nonnegative_along_series():
    s = spectrum_for(6, seed=12, delta=3.0)
    part = Partition.equal_half(6)
    for t in np.logspace(-1, 9, 12):
        res = tmi(channel_state(s, t), part)
        assert res.i_ac >= -1e-9
        assert res.i_ad >= -1e-9
        assert res.i_acd >= -1e-9
    with pytest.raises(ValueError):
        TmiResult(
            i_ac=-1.0, i_ad=0.0, i_acd=0.0, i3=-1.0, i3_normalized=None,
            time=0.0, partition=part,
        )


def test_haar_unitary_properties():
    rng = np.random.default_rng(13)
    u = haar_random_unitary(32, rng)
    assert np.abs(u @ u.conj().T - np.eye(32)).max() < 1e-10
    # deterministic under a fixed stream
    u2 = haar_random_unitary(32, np.random.default_rng(13))
    assert np.array_equal(u, u2)


def test_haar_reference_sign_and_growth():
    means = []
    for L in (4, 6, 8):
        mean, stderr = haar_reference(L, Partition.equal_half(L), n_samples=10, seed=5)
        assert mean < 0.0
        assert stderr > 0.0
        means.append(mean)
    assert abs(means[1]) > abs(means[0])
    assert abs(means[2]) > abs(means[1])


def test_haar_reference_determinism_and_cache(tmp_path):
    part = Partition.equal_half(4)
    first = haar_reference(4, part, n_samples=6, seed=21)
    again = haar_reference(4, part, n_samples=6, seed=21)
    assert first == again
    cache = tmp_path / "haar.json"
    cached = haar_reference(4, part, n_samples=6, seed=21, cache_path=str(cache))
    assert cached == first
    data = json.loads(cache.read_text())
    assert data["4:2:2"]["n_samples"] == 6
    # a cache hit must not resample
    data["4:2:2"]["mean"] = -123.0
    cache.write_text(json.dumps(data))
    poisoned = haar_reference(4, part, n_samples=6, seed=21, cache_path=str(cache))
    assert poisoned[0] == -123.0
    # mismatched settings are recomputed and overwrite the entry
    fresh = haar_reference(4, part, n_samples=8, seed=21, cache_path=str(cache))
    assert fresh[0] != -123.0
    assert json.loads(cache.read_text())["4:2:2"]["n_samples"] == 8
    with pytest.raises(ValueError):
        haar_reference(4, part, n_samples=1, seed=21)


def test_haar_tmi_is_large_and_negative_at_l8():
    rng = np.random.default_rng(14)
    u = haar_random_unitary(256, rng)
    cs = ChannelState(matrix=u / 16.0, L=8, time=0.0)
    res = tmi(cs, Partition.equal_half(8))
    assert res.i3 < -4.0  # order L bits


def test_tmi_series_normalization_and_units():
    s = spectrum_for(4, seed=15, delta=2.0)
    part = Partition.equal_half(4)
    times = np.array([0.0, 1.0, 10.0])
    haar_mean = -2.0
    series = tmi_series(s, part, times, time_scale=0.5, haar_mean=haar_mean)
    assert [res.time for res in series] == [0.0, 1.0, 10.0]
    assert abs(series[0].i3_normalized) < 1e-9
    direct = tmi(channel_state(s, 5.0), part)
    assert abs(series[2].i3 - direct.i3) < 1e-12
    assert abs(series[2].i3_normalized - direct.i3 / haar_mean) < 1e-12
    with pytest.raises(ValueError):
        tmi_series(s, part, np.array([1.0, 1.0]))


def test_saturation_window_protocol():
    assert SATURATION_WINDOW.shape == (10,)
    assert abs(SATURATION_WINDOW[0] - 1e9) < 1.0
    assert abs(SATURATION_WINDOW[-1] - 1e10) < 10.0
    s = spectrum_for(4, seed=16, delta=3.0)
    part = Partition.equal_half(4)
    raw, normalized = saturation_tmi(s, part, time_scale=0.5, haar_mean=-2.0)
    expected = np.mean(
        [tmi(channel_state(s, t * 0.5), part).i3 for t in SATURATION_WINDOW]
    )
    assert abs(raw - expected) < 1e-12
    assert abs(normalized - raw / -2.0) < 1e-12
    raw_only, none_norm = saturation_tmi(s, part)
    assert none_norm is None
