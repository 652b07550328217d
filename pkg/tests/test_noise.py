import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from hubnet import _kernels
from hubnet.noise import NoiseOracle, derive_seed, mix64


def test_determinism_same_seed():
    a = NoiseOracle(42)
    b = NoiseOracle(42)
    nodes = np.arange(1000, dtype=np.uint64)
    assert np.array_equal(a.uniform(nodes, 17), b.uniform(nodes, 17))
    assert np.array_equal(a.symbols(5, 1000), b.symbols(5, 1000))
    assert np.array_equal(a.uniform_states(1000), b.uniform_states(1000))


def test_different_seeds_differ():
    a = NoiseOracle(1).symbols(0, 4096)
    b = NoiseOracle(2).symbols(0, 4096)
    assert not np.array_equal(a, b)


def test_numpy_numba_bit_equality():
    seed = 987654321
    o = NoiseOracle(seed)
    nodes = np.arange(64, dtype=np.uint64)
    u_np = o.uniform(nodes, np.uint64(9))
    u_nb = np.array([
        _kernels.uniform(np.uint64(seed), np.uint64(i), np.uint64(9))
        for i in range(64)
    ])
    assert np.array_equal(u_np, u_nb)
    cum = np.array([0.25, 0.5, 0.75, 1.0])
    s_np = o.symbols(9, 64)
    s_nb = np.array([
        _kernels.symbol(np.uint64(seed), np.uint64(i), np.uint64(9), cum)
        for i in range(64)
    ])
    assert np.array_equal(s_np, s_nb)
    assert np.array_equal(o.uniform_states(64), _kernels.star_init(seed, 64))


def test_symbol_frequencies_uniform():
    o = NoiseOracle(7)
    syms = o.symbols(0, 1_000_000)
    freqs = np.bincount(syms, minlength=4) / syms.size
    assert np.all(np.abs(freqs - 0.25) <= 0.002)


def test_symbol_independence_chi_square():
    # joint distribution of consecutive-time symbol pairs for one node
    o = NoiseOracle(11)
    n = 100_000
    nodes = np.zeros(n, dtype=np.uint64)
    times = np.arange(n, dtype=np.uint64)
    s0 = o.symbol(nodes, times)
    s1 = o.symbol(nodes, times + np.uint64(1))
    table = np.zeros((4, 4))
    np.add.at(table, (s0, s1), 1)
    _, p, _, _ = sps.chi2_contingency(table)
    assert p > 0.001


def test_cross_node_correlation_small():
    o = NoiseOracle(13)
    times = np.arange(50_000, dtype=np.uint64)
    a = o.uniform(np.zeros(times.size, dtype=np.uint64), times)
    b = o.uniform(np.ones(times.size, dtype=np.uint64), times)
    corr = np.corrcoef(a, b)[0, 1]
    assert abs(corr) <= 0.02


def test_uniform_range():
    o = NoiseOracle(3)
    u = o.uniform(np.arange(10_000, dtype=np.uint64), 0)
    assert u.min() >= 0.0 and u.max() < 1.0
    x = o.uniform_states(10_000)
    assert x.min() >= 0.0 and x.max() < 1.0


def test_init_stream_disjoint_from_symbol_stream():
    o = NoiseOracle(21)
    init = o.uniform_states(256)
    sym_u = o.uniform(np.arange(256, dtype=np.uint64), 0)
    assert not np.array_equal(init, sym_u)


def test_weighted_alphabet():
    o = NoiseOracle(5, weights=(0.5, 0.25, 0.125, 0.125))
    syms = o.symbols(0, 400_000)
    freqs = np.bincount(syms, minlength=4) / syms.size
    assert np.all(np.abs(freqs - [0.5, 0.25, 0.125, 0.125]) <= 0.005)


@pytest.mark.parametrize("weights", [
    (0.5, 0.6),             # does not sum to 1
    (-0.1, 1.1),            # negative entry
    (),                     # empty
])
def test_degenerate_weights_rejected(weights):
    with pytest.raises(ValueError):
        NoiseOracle(0, weights=weights)


def test_subseed_and_derive_distinct():
    o = NoiseOracle(9)
    seeds = {o.subseed(t) for t in range(100)}
    assert len(seeds) == 100
    assert derive_seed(9, 0) == o.subseed(0)
    assert derive_seed(9, 0) != derive_seed(10, 0)


def test_mix64_bijective_on_sample():
    xs = np.arange(10_000, dtype=np.uint64)
    ys = mix64(xs)
    assert np.unique(ys).size == xs.size


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**63 - 1),
       node=st.integers(0, 2**32), time=st.integers(0, 2**32))
def test_scalar_matches_vector(seed, node, time):
    o = NoiseOracle(seed)
    vec = o.symbol(np.array([node], dtype=np.uint64),
                   np.array([time], dtype=np.uint64))
    assert o.symbol_at(node, time) == int(vec[0])


def test_symbol_at_rejects_negative():
    with pytest.raises(ValueError):
        NoiseOracle(0).symbol_at(-1, 0)
