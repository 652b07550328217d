import numpy as np
import pytest

from hubnet import _kernels
from hubnet import engine as eng
from hubnet import graphs as gr
from hubnet.dynamics import (Coupling, MapFamily, StationaryMeasure,
                             circle_dist)
from hubnet.noise import NoiseOracle

FAMILY = MapFamily.tent_contractions()
COUPLING = Coupling.sine_exchange()
CUM4 = np.array([0.25, 0.5, 0.75, 1.0])


class ZeroSymbolOracle(NoiseOracle):
    """Noise source pinned to symbol 0, for hand-computed examples."""

    def symbols(self, t, n):
        return np.zeros(n, dtype=np.int64)


def test_two_node_hand_example():
    g = gr.Graph.from_edges(2, [0], [1])
    st = eng.SimState(x=np.array([0.0, 0.25]))
    cfg = eng.SimConfig(alpha=0.5, steps=1)
    out = eng.network_step(st, g, cfg, FAMILY, COUPLING, ZeroSymbolOracle(0))
    assert out.x[0] == pytest.approx(0.5, abs=1e-15)
    assert out.x[1] == pytest.approx(0.625, abs=1e-15)
    assert out.t == 1


def test_config_validation():
    with pytest.raises(ValueError):
        eng.SimConfig(alpha=-0.1, steps=10)
    with pytest.raises(ValueError):
        eng.SimConfig(alpha=0.5, steps=10, transient=10)
    with pytest.raises(ValueError):
        eng.SimState(x=np.array([1.5]))


def test_state_size_mismatch():
    g = gr.Graph.star(3)
    st = eng.SimState(x=np.zeros(2))
    cfg = eng.SimConfig(alpha=0.1, steps=1)
    with pytest.raises(ValueError):
        eng.network_step(st, g, cfg, FAMILY, COUPLING, NoiseOracle(0))


def test_brute_force_equivalence_small_graphs():
    rng = np.random.default_rng(17)
    done = 0
    while done < 40:
        n = int(rng.integers(2, 7))
        iu = np.triu_indices(n, 1)
        mask = rng.random(iu[0].size) < 0.6
        if not mask.any():
            continue
        g = gr.Graph.from_edges(n, iu[0][mask], iu[1][mask])
        oracle = NoiseOracle(int(rng.integers(1, 1 << 30)))
        st = eng.SimState(x=rng.random(n), t=int(rng.integers(0, 500)))
        cfg = eng.SimConfig(alpha=float(rng.random()), steps=1)
        fast = eng.network_step(st, g, cfg, FAMILY, COUPLING, oracle)
        edges = eng.network_step(st, g, cfg, FAMILY, COUPLING, oracle,
                                 method="edges")
        naive = eng.network_step_naive(st, g, cfg, FAMILY, COUPLING, oracle)
        assert np.array_equal(fast.x, naive.x)
        assert np.array_equal(edges.x, naive.x)
        done += 1


def test_decoupled_limit_exact():
    g = gr.Graph.star(30)
    oracle = NoiseOracle(77)
    init = eng.SimState.uniform(31, oracle)
    cfg = eng.SimConfig(alpha=0.0, steps=25)
    final = eng.simulate(eng.SimState(x=init.x.copy()), g, cfg, FAMILY,
                         COUPLING, oracle)
    for node in (0, 5, 30):
        x = init.x[node]
        for t in range(25):
            x = float(FAMILY.eval(oracle.symbol_at(node, t), x))
        assert final.x[node] == x


def test_simulate_deterministic():
    g = gr.Graph.star(20)
    cfg = eng.SimConfig(alpha=0.7, steps=40, transient=10)
    runs = []
    for _ in range(2):
        oracle = NoiseOracle(5)
        rec = eng.StateRecorder([0, 3])
        eng.simulate(eng.SimState.uniform(21, oracle), g, cfg, FAMILY,
                     COUPLING, oracle, [rec])
        runs.append(rec.series())
    assert np.array_equal(runs[0], runs[1])


def test_star_kernel_matches_generic_engine():
    # the hub map can be locally expanding, so last-ulp summation-order
    # differences amplify; compare short horizons from several states
    L = 40
    alpha = 0.9
    steps = 5
    g = gr.Graph.star(L)
    cfg = eng.SimConfig(alpha=alpha, steps=1)
    for seed in (123, 4567, 890):
        oracle = NoiseOracle(seed)
        x = _kernels.star_init(seed, L + 1)
        z_kernel, _ = _kernels.star_run(np.uint64(seed), L, alpha, steps,
                                        0, CUM4, x)
        st = eng.SimState(x=oracle.uniform_states(L + 1))
        zs = [st.x[0]]
        for _ in range(steps):
            st = eng.network_step(st, g, cfg, FAMILY, COUPLING, oracle)
            zs.append(st.x[0])
        assert np.max(circle_dist(np.array(zs), z_kernel)) <= 1e-10


def test_fluctuation_identity_star():
    L = 150
    g = gr.Graph.star(L)
    rep = gr.star_like_report(g, hub_scale=L, ldn_scale=1)
    rng = np.random.default_rng(2)
    x = rng.random(L + 1)
    st = eng.SimState(x=x)
    meas = StationaryMeasure.lebesgue()
    closed = 0.9 / L * np.sin(2 * np.pi * x[1:]).sum()
    for s in range(4):
        xi = eng.hub_fluctuation(st, g, rep, COUPLING, meas, s, 0, alpha=0.9)
        assert xi == pytest.approx(closed, abs=1e-12)


def test_fluctuation_examples():
    L = 10
    g = gr.Graph.star(L)
    rep = gr.star_like_report(g, hub_scale=L, ldn_scale=1)
    meas = StationaryMeasure.lebesgue()
    x0 = np.zeros(L + 1)
    assert eng.hub_fluctuation(eng.SimState(x=x0), g, rep, COUPLING, meas,
                               0, 0, 0.9) == pytest.approx(0.0, abs=1e-12)
    xq = np.full(L + 1, 0.25)
    assert eng.hub_fluctuation(eng.SimState(x=xq), g, rep, COUPLING, meas,
                               0, 0, 0.9) == pytest.approx(0.9, abs=1e-12)


def test_fluctuation_rejects_non_hub():
    g = gr.Graph.star(5)
    rep = gr.star_like_report(g, hub_scale=5, ldn_scale=1)
    with pytest.raises(ValueError):
        eng.hub_fluctuation(eng.SimState(x=np.zeros(6)), g, rep, COUPLING,
                            StationaryMeasure.lebesgue(), 0, 2, 0.9)


def test_fluctuation_coarse_bound():
    # |xi| <= 2 alpha sup|h| from the definition
    L = 64
    g = gr.Graph.star(L)
    rep = gr.star_like_report(g, hub_scale=L, ldn_scale=1)
    rng = np.random.default_rng(8)
    meas = StationaryMeasure.lebesgue()
    for _ in range(20):
        st = eng.SimState(x=rng.random(L + 1))
        xi = eng.hub_fluctuation(st, g, rep, COUPLING, meas,
                                 int(rng.integers(4)), 0, 0.9)
        assert abs(xi) <= 2.0 * 0.9 * COUPLING.sup_norm


def test_shadowing_zero_at_alpha_zero():
    g = gr.Graph.star(25)
    oracle = NoiseOracle(4)
    init = eng.SimState.uniform(26, oracle)
    cfg = eng.SimConfig(alpha=0.0, steps=50)
    res = eng.shadowing_companion(init, g, cfg, FAMILY, COUPLING, oracle,
                                  np.arange(1, 26), ldn_scale=1)
    assert res.worst == 0.0
    assert res.violations == 0


def test_shadowing_star_bound_holds():
    L = 200
    g = gr.Graph.star(L)
    oracle = NoiseOracle(14)
    init = eng.SimState.uniform(L + 1, oracle)
    cfg = eng.SimConfig(alpha=0.9, steps=400)
    res = eng.shadowing_companion(init, g, cfg, FAMILY, COUPLING, oracle,
                                  np.arange(1, L + 1), ldn_scale=1)
    assert res.bound == pytest.approx(0.9 / L * (17.0 / 6.0) / 0.5, abs=1e-12)
    assert res.violations == 0


def test_shadowing_requires_contraction():
    g = gr.Graph.star(4)
    fam = MapFamily.single(lambda x: x)
    with pytest.raises(ValueError):
        eng.shadowing_companion(eng.SimState(x=np.zeros(5)), g,
                                eng.SimConfig(alpha=0.1, steps=1), fam,
                                COUPLING, NoiseOracle(0), np.arange(1, 5), 1)


def test_desync_series_convention():
    assert np.all(eng.desync_series(np.array([0.3, 0.3]),
                                    np.array([0.3, 0.3])) == 0.0)
    eta = eng.desync_series(np.array([0.9]), np.array([0.1]))
    assert eta[0] == pytest.approx(-0.2, abs=1e-12)
    with pytest.raises(ValueError):
        eng.desync_series(np.zeros(3), np.zeros(4))


def test_return_recorder_pairs():
    g = gr.Graph.star(8)
    oracle = NoiseOracle(6)
    cfg = eng.SimConfig(alpha=0.4, steps=30, transient=10)
    rec = eng.ReturnRecorder(node=0)
    eng.simulate(eng.SimState.uniform(9, oracle), g, cfg, FAMILY, COUPLING,
                 oracle, [rec])
    ts, z, z_next, sym = rec.pairs()
    assert ts.size == 20
    assert ts[0] == 10 and ts[-1] == 29
    assert np.all(z[1:] == z_next[:-1])
    assert np.all((sym >= 0) & (sym < 4))
