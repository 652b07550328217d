import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubnet import dynamics as dyn
from hubnet.noise import NoiseOracle

unit = st.floats(0.0, 1.0, exclude_max=True, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(a=unit, b=unit)
def test_circle_dist_properties(a, b):
    d = dyn.circle_dist(a, b)
    assert 0.0 <= d <= 0.5
    assert d == pytest.approx(dyn.circle_dist(b, a), abs=1e-15)
    s = dyn.circle_signed_diff(a, b)
    assert -0.5 < s <= 0.5
    assert abs(s) == pytest.approx(d, abs=1e-12)


def test_wrap01():
    assert dyn.wrap01(1.25) == 0.25
    assert dyn.wrap01(-0.25) == 0.75
    assert dyn.wrap01(1.0) == 0.0


def test_tent_branch_values():
    fam = dyn.MapFamily.tent_contractions()
    assert fam.eval(0, 0.0) == 0.0
    assert fam.eval(0, 0.5) == 0.25
    assert fam.eval(2, 0.5) == 0.75
    assert fam.eval(3, 0.5) == 0.0  # 0.25 + 0.75 wraps
    assert fam.eval(1, 1.0 - 1e-12) == pytest.approx(0.25, abs=1e-11)


def test_tent_contraction_rate_audited():
    fam = dyn.MapFamily.tent_contractions()
    worst = fam.check_contraction(grid=157)
    assert worst <= 0.5 + 1e-9


def test_symbol_out_of_range():
    fam = dyn.MapFamily.tent_contractions()
    with pytest.raises(ValueError):
        fam.eval(4, 0.5)
    coup = dyn.Coupling.sine_exchange()
    with pytest.raises(ValueError):
        coup.eval(-1, 0.1, 0.2)


def test_sine_exchange_values():
    coup = dyn.Coupling.sine_exchange()
    assert coup.eval(0, 0.0, 0.25) == pytest.approx(1.0, abs=1e-15)
    assert coup.eval(2, 0.3, 0.3) == pytest.approx(-2.0 / 3.6, abs=1e-15)
    assert coup.eval(0, 0.25, 0.0) == pytest.approx(-1.0, abs=1e-15)
    coup.audit(grid=200)


def test_coupling_mean_values():
    coup = dyn.Coupling.sine_exchange()
    meas = dyn.StationaryMeasure.lebesgue()
    assert dyn.coupling_mean(coup, 0, 0.0, meas) == pytest.approx(0.0, abs=1e-10)
    assert dyn.coupling_mean(coup, 0, 0.25, meas) == pytest.approx(-1.0, abs=1e-10)
    assert dyn.coupling_mean(coup, 3, 0.0, meas) == pytest.approx(-3.0 / 3.6, abs=1e-10)


def test_coupling_mean_monte_carlo_agreement():
    coup = dyn.Coupling.sine_exchange()
    rng = np.random.default_rng(0)
    emp = dyn.StationaryMeasure.empirical(rng.random(200_000))
    for s in (0, 2):
        a = dyn.coupling_mean(coup, s, 0.37, dyn.StationaryMeasure.lebesgue())
        b = dyn.coupling_mean(coup, s, 0.37, emp)
        assert a == pytest.approx(b, abs=5e-3)


def test_nonseparable_mean_quadrature():
    coup = dyn.Coupling(
        evaluator=lambda s, x, y: np.sin(2 * math.pi * (x + y)),
        nsymbols=1, sup_norm=1.0, lip_norm=2 * math.pi,
        c4_norm=(2 * math.pi) ** 4)
    assert not coup.separable
    val = dyn.coupling_mean(coup, 0, 0.3, dyn.StationaryMeasure.lebesgue())
    assert val == pytest.approx(0.0, abs=1e-10)


def test_reduced_map_symbol_collapse_at_09():
    fam = dyn.MapFamily.tent_contractions()
    coup = dyn.Coupling.sine_exchange()
    rm = dyn.ReducedMap(family=fam, coupling=coup, alpha_eff=0.9)
    zs = np.arange(512) / 512.0
    base = np.array([rm.eval(0, z) for z in zs])
    for s in range(1, 4):
        vals = np.array([rm.eval(s, z) for z in zs])
        assert np.max(dyn.circle_dist(vals, base)) <= 1e-12


def test_reduced_fixed_point_location():
    fam = dyn.MapFamily.tent_contractions()
    coup = dyn.Coupling.sine_exchange()
    rm = dyn.ReducedMap(family=fam, coupling=coup, alpha_eff=0.9)
    rep = dyn.reduced_fixed_points(rm, 0)
    stable = [fp for fp in rep.fixed_points if fp.stable]
    assert len(stable) == 1
    assert stable[0].z == pytest.approx(0.224, abs=1e-3)
    assert stable[0].derivative == pytest.approx(-0.42, abs=0.02)
    assert rep.trapping_region is not None


def test_fixed_point_residuals_small():
    fam = dyn.MapFamily.tent_contractions()
    coup = dyn.Coupling.sine_exchange()
    rm = dyn.ReducedMap(family=fam, coupling=coup, alpha_eff=0.9)
    rep = dyn.reduced_fixed_points(rm, 0)
    for fp in rep.fixed_points:
        assert dyn.circle_dist(rm.eval(0, fp.z), fp.z) <= 1e-7


def test_trapping_region_forward_invariant():
    fam = dyn.MapFamily.tent_contractions()
    coup = dyn.Coupling.sine_exchange()
    rm = dyn.ReducedMap(family=fam, coupling=coup, alpha_eff=0.9)
    rep = dyn.reduced_fixed_points(rm, 0)
    lo, hi = rep.trapping_region
    width = dyn.wrap01(hi - lo)
    pts = dyn.wrap01(lo + width * np.linspace(0.0, 1.0, 2000))
    for s in range(4):
        img = np.array([rm.eval(s, p) for p in pts])
        assert np.all(dyn.wrap01(img - lo) <= width + 1e-12)


def test_decoupled_reduced_map_is_plain_family():
    fam = dyn.MapFamily.tent_contractions()
    coup = dyn.Coupling.sine_exchange()
    rm = dyn.ReducedMap(family=fam, coupling=coup, alpha_eff=0.0)
    for z in (0.1, 0.5, 0.9):
        assert rm.eval(1, z) == fam.eval(1, z)


def test_stationary_sampler_uniform():
    fam = dyn.MapFamily.tent_contractions()
    meas = dyn.stationary_sampler(fam, NoiseOracle(12), depth=40, count=50_000)
    s = np.sort(meas.samples)
    n = s.size
    ks = max(np.max(np.arange(1, n + 1) / n - s), np.max(s - np.arange(n) / n))
    assert ks <= 0.01


def test_stationary_sampler_anchor_independence():
    # depth-40 backward compositions from different anchors differ by at
    # most lambda^40 * diam
    fam = dyn.MapFamily.tent_contractions()
    a = dyn.stationary_sampler(fam, NoiseOracle(33), depth=40, count=500,
                               anchor=0.0)
    b = dyn.stationary_sampler(fam, NoiseOracle(33), depth=40, count=500,
                               anchor=0.7)
    assert np.max(dyn.circle_dist(a.samples, b.samples)) <= 0.5 ** 40 + 1e-12


def test_sampler_requires_contraction():
    fam = dyn.MapFamily.single(lambda x: dyn.wrap01(2.0 * x))
    with pytest.raises(ValueError):
        dyn.stationary_sampler(fam, NoiseOracle(0), depth=10, count=10)


def test_fourier_coefficients_of_sine_exchange():
    coup = dyn.Coupling.sine_exchange()
    t = dyn.fourier_coeffs(coup, 2, mode_cap=3)
    assert t.coeff(0, 0) == pytest.approx(-2.0 / 3.6, abs=1e-12)
    # sin(2 pi y) contributes -i/2 at n2 = 1, +i/2 at n2 = -1
    assert t.coeff(0, 1) == pytest.approx(-0.5j, abs=1e-12)
    assert t.coeff(0, -1) == pytest.approx(0.5j, abs=1e-12)
    assert t.coeff(1, 0) == pytest.approx(0.5j, abs=1e-12)
    assert abs(t.coeff(2, 3)) <= 1e-12


def test_fourier_reconstruction():
    coup = dyn.Coupling.sine_exchange()
    t = dyn.fourier_coeffs(coup, 1, mode_cap=2)
    rng = np.random.default_rng(4)
    xs, ys = rng.random(100), rng.random(100)
    err = np.abs(t.reconstruct(xs, ys) - coup.eval(1, xs, ys))
    assert err.max() <= 1e-6


def test_fourier_decay_audit_catches_bad_norm():
    coup = dyn.Coupling.sine_exchange()
    bad = dyn.Coupling(evaluator=coup.evaluator, nsymbols=4,
                       sup_norm=coup.sup_norm, lip_norm=coup.lip_norm,
                       c4_norm=1.0, u=coup.u, v=coup.v, c=coup.c)
    with pytest.raises(ValueError):
        dyn.fourier_coeffs(bad, 0, mode_cap=2)


def test_fourier_csv(tmp_path):
    coup = dyn.Coupling.sine_exchange()
    t = dyn.fourier_coeffs(coup, 0, mode_cap=1)
    path = tmp_path / "modes.csv"
    t.to_csv(str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "n1,n2,re,im"
    assert len(lines) == 1 + 9
