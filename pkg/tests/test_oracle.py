import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from embedkit.criteria import EmbeddingQuery, SpaceSpec
from embedkit.dyadic import Box, fit_log_slope
from embedkit.errors import AtomOutsideDomain, ResolutionTooLow
from embedkit.oracle import (
    GridField, abs_frequencies, atom_symbol, besov_norm, bessel_potential, bessel_symbol, build_lp_symbols, embedding_ratio_probe,
    generator_symbol, gn_check, gn_ratio, h_norm, interpolated_parameters, leak_fraction, lp_blocks, make_atom,
    max_blocks, random_band_limited, smoothstep, spectral_derivative, triebel_norm, w_norm, weighted_lp_norm,
)
from embedkit.weights import Constant, RadialPower, cube_measure

U1 = Constant(1)
SMALL = dict(L=8.0, N=2**12)


def tone(k, d=1, L=8.0, N=2**12):
    """exp(i xi0 x) at grid frequency xi0 = (pi / L) k."""
    xi0 = math.pi / L * k
    return GridField.sample(lambda *x: np.exp(1j * xi0 * x[0]), d, L, N), xi0


@pytest.fixture(scope="module")
def family():
    return random_band_limited(12, seed=11, **SMALL)


# ---------------------------------------------------------------- symbols

def test_generator_profile():
    r = np.linspace(0, 3, 3001)
    g = generator_symbol(r)
    assert np.all((0 <= g) & (g <= 1))
    assert np.all(g[r <= 1] == 1.0) and np.all(g[r >= 1.5] == 0.0)
    assert np.all(np.diff(g) <= 0)
    assert smoothstep(0.5) == pytest.approx(0.5)


def test_symbols_small_example():
    s = build_lp_symbols(1, np.array([0.5]))
    assert s[:, 0].tolist() == [1.0, 0.0]


def test_symbols_resolution_check():
    with pytest.raises(ResolutionTooLow):
        build_lp_symbols(12, abs_frequencies(1, 8.0, 2**12), math.pi * 2**12 / 16)
    assert max_blocks(1, 8.0, 2**14) == 11


def test_partition_telescopes():
    r = abs_frequencies(1, 8.0, 2**14)
    K = max_blocks(1, 8.0, 2**14)
    s = build_lp_symbols(K, r)
    assert np.max(np.abs(s.sum(axis=0) - generator_symbol(np.ldexp(r, -K)))) <= 1e-12
    assert np.all(s.sum(axis=0)[r <= 2**K] == pytest.approx(1.0, abs=1e-15))


@pytest.mark.parametrize("k", range(1, 8))
def test_block_support(k):
    r = np.linspace(0, 400, 40001)
    s = build_lp_symbols(8, r)[k]
    outside = (r < 2 ** (k - 1)) | (r > 3 * 2 ** (k - 1))
    assert np.all(s[outside] == 0.0)


# ---------------------------------------------------------------- blocks

def test_low_tone_sits_in_block_zero():
    f, xi0 = tone(int(0.5 / (math.pi / 8)))
    assert abs(xi0) <= 1
    blocks = lp_blocks(f)
    assert np.allclose(blocks[0].values, f.values, atol=1e-12)
    assert all(np.max(np.abs(b.values)) < 1e-12 for b in blocks[1:])


@given(k=st.integers(1, 500))
@settings(max_examples=40, deadline=None)
def test_any_tone_hits_at_most_two_consecutive_blocks(k):
    f, _ = tone(k)
    live = [i for i, b in enumerate(lp_blocks(f)) if np.max(np.abs(b.values)) > 1e-12]
    assert 1 <= len(live) <= 2 and live == list(range(live[0], live[0] + len(live)))


def test_blocks_sum_to_band_limited_field(family):
    f = family[0]
    total = sum((b.values for b in lp_blocks(f)), np.zeros_like(f.values))
    assert np.allclose(total, f.values, atol=1e-10)
    assert all(np.all(b.values == 0) for b in lp_blocks(f.with_values(np.zeros_like(f.values))))


# ---------------------------------------------------------------- weighted L^p

def test_lp_norm_examples():
    one = GridField.sample(lambda x: np.ones_like(x), 1, 1.0, 4096)
    assert weighted_lp_norm(one, 2) == pytest.approx(math.sqrt(2), rel=1e-14)
    assert weighted_lp_norm(one, 1, RadialPower(1, 0.5, 0.5)) == pytest.approx(4 / 3, abs=1e-3)
    f = random_band_limited(1, seed=2, **SMALL)[0]
    assert weighted_lp_norm(f * -3.0, 3, U1) == pytest.approx(3 * weighted_lp_norm(f, 3, U1), rel=1e-14)


@pytest.mark.parametrize("w", [RadialPower(1, -0.5, 0.5), RadialPower(1, 1.0, 1.0)])
def test_grid_weight_matches_cube_measure(w):
    # smooth plateau bump ~ indicator of [-0.5, 0.5]
    errs = []
    for N in (2**10, 2**12, 2**14):
        bump = GridField.sample(lambda x: smoothstep((np.abs(x) - 0.5) / 0.01 + 0.5), 1, 2.0, N)
        errs.append(abs(weighted_lp_norm(bump, 1, w) / cube_measure(w, Box((-0.5,), (0.5,))).value - 1))
    assert errs[-1] < 0.01 and errs[-1] <= errs[0]


# ---------------------------------------------------------------- B / F norms

def test_single_block_field_norms_equal_lp_norm():
    f, _ = tone(int(0.8 / (math.pi / 8)))
    lp = weighted_lp_norm(f, 2)
    for q in (1, 2, math.inf):
        assert besov_norm(f, 1.3, 2, q).value == pytest.approx(lp, rel=1e-12)
        assert triebel_norm(f, 1.3, 2, q).value == pytest.approx(lp, rel=1e-12)
    # q < 1 takes roots of the ~1e-16 roundoff left in the empty blocks
    assert besov_norm(f, 1.3, 2, 0.5).value == pytest.approx(lp, rel=1e-4)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
@pytest.mark.parametrize("w", [None, RadialPower(1, 0.5, 0.5)])
def test_p_equals_q_identity(family, p, w):
    for f in family[:4]:
        b = besov_norm(f, 0.7, p, p, w).value
        t = triebel_norm(f, 0.7, p, p, w).value
        assert abs(b - t) <= 1e-10 * b


def test_q_monotonicity(family):
    qs = [0.5, 1, 2, 4, math.inf]
    for f in family[:4]:
        for norm in (besov_norm, triebel_norm):
            vals = [norm(f, 0.5, 2, q).value for q in qs]
            assert all(b <= a * (1 + 1e-12) for a, b in zip(vals, vals[1:]))


def test_elementary_embedding_constant_is_bounded(family):
    ratios = [besov_norm(f, 0.5, 2, 0.5).value / besov_norm(f, 0.75, 2, math.inf).value for f in family]
    assert max(ratios) < 10 and np.std(ratios) / np.mean(ratios) < 0.5


def test_tail_warning_for_rough_field():
    rng = np.random.default_rng(0)
    rough = GridField(1, 8.0, 2**12, rng.standard_normal(2**12))
    assert any("TailNotDecaying" in w for w in besov_norm(rough, 1.0, 2, 2).warnings)


def test_periodization_monitor():
    wide = GridField.sample(lambda x: np.exp(-0.5 * x**2 / 9.0), 1, **SMALL)
    assert leak_fraction(wide) > 1e-6
    assert any("periodization" in w for w in besov_norm(wide, 0, 2, 2).warnings)
    narrow = GridField.sample(lambda x: np.exp(-0.5 * x**2), 1, **SMALL)
    assert not besov_norm(narrow, 0, 2, 2).warnings


# ---------------------------------------------------------------- Bessel potentials, H and W

def test_bessel_potential_examples():
    f, xi0 = tone(37)
    assert np.array_equal(bessel_potential(f, 0).values, f.values)
    g = bessel_potential(f, 1.5)
    assert np.allclose(g.values, f.values * (1 + xi0**2) ** -0.75, atol=1e-13)


@given(a=st.floats(-2, 2), b=st.floats(-2, 2))
@settings(max_examples=30, deadline=None)
def test_bessel_symbols_compose(a, b):
    r = abs_frequencies(1, 8.0, 2**12)
    lhs = bessel_symbol(r, a) * bessel_symbol(r, b)
    assert np.max(np.abs(lhs / bessel_symbol(r, a + b) - 1)) <= 1e-12


@given(a=st.floats(0, 2), b=st.floats(0, 2))
@settings(max_examples=20, deadline=None)
def test_bessel_composition_on_fields(a, b):
    # smoothing orders only: negative orders would amplify Nyquist-range roundoff by (1 + |xi|^2)
    f = random_band_limited(1, seed=5, **SMALL)[0]
    lhs = bessel_potential(bessel_potential(f, a), b).values
    rhs = bessel_potential(f, a + b).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(f.values))


def test_h_norm_identities(family):
    w = RadialPower(1, 0.5, 0.5)
    f = family[0]
    assert h_norm(f, 0, 2, w).value == pytest.approx(weighted_lp_norm(f, 2, w), rel=1e-14)
    assert h_norm(bessel_potential(f, 1.2), 1.2, 3, w).value == pytest.approx(weighted_lp_norm(f, 3, w), rel=1e-10)


def test_h_and_f_norms_are_equivalent():
    fields = random_band_limited(20, seed=3, **SMALL)
    r = [h_norm(f, 1, 3).value / triebel_norm(f, 1, 3, 2).value for f in fields]
    assert 0.2 < min(r) and max(r) < 5 and max(r) / min(r) < 3


def test_w_norm_of_a_pure_tone():
    L, N, k = 8.0, 2**12, 24
    xi0 = math.pi / L * k
    f = GridField.sample(lambda x: np.sin(xi0 * x), 1, L, N)
    d1 = spectral_derivative(f, (1,))
    assert np.allclose(d1.values, xi0 * np.cos(xi0 * f.axes()[0]), atol=1e-10)
    p = 3.0
    expected = (weighted_lp_norm(f, p) ** p + weighted_lp_norm(d1, p) ** p) ** (1 / p)
    assert w_norm(f, 1, p).value == pytest.approx(expected, rel=1e-12)
    assert w_norm(f, 0.5, 2).value == pytest.approx(besov_norm(f, 0.5, 2, 2).value, rel=1e-14)


def test_norm_argument_checks():
    f = random_band_limited(1, seed=1, **SMALL)[0]
    with pytest.raises(ValueError):
        h_norm(f, 1, 1.0)
    with pytest.raises(ValueError):
        w_norm(f, -1, 2)
    with pytest.raises(ValueError):
        triebel_norm(f, 0, math.inf, 2)
    with pytest.raises(ResolutionTooLow):
        besov_norm(f, 0, 2, 2, K=30)


# ---------------------------------------------------------------- atoms

def test_atom_spectrum_and_normalization():
    a = make_atom(3, 5)
    assert np.max(np.abs(a.values)) == pytest.approx(1.0)
    r = a.abs_freq()
    spec = np.abs(np.fft.fft(a.values))
    assert np.all(spec[(r < 8) | (r > 16)] < 1e-9 * spec.max())
    assert atom_symbol(0, np.array([0.5]))[0] > 0 and atom_symbol(0, np.array([1.0]))[0] == 0


def test_atom_center():
    a = make_atom(4, 8)
    x = a.axes()[0]
    assert x[np.argmax(np.abs(a.values))] == pytest.approx(0.5, abs=a.h)


def test_atom_errors():
    with pytest.raises(ResolutionTooLow):
        make_atom(12, 0)
    with pytest.raises(AtomOutsideDomain):
        make_atom(2, 100)


def test_level_zero_atom_single_block():
    a = make_atom(0, 0)
    assert besov_norm(a, 1.0, 2, 2).value == pytest.approx(weighted_lp_norm(a, 2), rel=1e-12)


@pytest.mark.parametrize("s,p", [(1.0, 2.0), (0.5, 4.0), (0.0, 1.5)])
def test_unweighted_atom_scaling(s, p):
    pts = [(nu, triebel_norm(make_atom(nu, 0), s, p, 2).value) for nu in range(2, 7)]
    assert fit_log_slope(pts).slope == pytest.approx(s - 1 / p, abs=0.1)


@pytest.mark.parametrize("gamma", [0.5, 1.0])
def test_weighted_atom_scaling(gamma):
    w = RadialPower(1, gamma, gamma)
    s, p = 1.0, 2.0
    pts = [(nu, triebel_norm(make_atom(nu, 0), s, p, 2, w).value) for nu in range(2, 7)]
    assert fit_log_slope(pts).slope == pytest.approx(s - (1 + gamma) / p, abs=0.15)


def fq(s0, p0, s1, p1, w0=U1, w1=U1):
    return EmbeddingQuery(SpaceSpec("F", s0, p0, 2, w0), SpaceSpec("F", s1, p1, 2, w1))


def test_probe_examples():
    ok = embedding_ratio_probe(fq(1, 2, 0, 2))
    assert ok.conclusion == "ConsistentWithHolds"
    assert ok.lines[0].measured_slope == pytest.approx(-1.0, abs=0.05)
    bad = embedding_ratio_probe(fq(1, 2, 0.9, 10))
    assert bad.conclusion == "ConsistentWithFails"
    assert bad.lines[0].measured_slope == pytest.approx(0.3, abs=0.05)


# ---------------------------------------------------------------- multiplicative inequality

def test_interpolated_parameters():
    s, p, q, w = interpolated_parameters(0.5, 1, 2, 2, U1, 0, 4, math.inf, RadialPower(1, 0.5, 0.5))
    assert s == 0.5 and p == pytest.approx(8 / 3) and q == pytest.approx(4.0)
    assert isinstance(w, RadialPower) and w.alpha == pytest.approx(0.5 * 0.5 * (8 / 3) / 4)


def test_gn_bounded_over_family(family):
    rep = gn_check(family, 0.5, 1, 2, 2, U1, 0, 2, 2, U1)
    assert np.isfinite(rep.max_ratio) and rep.max_ratio < 2


def test_gn_single_block_closed_form():
    f, _ = tone(int(0.8 / (math.pi / 8)))
    assert gn_ratio(f, 0.3, 1, 2, 2, U1, 0, 2, 2, U1) == pytest.approx(1.0, rel=1e-12)


def test_gn_small_theta_continuity(family):
    w = RadialPower(1, 0.5, 0.5)
    for f in family[:5]:
        assert gn_ratio(f, 0.01, 0.5, 2, 2, w, 0.5, 2, 2, w) == pytest.approx(1.0, rel=0.05)


def test_gn_zero_field():
    z = GridField(1, 8.0, 2**12, np.zeros(2**12))
    with pytest.raises(ZeroDivisionError):
        gn_ratio(z, 0.5, 1, 2, 2, U1, 0, 2, 2, U1)


def test_two_dimensional_fields():
    f = random_band_limited(1, seed=4, d=2, L=8.0, N=256)[0]
    assert besov_norm(f, 0.5, 2, 2).value == pytest.approx(triebel_norm(f, 0.5, 2, 2).value, rel=1e-10)
    w = RadialPower(2, 0.5, 0.5)
    assert weighted_lp_norm(f, 2, w) > 0
