"""Geometry, channels and the movement region."""
import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masec.model import (
    ChannelRealization,
    SystemConfig,
    eve_los_matrix,
    feasible_region,
    main_channel,
    mrt_beamformer,
    project_positions,
    random_feasible_positions,
    sample_wiretap_channels,
    snr_bob,
    steering_vector,
    sum_eve_power,
)


def small_config(**overrides):
    values = dict(
        n_antennas=5, n_eves=2, theta0=np.pi / 4,
        thetas=(np.pi / 6, np.pi / 3), beta0=1.0, betas=(1.0, 0.8),
        ks=(4.0, 2.0), pa=100.0, sigma2=1.0, rs=2.0,
        wavelength=1.0, span=4.0, dmin=0.5)
    values.update(overrides)
    return SystemConfig(**values)


class TestConfigValidation:
    def test_rejects_single_antenna(self):
        with pytest.raises(ValueError, match="n_antennas"):
            small_config(n_antennas=1)

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError, match="thetas"):
            small_config(thetas=(0.3,))

    def test_rejects_duplicate_angles(self):
        with pytest.raises(ValueError, match="distinct"):
            small_config(thetas=(0.5, 0.5))

    def test_rejects_negative_k(self):
        with pytest.raises(ValueError, match="K-factors"):
            small_config(ks=(-0.1, 1.0))

    def test_rejects_too_small_span(self):
        with pytest.raises(ValueError, match="span"):
            small_config(span=1.9)

    def test_rejects_nonpositive_power(self):
        with pytest.raises(ValueError, match="pa"):
            small_config(pa=0.0)


def test_steering_vector_matches_elementwise_oracle():
    # rebuild every entry with scalar cmath to cross-check the vectorization
    cfg = small_config(wavelength=0.75)
    x = np.array([0.0, 0.9, 1.8, 2.95, 3.7])
    theta = 0.6
    got = steering_vector(x, theta, cfg)
    for n in range(5):
        want = cmath.exp(1j * 2.0 * cmath.pi / 0.75 * x[n] * cmath.sin(theta))
        assert got[n] == pytest.approx(want, abs=1e-14)
    assert np.allclose(np.abs(got), 1.0)


def test_main_channel_scale():
    cfg = small_config(beta0=2.5)
    h = main_channel(np.zeros(5), cfg)
    assert np.allclose(h, np.sqrt(2.5))


def test_eve_los_matrix_rows_are_steering_vectors():
    cfg = small_config()
    x = np.linspace(0.0, 4.0, 5)
    mat = eve_los_matrix(x, cfg)
    assert mat.shape == (2, 5)
    for i, theta in enumerate(cfg.thetas):
        assert np.allclose(mat[i], steering_vector(x, theta, cfg))


class TestFeasibleRegion:
    def test_frozen_partition_for_default_geometry(self):
        # N=5, span 4, dmin 0.5: five width-0.4 intervals, gaps exactly 0.5
        reg = feasible_region(small_config())
        assert np.allclose(reg.lo, [0.0, 0.9, 1.8, 2.7, 3.6])
        assert np.allclose(reg.hi, [0.4, 1.3, 2.2, 3.1, 4.0])

    def test_covers_segment_ends(self):
        cfg = small_config(n_antennas=3, span=2.0, dmin=0.4)
        reg = feasible_region(cfg)
        assert reg.lo[0] == 0.0
        assert reg.hi[-1] == pytest.approx(2.0)

    def test_adjacent_gap_is_dmin(self):
        reg = feasible_region(small_config())
        assert np.allclose(reg.lo[1:] - reg.hi[:-1], 0.5)

    def test_degenerate_region_warns(self):
        cfg = small_config(span=2.0, dmin=0.5)
        with pytest.warns(UserWarning, match="pinned"):
            reg = feasible_region(cfg)
        assert np.allclose(reg.lo, reg.hi)

    def test_midpoints_inside(self):
        reg = feasible_region(small_config())
        assert reg.contains(reg.midpoints())


@given(st.lists(st.floats(min_value=-10.0, max_value=10.0,
                          allow_nan=False), min_size=5, max_size=5))
@settings(max_examples=200, deadline=None)
def test_projection_feasible_and_idempotent(raw):
    reg = feasible_region(small_config())
    x = project_positions(np.array(raw), reg)
    assert reg.contains(x)
    # worst-case spacing: interval gaps guarantee at least dmin
    assert np.all(np.diff(x) >= 0.5 - 1e-12)
    assert np.array_equal(project_positions(x, reg), x)


@given(st.lists(st.floats(min_value=0.0, max_value=4.0,
                          allow_nan=False), min_size=5, max_size=5))
@settings(max_examples=200, deadline=None)
def test_projection_no_op_inside(raw):
    reg = feasible_region(small_config())
    inside = reg.lo + np.sort(np.array(raw)) / 4.0 * (reg.hi - reg.lo)
    inside = np.clip(inside, reg.lo, reg.hi)
    assert np.array_equal(project_positions(inside, reg), inside)


def test_random_positions_feasible_and_seeded():
    reg = feasible_region(small_config())
    a = random_feasible_positions(reg, np.random.default_rng(5))
    b = random_feasible_positions(reg, np.random.default_rng(5))
    assert np.array_equal(a, b)
    assert reg.contains(a)


class TestChannelSampling:
    def test_deterministic_per_seed(self):
        cfg = small_config()
        x = feasible_region(cfg).midpoints()
        a = sample_wiretap_channels(x, cfg, seed=42)
        b = sample_wiretap_channels(x, cfg, seed=42)
        c = sample_wiretap_channels(x, cfg, seed=43)
        assert np.array_equal(a.h_eves, b.h_eves)
        assert not np.array_equal(a.h_eves, c.h_eves)

    def test_bob_channel_is_deterministic(self):
        cfg = small_config()
        x = feasible_region(cfg).midpoints()
        ch = sample_wiretap_channels(x, cfg, seed=0)
        assert np.array_equal(ch.h_bob, main_channel(x, cfg))

    def test_draw_order_contract(self):
        # real (M, N) block first, then imaginary, each entry / sqrt(2)
        cfg = small_config()
        x = feasible_region(cfg).midpoints()
        ch = sample_wiretap_channels(x, cfg, seed=7)
        rng = np.random.default_rng(7)
        re = rng.standard_normal((2, 5))
        im = rng.standard_normal((2, 5))
        scatter = (re + 1j * im) / np.sqrt(2.0)
        k = cfg.ks_arr[:, None]
        b = cfg.betas_arr[:, None]
        expect = (np.sqrt(k * b / (k + 1.0)) * eve_los_matrix(x, cfg)
                  + np.sqrt(b / (k + 1.0)) * scatter)
        assert np.array_equal(ch.h_eves, expect)

    def test_mean_power_matches_statistics(self):
        # E|h_i w|^2 = beta_i (K_i g_i + 1) / (K_i + 1) for unit-norm w
        cfg = small_config()
        x = feasible_region(cfg).midpoints()
        w = mrt_beamformer(x, cfg)
        proj = eve_los_matrix(x, cfg) @ w
        g = np.abs(proj) ** 2
        want = cfg.betas_arr * (cfg.ks_arr * g + 1.0) / (cfg.ks_arr + 1.0)
        powers = np.zeros(2)
        n_draw = 20000
        for s in range(n_draw):
            ch = sample_wiretap_channels(x, cfg, seed=s)
            powers += np.abs(ch.h_eves @ w) ** 2
        got = powers / n_draw
        assert np.allclose(got, want, rtol=0.03)

    def test_rayleigh_limit_is_exponential(self):
        # K=0: |h w|^2 ~ Exp(beta) regardless of the placement
        cfg = small_config(ks=(0.0, 0.0), betas=(1.0, 1.0))
        x = feasible_region(cfg).midpoints()
        w = mrt_beamformer(x, cfg)
        samples = np.array([
            abs(np.dot(sample_wiretap_channels(x, cfg, seed=s).h_eves[0], w)) ** 2
            for s in range(4000)])
        samples.sort()
        emp = np.arange(1, samples.size + 1) / samples.size
        model = 1.0 - np.exp(-samples)
        assert np.max(np.abs(emp - model)) < 0.03


def test_mrt_achieves_full_array_gain():
    cfg = small_config(beta0=1.7, pa=50.0, sigma2=2.0)
    x = feasible_region(cfg).midpoints()
    w = mrt_beamformer(x, cfg)
    assert np.linalg.norm(w) == pytest.approx(1.0)
    # matched filter collects beta0 * N regardless of the placement
    assert snr_bob(w, x, cfg) == pytest.approx(50.0 * 1.7 * 5 / 2.0)


def test_sum_eve_power_accumulates_rows():
    cfg = small_config()
    x = feasible_region(cfg).midpoints()
    ch = sample_wiretap_channels(x, cfg, seed=3)
    w = mrt_beamformer(x, cfg)
    want = sum(abs(np.dot(ch.h_eves[i], w)) ** 2 for i in range(2))
    assert sum_eve_power(w, ch) == pytest.approx(want)


def test_channel_realization_is_plain_data():
    ch = ChannelRealization(h_bob=np.ones(3, complex),
                            h_eves=np.ones((2, 3), complex))
    assert ch.h_bob.shape == (3,)
    assert ch.h_eves.shape == (2, 3)
