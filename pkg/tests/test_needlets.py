"""Window system, frame transforms, localization, and Besov norms."""

import math

import numpy as np
import pytest
from numpy.polynomial import legendre as npleg
from scipy.integrate import quad as scipy_quad

from sphdeconv.harmonics import FOUR_PI, HarmonicCoeffs
from sphdeconv.needlets import (
    NeedletCoeffs,
    band_range,
    besov_norm,
    build_frame,
    localization_profile,
    needlet_analyze,
    needlet_synthesize,
    window_a,
    window_b,
)


def _ramp_oracle(u):
    # independent normalized bump integral on [-1, u]
    bump = lambda t: math.exp(-1.0 / (1.0 - t * t)) if abs(t) < 1 else 0.0
    total = scipy_quad(bump, -1, 1)[0]
    return scipy_quad(bump, -1, u)[0] / total


def test_window_a_matches_quad_oracle():
    for x in (0.55, 0.6, 0.75, 0.9, 0.99):
        want = 1.0 - _ramp_oracle(4 * x - 3)
        assert window_a(x) == pytest.approx(want, abs=1e-12)


def test_window_a_plateaus():
    assert window_a(0.0) == 1.0
    assert window_a(0.5) == 1.0
    assert window_a(0.75) == pytest.approx(0.5, abs=1e-12)
    assert window_a(1.0) == 0.0
    assert window_a(3.7) == 0.0


def test_window_b_support_and_values():
    assert window_b(0.5) == 0.0
    assert window_b(2.0) == 0.0
    assert window_b(1.0) == pytest.approx(1.0, abs=1e-14)
    xs = np.array([0.4, 0.5, 0.7, 1.0, 1.7, 2.0, 5.0])
    vals = window_b(xs)
    assert vals[0] == 0.0 and vals[-1] == 0.0
    assert np.all(vals[2:5] > 0)


def test_partition_of_unity():
    rng = np.random.default_rng(12)
    xs = np.concatenate([[1.0, 1e4], rng.uniform(1.0, 1e4, 5000)])
    js = np.arange(0, 18)
    total = (window_b(xs[:, None] / 2.0**js[None, :]) ** 2).sum(axis=1)
    assert float(np.max(np.abs(total - 1.0))) <= 1e-10


def test_band_ranges():
    assert band_range(0) == (1, 1)
    assert band_range(1) == (1, 3)
    assert band_range(2) == (2, 7)
    assert band_range(3) == (4, 15)
    with pytest.raises(ValueError):
        band_range(-1)


def test_frame_shape():
    frame = build_frame(3)
    assert frame.J == 3
    assert frame.lmax == 15
    assert frame.level_size(2) == 120
    assert frame.coverage_weight(0) == 1.0
    assert frame.coverage_weight(frame.lmax + 1) == pytest.approx(0.0)


def test_frame_energy_identity():
    J = 4
    frame = build_frame(J)
    rng = np.random.default_rng(2)
    f = HarmonicCoeffs(2**J, rng.standard_normal((2**J + 1) ** 2))
    beta = needlet_analyze(f, frame)
    energy = beta.scalar**2 + sum(float(np.sum(v**2)) for v in beta.levels)
    assert energy == pytest.approx(f.l2() ** 2, rel=1e-12)


def test_resynthesis_applies_coverage():
    J = 3
    frame = build_frame(J)
    rng = np.random.default_rng(9)
    f = HarmonicCoeffs(frame.lmax, rng.standard_normal((frame.lmax + 1) ** 2))
    back = needlet_synthesize(needlet_analyze(f, frame), frame)
    for l in range(frame.lmax + 1):
        np.testing.assert_allclose(
            back.block(l), frame.coverage_weight(l) * f.block(l), atol=1e-12
        )


def test_analyze_rejects_overwide_input():
    frame = build_frame(2)
    f = HarmonicCoeffs(frame.lmax + 1)
    with pytest.raises(ValueError):
        needlet_analyze(f, frame)


def test_scalar_channel_is_mean_mode():
    frame = build_frame(2)
    f = HarmonicCoeffs(frame.lmax)
    f.values[0] = 1.25
    beta = needlet_analyze(f, frame)
    assert beta.scalar == 1.25
    assert all(float(np.abs(v).max()) < 1e-14 for v in beta.levels)
    back = needlet_synthesize(beta, frame)
    assert back.values[0] == pytest.approx(1.25)


def test_needlet_coeffs_accounting():
    frame = build_frame(3)
    f = HarmonicCoeffs(frame.lmax)
    beta = needlet_analyze(f, frame)
    assert beta.total_size() == 1 + sum(frame.level_size(j) for j in range(4))
    c = beta.copy()
    c.levels[0][:] = 1.0
    assert float(np.abs(beta.levels[0]).max()) == 0.0


def test_localization_profile_is_scaled_zonal_kernel():
    frame = build_frame(4)
    d = np.array([0.1, 0.3, 0.9, 1.4])
    prof = localization_profile(frame, 3, d)
    lmax = 16
    bl = window_b(np.arange(lmax + 1) / 8.0)
    coef = bl * (2 * np.arange(lmax + 1) + 1) / FOUR_PI
    ref = np.abs(npleg.legval(np.cos(d), coef))
    ratio = prof / ref
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-12)
    assert ratio[0] > 0


def test_localization_far_field_is_small():
    frame = build_frame(4)
    near, far = localization_profile(frame, 3, np.array([0.05, 2.0]))
    assert far < near * 1e-2


def test_besov_norm_level_weighting():
    levels = [np.zeros(1), np.zeros(4)]
    levels[1][0] = 1.0
    nc = NeedletCoeffs(J=1, scalar=0.0, levels=levels)
    # single unit coefficient at level 1: weight 2^(j(s + 2(1/2 - 1/p)))
    s, p, r = 2.0, 2.0, 1.0
    assert besov_norm(nc, s, p, r) == pytest.approx(2.0**s)
    assert besov_norm(nc, s, p, math.inf) == pytest.approx(2.0**s)
    with pytest.raises(ValueError):
        besov_norm(nc, s, 0.0, r)


def test_besov_norm_r_inf_is_max():
    levels = [np.array([3.0]), np.array([1.0, 1.0, 1.0, 1.0])]
    nc = NeedletCoeffs(J=1, scalar=5.0, levels=levels)
    want = max(3.0, 2.0 * math.sqrt(4.0))
    assert besov_norm(nc, 1.0, 2.0, math.inf) == pytest.approx(want)
