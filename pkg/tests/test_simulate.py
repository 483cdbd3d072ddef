"""Targets, fixtures, and the observation/noise model."""

import json
import math

import numpy as np
import pytest

from sphdeconv.harmonics import SphPoint, analyze
from sphdeconv.operators import rosenthal
from sphdeconv.quadrature import product_rule
from sphdeconv.simulate import (
    FixtureConfig,
    TargetDensity,
    fixture_streams,
    make_fixture,
    observe_signal,
    target_density,
)


def test_spike_values_at_poles_of_symmetry():
    f = TargetDensity("exp_spike")
    # center (0, 1, 0): theta = pi/2, phi = pi/2
    assert f(math.pi / 2, math.pi / 2) == pytest.approx(1.0 / 0.6729, rel=1e-12)
    # antipode: l1 distance 4 in the embedding
    assert f(math.pi / 2, 3 * math.pi / 2) == pytest.approx(
        math.exp(-4.0) / 0.6729, rel=1e-12
    )
    assert f.at(SphPoint.from_vec((0.0, 1.0, 0.0))) == pytest.approx(1.4861, rel=1e-4)
    assert f.at(SphPoint.from_vec((0.0, -1.0, 0.0))) == pytest.approx(
        0.027220, rel=1e-4
    )
    # pointwise convenience agrees
    assert target_density("exp_spike", SphPoint.from_vec((0.0, 1.0, 0.0))) == (
        pytest.approx(1.0 / 0.6729, rel=1e-12)
    )


def test_spike_normalizer_yields_unit_mass():
    # the published constant 0.6729 is rounded to 4 digits, so mass is
    # 1 only to ~4e-5; the integrand has an l1 kink, hence dblquad
    from scipy.integrate import dblquad

    f = TargetDensity("exp_spike")
    mass, _ = dblquad(
        lambda ph, th: f(th, ph) * math.sin(th),
        0.0,
        math.pi,
        0.0,
        2 * math.pi,
        epsabs=1e-8,
    )
    assert mass == pytest.approx(1.0, abs=2e-4)


def test_spike_is_positive_and_broadcasts():
    f = TargetDensity("exp_spike")
    th = np.linspace(0.1, 3.0, 7)[:, None]
    ph = np.linspace(0.0, 6.0, 5)[None, :]
    vals = f(th, ph)
    assert vals.shape == (7, 5)
    assert np.all(vals > 0)


def test_uniform_coeffs_analytic():
    f = TargetDensity("uniform")
    c = f.coeffs(4)
    assert c.values[0] == pytest.approx(1.0 / math.sqrt(4 * math.pi), rel=1e-15)
    assert np.all(c.values[1:] == 0)
    assert f(0.3, 2.0) == pytest.approx(1.0 / (4 * math.pi))


def test_spike_coeffs_match_direct_quadrature():
    f = TargetDensity("exp_spike")
    lmax = 12
    rule = product_rule(2 * lmax)
    want = analyze(f, lmax, rule)
    got = f.coeffs(lmax)
    np.testing.assert_allclose(got.values, want.values, atol=1e-13)


def test_coeff_cache_returns_copies():
    f = TargetDensity("exp_spike")
    a = f.coeffs(6)
    a.values[:] = 0.0
    b = f.coeffs(6)
    assert b.values[0] != 0.0


def test_custom_target_wraps_coefficients():
    base = TargetDensity("exp_spike").coeffs(8)
    g = TargetDensity("custom", coeffs=base)
    # evaluation synthesizes the banded expansion
    th, ph = 0.7, 1.3
    from sphdeconv.harmonics import points_synthesize

    want = points_synthesize(base, np.array([th]), np.array([ph]))[0]
    assert g(th, ph) == pytest.approx(want, rel=1e-12)
    # projection pads with zeros, and refuses to truncate
    np.testing.assert_array_equal(g.coeffs(10).values[:81], base.values)
    with pytest.raises(ValueError, match="band"):
        g.coeffs(4)
    with pytest.raises(ValueError, match="coefficients"):
        TargetDensity("custom")


def test_unknown_kind_rejected():
    with pytest.raises(ValueError, match="kind"):
        TargetDensity("banana")


def test_observe_signal_seeded_and_scaled():
    f = TargetDensity("exp_spike").coeffs(8)
    K = rosenthal(math.pi, 1.0, 8)
    g0 = observe_signal(f, K, 0.0, np.random.default_rng(0))
    # eps = 0 is exact blurred coefficients
    want = K.apply(f).values
    np.testing.assert_allclose(g0.g.values, want, atol=1e-13)

    a = observe_signal(f, K, 1e-2, np.random.default_rng(7))
    b = observe_signal(f, K, 1e-2, np.random.default_rng(7))
    np.testing.assert_array_equal(a.g.values, b.g.values)
    noise = a.g.values - want
    assert 0 < np.abs(noise).max() < 10 * 1e-2
    assert a.eps == 1e-2
    with pytest.raises(ValueError):
        observe_signal(f, K, -1e-3, np.random.default_rng(0))


def test_fixture_streams_independent_of_each_other():
    op1, sig1 = fixture_streams(11)
    op2, sig2 = fixture_streams(11)
    np.testing.assert_array_equal(op1.standard_normal(5), op2.standard_normal(5))
    np.testing.assert_array_equal(sig1.standard_normal(5), sig2.standard_normal(5))
    # the two streams draw different numbers
    op3, sig3 = fixture_streams(11)
    assert not np.allclose(op3.standard_normal(5), sig3.standard_normal(5))


def test_fixture_streams_accept_seedsequence():
    op1, _ = fixture_streams(np.random.SeedSequence(99))
    op2, _ = fixture_streams(np.random.SeedSequence(99))
    np.testing.assert_array_equal(op1.standard_normal(3), op2.standard_normal(3))


def test_fixture_config_roundtrip(tmp_path):
    cfg = FixtureConfig(delta=1e-3, eps=1e-4, seed=5, lmax=63)
    p = tmp_path / "fix.json"
    cfg.to_file(p)
    back = FixtureConfig.from_file(p)
    assert back == cfg
    assert back.alpha == pytest.approx(math.pi)
    assert back.target == "exp_spike"


def test_fixture_config_rejects_bad_files(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"delta": 1e-3}))
    with pytest.raises(ValueError, match="missing"):
        FixtureConfig.from_file(p)
    p.write_text(
        json.dumps(
            {"delta": 1e-3, "eps": 1e-3, "seed": 0, "lmax": 15, "volume": 3}
        )
    )
    with pytest.raises(ValueError, match="unknown"):
        FixtureConfig.from_file(p)


def test_make_fixture_wires_everything():
    cfg = FixtureConfig(delta=1e-3, eps=1e-3, seed=2, lmax=15)
    target, K, obs, Kd = make_fixture(cfg)
    assert target.kind == "exp_spike"
    assert K.lmax == 15
    assert obs.g.lmax == 15
    assert obs.eps == 1e-3
    # Kd differs from K by O(delta) block noise
    d = np.abs(Kd.block(3) - K.block(3)).max()
    assert 0 < d < 10 * cfg.delta
    # deterministic in the seed
    _, _, obs2, Kd2 = make_fixture(cfg)
    np.testing.assert_array_equal(obs.g.values, obs2.g.values)
    np.testing.assert_array_equal(Kd.block(5), Kd2.block(5))
