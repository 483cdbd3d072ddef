"""Constant-calibration benchmarks: masquerade counts and kill tables."""

import numpy as np
import pytest

from sphdeconv.calibrate import (
    STUDY_OVERSAMPLE,
    CalibrationResult,
    calibrate_kappa,
    calibrate_tau,
)


def test_kappa_lands_at_default_grid_top():
    res = calibrate_kappa(1e-3, rng=0)
    assert float(res) == pytest.approx(0.8)
    assert not res.exhausted
    assert res.table.shape == (1, 6)


def test_kappa_frozen_count_row_seed_zero():
    # shared draws per run make the row non-increasing; the row itself is
    # frozen as a regression anchor for the seeded procedure
    res = calibrate_kappa(1e-3, rng=0)
    np.testing.assert_array_equal(res.table[0], [10, 10, 9, 8, 3, 0])


def test_kappa_counts_non_increasing_across_grid():
    for seed in range(3):
        res = calibrate_kappa(1e-3, rng=seed)
        row = res.table[0]
        assert np.all(np.diff(row) <= 0)
        assert row[0] == 10  # the loosest kappa passes everything


def test_kappa_degenerate_grid():
    res = calibrate_kappa(1e-3, kappa_grid=(100.0,), rng=0)
    assert float(res) == 100.0
    assert not res.exhausted


def test_kappa_exhausted_when_grid_too_loose():
    res = calibrate_kappa(1e-3, kappa_grid=(0.01, 0.02), rng=0)
    assert res.exhausted
    assert float(res) == 0.02
    assert (res.table > 0).all()


def test_kappa_input_validation():
    with pytest.raises(ValueError, match="delta"):
        calibrate_kappa(0.0)
    with pytest.raises(ValueError, match="ascend"):
        calibrate_kappa(1e-3, kappa_grid=(0.8, 0.3))


def test_kappa_deterministic_in_seed():
    a = calibrate_kappa(1e-3, rng=5)
    b = calibrate_kappa(1e-3, rng=5)
    np.testing.assert_array_equal(a.table, b.table)
    assert float(a) == float(b)


def test_tau_sig_lands_near_expected():
    res = calibrate_tau("sig", rng=0)
    assert res.table.shape == (4, 8)
    assert abs(float(res) - 0.9) <= 0.1 + 1e-12
    assert not res.exhausted


def test_tau_op_lands_near_expected():
    res = calibrate_tau("op", rng=0)
    assert res.table.shape == (4, 5)
    assert abs(float(res) - 0.2) <= 0.1 + 1e-12
    assert not res.exhausted


def test_tau_tables_non_increasing_and_level_weighted():
    res = calibrate_tau("sig", rng=1)
    assert np.all(np.diff(res.table, axis=1) <= 0)
    # the chosen column is all zero
    gi = res.grid.index(float(res))
    assert (res.table[:, gi] == 0).all()


def test_tau_deterministic_in_seed():
    a = calibrate_tau("op", rng=2)
    b = calibrate_tau("op", rng=2)
    np.testing.assert_array_equal(a.table, b.table)


def test_tau_input_validation():
    with pytest.raises(ValueError, match="which"):
        calibrate_tau("both")
    with pytest.raises(ValueError, match="ascend"):
        calibrate_tau("sig", tau_grid=(1.0, 0.5))


def test_tau_level3_survivor_count_at_loose_threshold():
    # at the loosest default grid value many pure-noise coefficients at
    # the finest tracked level survive; the exact count is seed noise,
    # but its scale separates a working null from a broken one
    res = calibrate_tau("sig", rng=0)
    loose_level3 = res.table[3, 0]
    assert 10 <= loose_level3 <= 200


def test_calibration_result_float_protocol():
    res = CalibrationResult(0.7, (0.7,), np.zeros((1, 1), dtype=int), False)
    assert float(res) == 0.7
    assert res.grid == (0.7,)


def test_oversample_constant_is_pinned():
    # the study harness and both tau benchmarks share this sampling
    # margin; changing it silently would shift every calibrated table
    assert STUDY_OVERSAMPLE == 2.4
