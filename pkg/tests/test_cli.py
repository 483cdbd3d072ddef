"""End-to-end command line checks, driving main() in process."""

import json

import numpy as np
import pytest

from sphdeconv.cli import main
from sphdeconv.estimators import EstimateResult
from sphdeconv.simulate import FixtureConfig


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 5
    assert "FAIL" not in out


def test_calibrate_kappa_stdout(capsys):
    assert main(["calibrate", "--which", "kappa", "--seed", "0"]) == 0
    out = capsys.readouterr().out
    assert "calibrated kappa = 0.8" in out
    assert out.startswith("value,0.3,0.4,0.5,0.6,0.7,0.8")
    assert "count,10,10,9,8,3,0" in out


def test_calibrate_tau_with_custom_grid_to_file(tmp_path, capsys):
    out_csv = tmp_path / "tau.csv"
    rc = main([
        "calibrate", "--which", "op", "--grid", "0.2,0.4",
        "--runs", "3", "--seed", "1", "--out", str(out_csv),
    ])
    assert rc == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "value,0.2,0.4"
    assert len(lines) == 5  # header plus levels 0..3
    assert all(line.startswith("level") for line in lines[1:])
    assert "calibrated op" in capsys.readouterr().out


def test_calibrate_rejects_bad_grid(capsys):
    with pytest.raises(SystemExit):
        main(["calibrate", "--grid", "a,b"])


def _write_fixture(tmp_path, **overrides):
    cfg = dict(delta=1e-3, eps=1e-3, seed=3, lmax=15)
    cfg.update(overrides)
    p = tmp_path / "fixture.json"
    FixtureConfig(**cfg).to_file(p)
    return p


def test_estimate_then_export_field_roundtrip(tmp_path, capsys):
    fix = _write_fixture(tmp_path)
    est = tmp_path / "est.json"
    rc = main(["estimate", "--fixture", str(fix), "--method", "bnd",
               "--out", str(est)])
    assert rc == 0
    assert "bnd estimate written" in capsys.readouterr().out
    res = EstimateResult.from_json(est)
    assert res.method == "bnd"
    assert res.beta_hat is not None

    field = tmp_path / "field.csv"
    rc = main(["export-field", "--in", str(est), "--out", str(field),
               "--n", "256"])
    assert rc == 0
    rows = np.loadtxt(field, delimiter=",", skiprows=1)
    assert rows.shape == (256, 4)
    # exported points sit on the unit sphere
    np.testing.assert_allclose(
        np.linalg.norm(rows[:, :3], axis=1), 1.0, atol=1e-12
    )


def test_estimate_bbd_with_explicit_level(tmp_path):
    fix = _write_fixture(tmp_path)
    est = tmp_path / "bbd.json"
    rc = main(["estimate", "--fixture", str(fix), "--method", "bbd",
               "--out", str(est), "--level", "2"])
    assert rc == 0
    res = EstimateResult.from_json(est)
    assert res.method == "bbd"
    assert res.beta_hat is None


def test_estimate_deterministic_per_fixture(tmp_path):
    fix = _write_fixture(tmp_path)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["estimate", "--fixture", str(fix), "--method", "bnd", "--out", str(a)]) == 0
    assert main(["estimate", "--fixture", str(fix), "--method", "bnd", "--out", str(b)]) == 0
    assert json.loads(a.read_text()) == json.loads(b.read_text())


def test_estimate_missing_fixture_fails(tmp_path, capsys):
    rc = main(["estimate", "--fixture", str(tmp_path / "nope.json"),
               "--method", "bnd"])
    assert rc == 1
    assert "sphdeconv:" in capsys.readouterr().err


def test_estimate_malformed_fixture_fails(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"delta": 1e-3, "eps": 1e-3}))
    rc = main(["estimate", "--fixture", str(p), "--method", "bnd"])
    assert rc == 1
    assert "missing" in capsys.readouterr().err


def test_simulate_requires_table3_flag(tmp_path, capsys):
    rc = main(["simulate", "--out", str(tmp_path / "r.csv")])
    assert rc == 1
    assert "--table3" in capsys.readouterr().err


def test_export_field_missing_input_fails(tmp_path, capsys):
    rc = main(["export-field", "--in", str(tmp_path / "ghost.json")])
    assert rc == 1
    assert capsys.readouterr().err


def test_unknown_subcommand_exits():
    with pytest.raises(SystemExit):
        main(["transmogrify"])
