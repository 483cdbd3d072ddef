"""Command line front end.

Subcommands: selftest, calibrate, estimate, simulate, export-field.
Every failed precondition exits nonzero with a message on stderr.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import bench, calibrate
from .estimators import EstimateResult, ThresholdConfig, bnd_estimate, bbd_estimate, max_level
from .harmonics import HarmonicCoeffs
from .needlets import build_frame, needlet_analyze, needlet_synthesize, window_b
from .operators import rosenthal, threshold_perturbed
from .quadrature import product_rule
from .simulate import FixtureConfig, TargetDensity, fixture_streams, observe_signal


def _parse_grid(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty grid")
    return vals


def _cmd_selftest(args):
    failures = 0

    def check(name, ok, detail=""):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}{'  ' + detail if detail else ''}")
        failures += not ok

    xs = np.linspace(1.0, 1e4, 2001)
    total = window_b(xs[:, None] / 2.0 ** np.arange(0, 18)[None, :]) ** 2
    defect = float(np.max(np.abs(total.sum(axis=1) - 1.0)))
    check("window partition of unity", defect <= 1e-10, f"defect {defect:.2e}")

    rule = product_rule(20)
    defects = rule.moment_defects(10)
    check("degree-20 rule moments", float(defects.max()) <= 1e-9,
          f"worst {float(defects.max()):.2e}")

    rng = np.random.default_rng(7)
    J = 4
    frame = build_frame(J)
    f = HarmonicCoeffs(2**J, rng.standard_normal((2**J + 1) ** 2))
    beta = needlet_analyze(f.padded(frame.lmax), frame)
    energy = beta.scalar**2 + sum(float(np.sum(lv**2)) for lv in beta.levels)
    rel = abs(energy - f.l2() ** 2) / f.l2() ** 2
    check("frame energy identity", rel <= 1e-9, f"rel {rel:.2e}")

    back = needlet_synthesize(beta, frame)
    oracle = HarmonicCoeffs(frame.lmax)
    for l in range(frame.lmax + 1):
        oracle.set_block(l, frame.coverage_weight(l) * f.padded(frame.lmax).block(l))
    rel = np.linalg.norm(back.values - oracle.values) / f.l2()
    check("frame resynthesis", rel <= 1e-9, f"rel {rel:.2e}")

    K = rosenthal(math.pi, 1.0, 8)
    g = HarmonicCoeffs(8, rng.standard_normal(81))
    dense = np.zeros((81, 81))
    for l in range(9):
        n0 = l * l
        dense[n0 : n0 + 2 * l + 1, n0 : n0 + 2 * l + 1] = K.block(l)
    rel = np.linalg.norm(K.apply(g).values - dense @ g.values)
    check("blockwise equals dense", rel <= 1e-12, f"abs {rel:.2e}")

    return 1 if failures else 0


def _cmd_calibrate(args):
    rng = np.random.default_rng(args.seed)
    if args.which == "kappa":
        res = calibrate.calibrate_kappa(
            args.delta if args.delta is not None else 1e-3,
            n_runs=args.runs, kappa_grid=args.grid, rng=rng,
        )
        row_names = ["count"]
    else:
        res = calibrate.calibrate_tau(
            args.which, eps=args.eps, delta=args.delta,
            tau_grid=args.grid, n_runs=args.runs, rng=rng,
        )
        row_names = [f"level{j}" for j in range(res.table.shape[0])]
    lines = ["value," + ",".join(f"{g:g}" for g in res.grid)]
    for name, row in zip(row_names, res.table):
        lines.append(name + "," + ",".join(str(int(c)) for c in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        bench._atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    flag = "  (grid exhausted)" if res.exhausted else ""
    print(f"calibrated {args.which} = {res.value:g}{flag}")
    return 0


def _derive_level(cfg: FixtureConfig, lam: float) -> int:
    from_band = int(math.floor(math.log2(cfg.lmax + 1))) - 1
    if cfg.eps == 0 and cfg.delta == 0:
        return from_band
    return min(max_level(cfg.eps, cfg.delta, lam), from_band)


def _cmd_estimate(args):
    cfg = FixtureConfig.from_file(args.fixture)
    J = args.level if args.level is not None else _derive_level(cfg, args.lam)
    tcfg = ThresholdConfig(
        kappa=args.kappa, tau_sig=args.tau_sig, tau_op=args.tau_op,
        eps=cfg.eps, delta=cfg.delta, lam=args.lam, J=J,
    )
    target = TargetDensity(cfg.target)
    K = rosenthal(cfg.alpha, cfg.nu, cfg.lmax)
    f = target.coeffs(cfg.lmax)
    op_rng, sig_rng = fixture_streams(cfg.seed)
    # fused perturb-and-screen; same draws as materializing the dense
    # perturbed operator first
    Ktop = threshold_perturbed(K, cfg.delta, tcfg.kappa, J, op_rng)
    obs = observe_signal(f, K, cfg.eps, sig_rng, seed=cfg.seed)
    if args.method == "bnd":
        frame = build_frame(J, oversample=args.oversample)
        res = bnd_estimate(obs, Ktop, tcfg, frame)
    else:
        res = bbd_estimate(obs, Ktop, tcfg)
    res.to_json(args.out)
    kept = int(res.kept_blocks.sum())
    print(f"{args.method} estimate written to {args.out}  "
          f"(J={J}, kept blocks {kept})")
    return 0


def _cmd_simulate(args):
    if not args.table3:
        print("simulate: pass --table3 to run the study", file=sys.stderr)
        return 1
    report = bench.run_study(n_replicates=args.N, master_seed=args.seed)
    report.to_csv(args.out)
    print(f"study written to {args.out}")
    for (delta, eps, method), (ml2, se2, mli, sei, n) in sorted(report.aggregates.items()):
        print(f"  delta={delta:g} eps={eps:g} {method}: "
              f"L2 {ml2:.4f}+-{se2:.4f}  Linf {mli:.4f}+-{sei:.4f}  (n={n})")
    if report.failures:
        print(f"  {len(report.failures)} replicate failures recorded", file=sys.stderr)
    return 0


def _cmd_export_field(args):
    res = EstimateResult.from_json(args.infile)
    grid = bench.eval_grid(args.n)
    bench.write_field_csv(args.out, bench.export_field(res.f_hat, grid))
    print(f"field written to {args.out} ({args.n} points)")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="sphdeconv",
        description="Blind spherical deconvolution with needlet thresholding.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("selftest", help="run the fast invariant suite")
    sp.set_defaults(func=_cmd_selftest)

    sp = sub.add_parser("calibrate", help="calibrate a thresholding constant")
    sp.add_argument("--which", choices=("kappa", "sig", "op"), default="kappa",
                    help="constant to calibrate (default kappa)")
    sp.add_argument("--delta", type=float, default=None, help="operator noise level")
    sp.add_argument("--eps", type=float, default=None, help="signal noise level")
    sp.add_argument("--grid", type=_parse_grid, default=None,
                    help="comma-separated ascending grid")
    sp.add_argument("--runs", type=int, default=10, help="Monte Carlo runs (default 10)")
    sp.add_argument("--seed", type=int, default=0, help="master seed")
    sp.add_argument("--out", default=None, help="write the count matrix CSV here")
    sp.set_defaults(func=_cmd_calibrate)

    sp = sub.add_parser("estimate", help="run one estimator on a seeded fixture")
    sp.add_argument("--fixture", required=True, help="fixture config JSON path")
    sp.add_argument("--method", choices=("bnd", "bbd"), required=True)
    sp.add_argument("--out", default="est.json", help="result JSON (default est.json)")
    sp.add_argument("--kappa", type=float, default=0.8)
    sp.add_argument("--tau-sig", type=float, default=0.9)
    sp.add_argument("--tau-op", type=float, default=0.2)
    sp.add_argument("--lam", type=float, default=1.0,
                    help="multiplier on the dyadic resolution bound")
    sp.add_argument("--level", type=int, default=None,
                    help="override the derived resolution level J")
    sp.add_argument("--oversample", type=float, default=calibrate.STUDY_OVERSAMPLE)
    sp.set_defaults(func=_cmd_estimate)

    sp = sub.add_parser("simulate", help="run the Monte Carlo error study")
    sp.add_argument("--table3", action="store_true",
                    help="run the default noise-pair grid")
    sp.add_argument("--N", type=int, default=20, help="replicates per cell (default 20)")
    sp.add_argument("--seed", type=int, default=1234, help="master seed")
    sp.add_argument("--out", default="results.csv", help="output CSV")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("export-field", help="evaluate a result on a grid, write CSV")
    sp.add_argument("--in", dest="infile", required=True, help="estimate result JSON")
    sp.add_argument("--out", default="field.csv", help="output CSV")
    sp.add_argument("--n", type=int, default=bench.DEFAULT_GRID_N,
                    help="grid size (default 4096)")
    sp.set_defaults(func=_cmd_export_field)

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"{ap.prog}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
