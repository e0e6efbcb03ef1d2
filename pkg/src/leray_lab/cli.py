"""Command-line front end.

Subcommands: constants, inequality-scan, simulate, verify-duhamel.
Exit codes: 0 success, 2 quadrature failure, 3 inequality/threshold
violation, 4 solver instability, 5 configuration or file errors.
Tables print 12 significant digits; JSON artifacts carry 17.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .bounds import (
    CLASSICAL_K3_DISPLAY_BOUND,
    PAPER_K3,
    PAPER_K4,
    compute_bound_report,
)
from .radial import QuadratureError
from .solver import (
    ConfigError,
    SolverInstability,
    duhamel_residual,
    simulate,
)
from .storage import (
    canonical_hash,
    load_config,
    load_trajectory,
    save_trajectory,
    write_manifest,
    write_series_csv,
)
from .sweeps import box_sweep, radial_sweep

EXIT_OK = 0
EXIT_QUADRATURE = 2
EXIT_VIOLATION = 3
EXIT_INSTABILITY = 4
EXIT_CONFIG = 5

_TABLE_FMT = "{:>14} = {:.12g}"


def _write_json(path, payload: dict):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)


def cmd_constants(args) -> int:
    started = time.time()
    try:
        report = compute_bound_report(
            nu=args.nu, l2_u0=args.l2, dim=args.dim, preset=args.preset
        )
    except QuadratureError as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    print(f"preset: {report.preset}")
    print(_TABLE_FMT.format("gamma3", report.gamma3))
    print(_TABLE_FMT.format("gamma4", report.gamma4))
    print(_TABLE_FMT.format("k3", report.k3))
    print(_TABLE_FMT.format("k4", report.k4))
    print(_TABLE_FMT.format("classical_k3", report.classical_k3))
    print(f"{'':>14}   (classical bound < {CLASSICAL_K3_DISPLAY_BOUND})")
    print(_TABLE_FMT.format("improvement", report.improvement_ratio))
    print(
        _TABLE_FMT.format("t_star_bound", report.t_star_bound)
        + f"   (dim={report.dim}, nu={report.nu:g}, l2_u0={report.l2_u0:g})"
    )
    ok = report.k3 <= PAPER_K3 and report.k4 <= PAPER_K4
    if not ok:
        print("computed constants exceed the published bounds", file=sys.stderr)
    if args.json:
        payload = report.to_dict()
        _write_json(args.json, payload)
        write_manifest(
            Path(args.json).with_suffix(".manifest.json"),
            command="constants",
            config_payload={"preset": args.preset, "nu": args.nu, "l2": args.l2, "dim": args.dim},
            seed=None,
            outputs=[args.json],
            started=started,
        )
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_inequality_scan(args) -> int:
    started = time.time()
    summaries = []
    if args.count > 0:
        if args.corpus in ("box", "both"):
            summaries.append(box_sweep(args.dim, args.count, args.seed, tol=args.tol))
        if args.corpus in ("radial", "both"):
            summaries.append(
                radial_sweep(args.dim, args.count, args.seed, tol=args.radial_tol)
            )
    all_passed = True
    for summary in summaries:
        print(f"[{summary.corpus} corpus, dim={summary.dim}, seed={summary.seed}]")
        for line in summary.lines.values():
            status = "pass" if line.failures == 0 else "FAIL"
            print(
                f"  {line.name:<28} count={line.count:<6} worst_ratio="
                f"{line.worst_ratio:.12g}  tol={line.tol:g}  [{status}]"
            )
        if summary.extremal_ratio is not None:
            print(
                f"  extremal attainment: corpus max {summary.corpus_max_gn_ratio:.12g}"
                f" <= extremal {summary.extremal_ratio:.12g}  "
                f"[{'pass' if summary.attainment_ok else 'FAIL'}]"
            )
        all_passed &= summary.all_passed
    if not summaries:
        print("empty scan (count = 0)")
    if args.json:
        payload = {
            "dim": args.dim,
            "count": args.count,
            "seed": args.seed,
            "summaries": [s.to_dict() for s in summaries],
            "all_passed": all_passed,
        }
        _write_json(args.json, payload)
        write_manifest(
            Path(args.json).with_suffix(".manifest.json"),
            command="inequality-scan",
            config_payload={k: getattr(args, k) for k in ("dim", "count", "seed", "corpus")},
            seed=args.seed,
            outputs=[args.json],
            started=started,
        )
    return EXIT_OK if all_passed else EXIT_VIOLATION


def cmd_simulate(args) -> int:
    started = time.time()
    try:
        config, payload = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        series, trajectory = simulate(config)
    except SolverInstability as exc:
        print(f"instability: {exc}", file=sys.stderr)
        return EXIT_INSTABILITY
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    outputs = []
    csv_path = out_dir / "series.csv"
    write_series_csv(csv_path, series)
    outputs.append(csv_path)
    if trajectory is not None:
        traj_dir = out_dir / "trajectory"
        seed = config.initial.seed
        save_trajectory(traj_dir, trajectory, seed=seed)
        outputs.append(traj_dir)
    write_manifest(
        out_dir / "manifest.json",
        command="simulate",
        config_payload=payload,
        seed=config.initial.seed,
        outputs=outputs,
        started=started,
    )
    print(f"wrote {csv_path} ({len(series.t)} samples)")
    if trajectory is not None:
        print(f"wrote trajectory with {len(trajectory.times)} snapshots")
    print(f"config hash: {canonical_hash(payload)}")
    return EXIT_OK


def cmd_verify_duhamel(args) -> int:
    if args.t0 >= args.t:
        print(f"need t0 < t, got t0={args.t0}, t={args.t}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        trajectory = load_trajectory(args.trajectory)
        residual = duhamel_residual(trajectory, args.t0, args.t)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"duhamel residual on [{args.t0:g}, {args.t:g}]: {residual:.12g}")
    if args.threshold is not None and residual > args.threshold:
        print(f"residual exceeds threshold {args.threshold:g}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leray-lab",
        description="Periodic-box laboratory for Navier-Stokes regularity "
        "diagnostics: constants, inequality sweeps, instrumented runs.",
    )
    parser.add_argument("--version", action="version", version=f"leray-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="print the derived bound constants")
    p.add_argument("--preset", choices=("computed", "paper"), default="computed")
    p.add_argument("--json", metavar="PATH", default=None)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--l2", type=float, default=1.0, help="initial L2 norm |u0|_2")
    p.add_argument("--dim", type=int, choices=(3, 4), default=3)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("inequality-scan", help="randomized inequality sweep")
    p.add_argument("--dim", type=int, choices=(3, 4), default=3)
    p.add_argument("--count", type=int, default=100, help="fields per corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corpus", choices=("box", "radial", "both"), default="both")
    p.add_argument("--tol", type=float, default=1e-3, help="box-corpus tolerance")
    p.add_argument("--radial-tol", type=float, default=1e-9)
    p.add_argument("--json", metavar="PATH", default=None)
    p.set_defaults(func=cmd_inequality_scan)

    p = sub.add_parser("simulate", help="run a configured integration")
    p.add_argument("config", help="JSON run configuration")
    p.add_argument("--out", default="run-output", help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-duhamel", help="mild-solution reconstruction check")
    p.add_argument("trajectory", help="trajectory directory")
    p.add_argument("--t0", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--threshold", type=float, default=None)
    p.set_defaults(func=cmd_verify_duhamel)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
