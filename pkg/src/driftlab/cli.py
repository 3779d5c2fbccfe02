"""Command-line interface.

Subcommands: spectrum, oracle, verify, conjecture, report.
Exit codes for verify: 0 all asserted bounds hold, 2 a violation beyond the
uncertainty band, 3 a solver failure.  Conjecture verdicts never affect the
exit code.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import harness
from .bounds import conjecture_check
from .errors import DriftLabError


def _add_common(p):
    p.add_argument("--seed", type=int, default=None,
                   help="override the solver starting-vector seed")
    p.add_argument("--cache-dir", default=os.environ.get("DRIFTLAB_CACHE_DIR"),
                   help="spectrum cache directory (env: DRIFTLAB_CACHE_DIR)")
    p.add_argument("--jobs", type=int, default=1,
                   help="number of experiments to run concurrently")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftlab",
        description="Eigenvalues of the drifting Laplacian and their gap bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="compute (or load) one experiment's spectrum")
    p.add_argument("config")
    p.add_argument("experiment_id")
    _add_common(p)

    p = sub.add_parser("oracle", help="print a closed-form spectrum")
    p.add_argument("name", choices=sorted(harness._ORACLES) + ["product"])
    p.add_argument("params", help="JSON object of oracle parameters")
    p.add_argument("--k", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("verify", help="run every experiment and bound suite")
    p.add_argument("config")
    p.add_argument("--out", default="runs/latest", help="report output directory")
    _add_common(p)

    p = sub.add_parser("conjecture", help="report the consecutive-gap conjecture")
    p.add_argument("config")
    p.add_argument("experiment_id")
    p.add_argument("--kmax", type=int, default=20)
    _add_common(p)

    p = sub.add_parser("report", help="summarize a previous run directory")
    p.add_argument("run_dir")
    _add_common(p)
    return parser


def _find_experiment(config, experiment_id):
    for exp in harness.load_config(config):
        if exp.id == experiment_id:
            return exp
    raise SystemExit(f"no experiment {experiment_id!r} in {config}")


def _cmd_spectrum(args) -> int:
    exp = _find_experiment(args.config, args.experiment_id)
    s = harness.build_spectrum(exp.spectrum_spec, exp.k_max + 1,
                               seed=args.seed, cache_dir=args.cache_dir)
    print(f"# experiment {exp.id} (index base {s.index_base})")
    print("index,eigenvalue,uncertainty,residual")
    for j, (lam, u, r) in enumerate(zip(s.eigenvalues, s.uncertainties,
                                        s.residual_norms)):
        print(f"{j + s.index_base},{lam!r},{u!r},{r!r}")
    for w in s.warnings:
        print(f"# warning: {w}", file=sys.stderr)
    return 0


def _cmd_oracle(args) -> int:
    params = json.loads(args.params)
    spec = {"kind": "oracle", "name": args.name,
            "params": dict(params, k=args.k)}
    if args.name == "product":
        spec.update(left=params["left"], right=params["right"])
    s = harness._oracle_spectrum(spec)
    print(f"# oracle {args.name} (index base {s.index_base})")
    for j, lam in enumerate(s.eigenvalues):
        print(f"{j + s.index_base},{lam!r}")
    return 0


def _cmd_verify(args) -> int:
    code = harness.verify(args.config, args.out, seed=args.seed,
                          cache_dir=args.cache_dir, jobs=args.jobs)
    report = json.loads((Path(args.out) / "report.json").read_text())
    summary = report["summary"]
    print(f"experiments: {len(report['experiments'])}  "
          f"verdicts: {summary['verdict_counts']}  "
          f"violations: {summary['asserted_violations']}  "
          f"exit: {code}")
    return code


def _cmd_conjecture(args) -> int:
    exp = _find_experiment(args.config, args.experiment_id)
    s = harness.build_spectrum(exp.spectrum_spec, args.kmax + 1,
                               seed=args.seed, cache_dir=args.cache_dir)
    rows = conjecture_check(s, exp.geometry.n, min(args.kmax, len(s) - 1))
    print("k,gap,bound,slack,verdict")
    for r in rows:
        print(f"{r.k},{r.lhs!r},{r.rhs!r},{r.slack!r},{r.verdict}")
    worst = min(rows, key=lambda r: r.slack)
    print(f"# min slack {worst.slack!r} at k={worst.k}", file=sys.stderr)
    return 0  # open conjecture: verdicts are reported only


def _cmd_report(args) -> int:
    path = Path(args.run_dir) / "report.json"
    report = json.loads(path.read_text())
    summary = report["summary"]
    print(f"run: {args.run_dir}")
    for e in report["experiments"]:
        n_checks = len(e.get("checks", []))
        status = e["status"]
        print(f"  {e['id']}: {status}, {n_checks} checks")
    print(f"verdicts: {summary['verdict_counts']}")
    print("min slack per family:")
    for name, slack in summary["min_slack_per_family"].items():
        print(f"  {name}: {slack!r}")
    return summary["exit_code"]


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "oracle": _cmd_oracle,
    "verify": _cmd_verify,
    "conjecture": _cmd_conjecture,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (DriftLabError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"driftlab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
