"""Command-line front end: simulate / verify / sweep / report.

Exit codes: 0 all checks passed, 1 a check failed or the run aborted,
2 configuration or usage error.  IMCFLAB_WORKERS bounds sweep concurrency.
"""

from __future__ import annotations

import argparse
import sys

from .scenario import emit_report, parse_config, run_scenario, sweep, verify_run


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imcflab",
        description="Inverse mean curvature flow laboratory: run flows, "
                    "track first eigenvalues, verify the claimed inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario end to end")
    sim.add_argument("--config", required=True, help="JSON scenario config")
    sim.add_argument("--out", required=True, help="artifact directory")

    ver = sub.add_parser("verify", help="re-run checks on a stored run")
    ver.add_argument("--run", required=True, help="run artifact directory")
    ver.add_argument("--checks", default=None,
                     help="comma-separated check names (default: config list)")

    sw = sub.add_parser("sweep", help="run a scenario across parameter values")
    sw.add_argument("--config", required=True)
    sw.add_argument("--param", required=True,
                    choices=("alpha", "p", "resolution", "dt"))
    sw.add_argument("--values", required=True,
                    help="comma-separated values, e.g. 0.25,0.5,1.0")
    sw.add_argument("--out", required=True)

    rep = sub.add_parser("report", help="regenerate summary.md from report.json")
    rep.add_argument("--run", required=True)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            config = parse_config(args.config)
            artifact = run_scenario(config, args.out)
            print(f"run {artifact.status}; artifact at {artifact.path}")
            for rep in artifact.reports:
                print(f"  [{rep.status:>12s}] {rep.name}: margin={rep.margin:.3e}")
            return 0 if artifact.all_passed else 1
        if args.command == "verify":
            checks = args.checks.split(",") if args.checks else None
            artifact = verify_run(args.run, checks)
            for rep in artifact.reports:
                print(f"  [{rep.status:>12s}] {rep.name}: margin={rep.margin:.3e}")
            return 0 if artifact.all_passed else 1
        if args.command == "sweep":
            config = parse_config(args.config)
            values = [float(v) for v in args.values.split(",")]
            artifacts = sweep(config, args.param, values, args.out)
            ok = True
            for v, art in zip(values, artifacts):
                print(f"{args.param}={v:g}: {art.status}, "
                      f"{sum(r.passed for r in art.reports)}/{len(art.reports)} "
                      f"checks passed")
                ok = ok and art.all_passed
            return 0 if ok else 1
        if args.command == "report":
            path = emit_report(args.run)
            print(f"wrote {path}")
            return 0
    except (ValueError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
