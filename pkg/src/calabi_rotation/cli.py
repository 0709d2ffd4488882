"""Command line runner.

    calabi-rotation run <config> [--seed S] [--samples N] [--workers W]
    calabi-rotation check <config> [--seed S] [--samples N] [--workers W]
    calabi-rotation plot <report> <outdir>

Exit codes: 0 every enabled assertion holds, 1 an assertion failed,
2 usage or configuration error (nothing is written), 3 numeric divergence
(the report records the error).
"""
import argparse
import sys

from .config import load_config
from .errors import ConfigError
from .report import emit_plot_data, execute, exit_code, write_report

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_DIVERGED = 0, 1, 2, 3


def _parser():
    parser = argparse.ArgumentParser(
        prog="calabi-rotation",
        description="Average rotation number versus Calabi invariant on the unit disc.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("run", "run experiments and write the JSON report"),
                       ("check", "run experiments and print assertion results only")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="JSON run configuration")
        p.add_argument("--seed", type=int, help="override the root seed")
        p.add_argument("--samples", type=int, help="override the Monte Carlo pair count")
        p.add_argument("--workers", type=int, help="override the worker process count")
        p.add_argument("--report", help="override the report path (run only)")
    p = sub.add_parser("plot", help="write CSV plot data for a completed report")
    p.add_argument("report")
    p.add_argument("outdir")
    return parser


def _summary(report, out):
    res = report.get("results")
    if res:
        cal, phi = res["calabi"], res["phi"]
        print(f"Cal = {cal['value']:.10g} (+- {cal['error']:.2g})", file=out)
        print(f"Phi = {phi['value']:.6g} +- {phi['stderr']:.2g}  (N = {phi['samples']}, "
              f"redraws = {phi['redraws']})", file=out)
        print(f"|Phi + 2 Cal| = {res['residual']['absolute']:.3g}", file=out)


def _print_checks(report, out):
    for c in report["assertions"]:
        tag = "PASS" if c["passed"] else "FAIL"
        print(f"{tag} {c['name']}: {c['value']!r} <= {c['threshold']!r}", file=out)
    if report["error"]:
        print(f"ERROR {report['error']['type']}: {report['error']['message']}", file=out)
    print(f"status: {report['status']}", file=out)


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "plot":
        try:
            paths = emit_plot_data(args.report, args.outdir)
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        for p in paths:
            print(p)
        return EXIT_PASS

    try:
        cfg = load_config(args.config, seed=args.seed, samples=args.samples,
                          workers=args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.report is not None:
        if args.command != "run":
            print("error: --report only applies to run", file=sys.stderr)
            return EXIT_USAGE
        cfg.document["output"]["report"] = args.report

    report, artifacts = execute(cfg)
    if args.command == "run":
        path = write_report(report, artifacts, cfg.output["report"])
        _summary(report, sys.stdout)
        _print_checks(report, sys.stdout)
        print(f"report: {path}")
    else:
        _print_checks(report, sys.stdout)
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
