"""Command line entry point: ``bilap <suite> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import load_config
from .report import EMITTERS, emit_report, load_report, write_summary
from .suites import SUITES, run_suite

log = logging.getLogger("bilap")

FORMATS = tuple(EMITTERS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bilap", description="Numerical checks for bilinear multiplier estimates.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML or JSON config merged over the defaults")
    common.add_argument("--out", type=Path, default=Path("results"), help="output directory (default: results)")
    common.add_argument("--seed", type=int, default=None, help="random seed (default: config value)")
    common.add_argument("--refine", action="store_true", help="repeat resolution-sensitive checks at 2N")
    common.add_argument("--format", dest="formats", action="append", choices=FORMATS,
                        help="report format, repeatable (default: all)")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUITES:
        sub.add_parser(name, parents=[common], help=f"run the {name} suite")
    sub.add_parser("all", parents=[common], help="run every suite")
    rep = sub.add_parser("report", parents=[common], help="summarize reports already in --out")
    rep.add_argument("suites", nargs="*", help="suite names to include (default: every JSON report)")
    return parser


def _print_counts(report) -> None:
    c = report.counts()
    status = "ok" if report.all_pass else "FAILING"
    print(f"{report.suite:<12} pass={c['PASS']:<4} fail={c['FAIL']:<4} failed={c['FAILED']:<4} "
          f"info={c['INFO']:<4} {status}")
    for r in report.rows:
        if r.verdict in ("FAIL", "FAILED"):
            print(f"  {r.verdict} {r.check} {r.point} ratio={r.ratio!r} {r.note}")


def _report_only(args) -> list:
    names = args.suites or sorted(p.stem for p in args.out.glob("*.json") if p.stem != "summary")
    if not names:
        raise FileNotFoundError(f"no reports found in {args.out}")
    reports = [load_report(args.out / f"{n}.json") for n in names]
    for fmt in args.formats or ():
        for r in reports:
            emit_report(r, fmt, args.out)
    return reports


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "report":
            reports = _report_only(args)
        else:
            cfg = load_config(args.config)
            seed = cfg["seed"] if args.seed is None else args.seed
            refine = args.refine or bool(cfg.get("refine", False))
            names = list(SUITES) if args.command == "all" else [args.command]
            reports = []
            for name in names:
                log.info("running %s", name)
                report = run_suite(name, cfg, seed, refine)
                for fmt in args.formats or FORMATS:
                    emit_report(report, fmt, args.out)
                reports.append(report)
        write_summary(reports, args.out)
    except (OSError, ValueError) as exc:
        print(f"bilap: error: {exc}", file=sys.stderr)
        return 2
    for r in reports:
        _print_counts(r)
    return 0 if all(r.all_pass for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
