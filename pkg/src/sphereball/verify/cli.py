"""``verify`` command line: run suites, list the registry, list the corpus."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from .config import ConfigError, RunConfig, load_config, make_spec
from .corpus import CORPUS
from .registry import REGISTRY, run_suite, suite_ids
from .report import emit_report, exit_code

EXIT_USAGE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="verify", description="Identity and inequality suites for sphere and ball approximation.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    run = sub.add_parser("run", help="run one suite or all of them")
    run.add_argument("--suite", required=True, help="suite id, comma-separated ids, or 'all'")
    run.add_argument("--config", help="INI file with [run] and per-suite sections")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--format", choices=("json", "csv", "both"), default="json")
    run.add_argument("--seed", type=int, help="override the configured seed")
    run.add_argument("--jobs", type=int, default=1, help="suites run in parallel processes")
    run.add_argument("--timing", choices=("separate", "inline"), default="separate",
                     help="write wall times to timing.json (default) or inline into report.json")
    run.add_argument("--quiet", action="store_true")
    sub.add_parser("list", help="print the suite registry")
    sub.add_parser("corpus", help="print the test-function corpus")
    return ap


def _select(text: str) -> list[str]:
    if text == "all":
        return suite_ids()
    ids = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [s for s in ids if s not in REGISTRY]
    if unknown or not ids:
        raise ConfigError(f"unknown suite(s): {', '.join(unknown) or text!r}; see 'verify list'")
    return ids


def _run(args) -> int:
    ids = _select(args.suite)
    cfg = load_config(args.config, REGISTRY) if args.config else RunConfig()
    if args.seed is not None and args.seed < 0:
        raise ConfigError("--seed must be nonnegative")
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    specs = [make_spec(s, REGISTRY, cfg, args.seed) for s in ids]
    if args.jobs == 1 or len(specs) == 1:
        reports = []
        for spec in specs:
            reports.append(run_suite(spec))
            _say(args, reports[-1])
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(run_suite, specs))
        for rep in reports:
            _say(args, rep)
    emit_report(reports, args.format, args.out, inline_timing=args.timing == "inline")
    return exit_code(reports)


def _say(args, rep):
    if args.quiet:
        return
    bad = sum(not c.passed for c in rep.cases)
    status = "PASS" if rep.passed else "FAIL"
    extra = f" ({bad}/{len(rep.cases)} cases failed)" if bad else f" ({len(rep.cases)} cases)"
    if rep.error:
        extra = f" (error: {rep.error.splitlines()[0]})"
    print(f"{status} {rep.suite}{extra} {rep.elapsed_ms / 1e3:.1f}s", flush=True)


def _list() -> int:
    for s in REGISTRY.values():
        print(f"{s.id}\n    {s.covers}")
    return 0


def _corpus() -> int:
    for e in CORPUS:
        sm = ", ".join(f"p={k}: {'inf' if v == float('inf') else v}" for k, v in e.smoothness.items())
        print(f"{e.name:14s} {e.domain:6s} d={e.dim} {e.kind:9s} {e.description} [{sm}]")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run(args)
        if args.command == "list":
            return _list()
        return _corpus()
    except ConfigError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
