"""Command-line entry point: ``bblab <command> ...``.

Exit codes: 0 success, 1 usage, 2 data error, 3 cap exceeded where a halt
was required.  Data goes to standard output; progress and run metadata go to
standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from functools import reduce
from pathlib import Path
from typing import Sequence

from . import analysis, catalog, enumeration, symmetry
from .machine import decode_name, encode_name, format_name, render_dot
from .simulator import DEFAULT_CAP, render_trace, run

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CAP = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _shard(text: str) -> enumeration.Shard:
    try:
        return enumeration.Shard.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


# -- commands ----------------------------------------------------------------


def cmd_simulate(args) -> int:
    outcome = run(decode_name(args.name), args.max_steps)
    print(outcome)
    return EXIT_OK if outcome.halted else EXIT_CAP


def cmd_trace(args) -> int:
    m = decode_name(args.name)
    for line in render_trace(m, args.max_steps, args.window):
        print(line)
    return EXIT_OK if run(m, args.max_steps).halted else EXIT_CAP


def cmd_enumerate(args) -> int:
    if args.canonical:
        stream = (encode_name(m) for m in enumeration.enumerate_canonical(args.states, args.shard))
    else:
        stream = (format_name(t) for t in enumeration.iter_name_tuples(args.states, args.shard))
    if args.count:
        print(sum(1 for _ in stream))
        return EXIT_OK
    out = sys.stdout
    for name in stream:
        out.write(name + "\n")
    return EXIT_OK


def _run_sweep(args) -> tuple[catalog.BBSummary, catalog.SweepStats]:
    shard: enumeration.Shard = args.shard
    jobs = args.jobs
    progress = None if args.quiet else catalog.stderr_progress(args.progress_every)
    if jobs == 1:
        return catalog.sweep(args.states, args.max_steps, shard, args.canonical, prune=not args.no_prune, progress=progress)
    # job j takes the ordinals of the sub-shard (shard.index + shard.total * j) / (shard.total * jobs)
    total = shard.total * jobs

    def work(j: int):
        return catalog.sweep(
            args.states, args.max_steps, enumeration.Shard(shard.index + shard.total * j, total),
            args.canonical, prune=not args.no_prune, progress=progress if j == 0 else None,
        )

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(work, range(jobs)))
    summary = reduce(catalog.merge, (s for s, _ in parts))
    stats = reduce(lambda a, b: a + b, (st for _, st in parts))
    return summary, stats


def _emit_summary(summary: catalog.BBSummary, out: Path | None) -> None:
    sys.stdout.write(catalog.format_summary(summary))
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        catalog.write_catalog(out / "catalog.tsv", summary.records())
        (out / "summary.json").write_text(catalog.summary_to_json(summary), encoding="utf-8")


def cmd_catalog(args) -> int:
    if args.merge:
        if args.states is not None:
            raise UsageError("--merge combines saved summaries; drop --states")
        parts = [_load_summary(p) for p in args.merge]
        _emit_summary(reduce(catalog.merge, parts), args.out)
        return EXIT_OK
    if args.states is None:
        raise UsageError("catalog needs --states or --merge")
    summary, stats = _run_sweep(args)
    print(
        f"visited={stats.visited} covered={stats.covered} halted={stats.halted} capped={stats.capped}",
        file=sys.stderr,
    )
    _emit_summary(summary, args.out)
    return EXIT_OK


def _load_summary(path: str | Path) -> catalog.BBSummary:
    try:
        return catalog.summary_from_json(Path(path).read_text(encoding="utf-8"))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ValueError(f"{path}: not a summary file ({exc})") from None


def _summaries(args) -> list[catalog.BBSummary]:
    if args.catalog:
        return [_load_summary(p) for p in args.catalog]
    if args.states is None:
        raise UsageError("give --catalog summary files or --states")
    progress = None if args.quiet else catalog.stderr_progress(args.progress_every)
    return [
        catalog.sweep(n, args.max_steps, canonical=n >= 3, progress=progress)[0]
        for n in range(1, args.states + 1)
    ]


def _pp_entries(args, summaries: list[catalog.BBSummary]) -> list[catalog.PPEntry]:
    top = max(s.bb_value for s in summaries)
    return catalog.build_pp_table(args.max_ones or top, summaries)


def cmd_pp(args) -> int:
    summaries = _summaries(args)
    bb = [s.bb_value for s in sorted(summaries, key=lambda s: s.n)]
    out = sys.stdout
    out.write("ones,pp,bracket,min_steps,min_name,max_steps,max_name,min_rules,shortest_steps,shortest_name\n")
    for e in _pp_entries(args, summaries):
        bracket = catalog.bracket_pp(e.ones, bb)
        if e.pp_value is None:
            cells = [e.ones, "unknown", bracket or "unknown"] + ["-"] * 7
        else:
            cells = [
                e.ones, e.pp_value, bracket or "unknown",
                e.witness_min_steps[1], e.witness_min_steps[0],
                e.witness_max_steps[1], e.witness_max_steps[0],
                e.min_rules, e.shortest[1], e.shortest[0],
            ]
        out.write(",".join(f'"{c}"' if "," in str(c) else str(c) for c in cells) + "\n")
    return EXIT_OK


def cmd_canon(args) -> int:
    print(encode_name(symmetry.canonical_form(decode_name(args.name), args.states)))
    return EXIT_OK


def cmd_orbit(args) -> int:
    for m in sorted(symmetry.orbit(decode_name(args.name), args.states), key=symmetry.name_key):
        print(encode_name(m))
    return EXIT_OK


def cmd_dot(args) -> int:
    sys.stdout.write(render_dot(decode_name(args.name)))
    return EXIT_OK


def cmd_ratios(args) -> int:
    entries: list[catalog.PPEntry] = []
    if args.catalog or args.states is not None:
        entries = _pp_entries(args, _summaries(args))
    if args.no_records:
        records = []
    elif args.records:
        records = analysis.ingest_records(args.records)
    else:
        records = analysis.bundled_records()
    sys.stdout.write(analysis.build_table(entries, records, args.policy))
    return EXIT_OK


def cmd_estimate(args) -> int:
    low, high = enumeration.estimate_sweep(args.states, args.low_us, args.high_us)
    print(enumeration.format_estimate(low, high))
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bblab", description="Busy Beaver and Placid Platypus experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def name_command(cmd: str, help: str, func):
        p = sub.add_parser(cmd, help=help)
        p.add_argument("name", help='machine name, e.g. "(1, 0, 4)"')
        p.set_defaults(func=func)
        return p

    def cap_flag(p):
        p.add_argument("--max-steps", type=_non_negative, default=DEFAULT_CAP, help="step cap (default %(default)s)")

    def sweep_flags(p):
        cap_flag(p)
        p.add_argument("--quiet", action="store_true", help="no progress on standard error")
        p.add_argument("--progress-every", type=float, default=10.0, metavar="SECONDS")

    p = name_command("simulate", "run a machine from the blank tape", cmd_simulate)
    cap_flag(p)

    p = name_command("trace", "print every configuration of a run", cmd_trace)
    cap_flag(p)
    p.add_argument("--window", type=_positive, help="tape cells shown (default: the touched extent)")

    p = sub.add_parser("enumerate", help="list machine names in stream order")
    p.add_argument("--states", type=_positive, required=True)
    p.add_argument("--shard", type=_shard, default=enumeration.WHOLE, metavar="i/m")
    p.add_argument("--canonical", action="store_true", help="orbit minima only")
    p.add_argument("--count", action="store_true", help="print only the number of names")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("catalog", help="exhaustive sweep, or merge of saved partial sweeps")
    p.add_argument("--states", type=_positive)
    sweep_flags(p)
    p.add_argument("--shard", type=_shard, default=enumeration.WHOLE, metavar="i/m")
    p.add_argument("--canonical", action="store_true", help="simulate orbit minima and expand their orbits")
    p.add_argument("--no-prune", action="store_true", help="disable the non-halting shortcuts")
    p.add_argument("--jobs", type=_positive, default=1, help="worker threads")
    p.add_argument("--out", type=Path, help="directory for catalog.tsv and summary.json")
    p.add_argument("--merge", nargs="+", metavar="SUMMARY", help="summary.json files to combine")
    p.set_defaults(func=cmd_catalog)

    for cmd, func, help in (
        ("pp", cmd_pp, "Placid Platypus table from complete summaries"),
        ("ratios", cmd_ratios, "running-time ratio table"),
    ):
        p = sub.add_parser(cmd, help=help)
        p.add_argument("--catalog", nargs="+", metavar="SUMMARY", help="summary.json files for n = 1..K")
        p.add_argument("--states", type=_positive, help="sweep n = 1..STATES instead of reading summaries")
        p.add_argument("--max-ones", type=_positive, help="largest target (default: largest BB value)")
        sweep_flags(p)
        p.set_defaults(func=func)
    # p is the ratios parser here
    p.add_argument("--records", type=Path, help="published running times CSV (default: bundled)")
    p.add_argument("--no-records", action="store_true", help="only rows from own summaries")
    p.add_argument("--policy", choices=analysis.WITNESS_POLICIES, default="shortest", help="witness per ones value")

    for cmd, func, help in (
        ("canon", cmd_canon, "canonical representative of a machine's orbit"),
        ("orbit", cmd_orbit, "all mirror/state-permutation images"),
    ):
        p = name_command(cmd, help, func)
        p.add_argument("--states", type=_positive, help="size of the state space (default: the machine's own)")

    name_command("dot", "Graphviz rendering of a machine", cmd_dot)

    p = sub.add_parser("estimate", help="wall time to sweep the whole n-state space")
    p.add_argument("--states", type=_positive, required=True)
    p.add_argument("--low-us", type=float, required=True, help="fastest per-machine cost in microseconds")
    p.add_argument("--high-us", type=float, required=True, help="slowest per-machine cost in microseconds")
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"bblab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"bblab: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
