"""Command line front end.

Exit codes: 0 success, 1 usage or input error, 2 name collision or
enumeration guard exceeded, 3 I/O failure, 4 the oracle found a
counterexample.
"""

import argparse
import os
import shlex
import sys

from intprop import bench
from intprop.model import ModelError, read_model
from intprop.oracle import DEFAULT_GUARD, GuardExceeded, Verdict, check_text
from intprop.parser import SkipCondition
from intprop.rewrite import DEFAULT_EXTENSIONS, rewrite_tree, write_report_csv
from intprop.transform import NameCollision, TransformConfig, UnknownPolicy

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_GUARD = 2
EXIT_IO = 3
EXIT_COUNTEREXAMPLE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _add_transform_flags(p):
    p.add_argument("--max-combinations", type=_positive, default=1000,
                   help="value combinations per join before falling back (default: 1000)")
    p.add_argument("--undefined-ids", choices=[p.value for p in UnknownPolicy],
                   default=UnknownPolicy.UNRESTRICTED.value,
                   help="treatment of identifiers missing from the model (default: unrestricted)")


def build_parser():
    parser = _Parser(prog="intprop", description=__doc__.splitlines()[0])
    parser.add_argument("--dump-config", action="store_true",
                        help="print the effective command line and exit")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress warnings")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("prepare", help="copy a source tree with converted conditions")
    p.add_argument("--model", required=True)
    p.add_argument("--src", required=True)
    p.add_argument("--out", required=True)
    _add_transform_flags(p)
    p.add_argument("--extensions", default=",".join(DEFAULT_EXTENSIONS),
                   help="comma-separated file extensions to rewrite (default: .c,.h)")
    p.add_argument("--report", help="CSV report path (default: <out>.report.csv)")
    p.add_argument("--jobs", type=_positive, default=1)

    p = sub.add_parser("check", help="convert one condition and verify it exhaustively")
    p.add_argument("--model", required=True)
    p.add_argument("--cond", required=True)
    _add_transform_flags(p)
    p.add_argument("--semantics", choices=["strict", "cpp"], default="strict")
    p.add_argument("--guard", type=_positive, default=DEFAULT_GUARD,
                   help="maximum number of configurations to enumerate")

    p = sub.add_parser("bench", help="run a scaling series")
    p.add_argument("--series", choices=["conditions", "ranges"], required=True)
    p.add_argument("--out", default=".", help="directory for bench.csv and companions")
    p.add_argument("--start", type=_positive)
    p.add_argument("--stop", type=_positive)
    p.add_argument("--step", type=_positive)
    p.add_argument("--files", type=_positive, default=100)
    p.add_argument("--repeats", type=_positive, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--limit", type=_positive,
                   help="combination limit (conditions: 1000, ranges: none)")
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--gnuplot", action="store_true", help="also write <series>.dat")
    p.add_argument("--figures", action="store_true", help="also render <series>.png")

    p = sub.add_parser("gen", help="generate a synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--files", type=_positive, default=100)
    p.add_argument("--conditions", type=_positive, default=10)
    p.add_argument("--variables", type=_positive, default=5)
    p.add_argument("--range-size", type=_positive, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-rule-coverage", action="store_true")
    return parser


def dump_argv(parser, args):
    """Render ``args`` as a command line that reproduces them."""
    out = []
    for action in parser._actions:
        if action.dest in ("help", "dump_config", "command"):
            continue
        if action.dest == "verbose":
            out += ["-v"] * args.verbose
        elif action.dest == "quiet":
            if args.quiet:
                out.append("--quiet")
    out.append(args.command)
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for action in sub.choices[args.command]._actions:
        if action.dest == "help":
            continue
        value = getattr(args, action.dest)
        flag = action.option_strings[0]
        if isinstance(action, argparse._StoreTrueAction):
            if value:
                out.append(flag)
        elif value is not None:
            out += [flag, str(value)]
    return shlex.join(out)


def _config(args):
    return TransformConfig(args.max_combinations, UnknownPolicy(args.undefined_ids))


def _warn(args, lines):
    if not args.quiet:
        for line in lines:
            print(f"warning: {line}", file=sys.stderr)


def cmd_prepare(args):
    model = read_model(args.model)
    exts = tuple(e if e.startswith(".") else "." + e for e in args.extensions.split(",") if e)
    report = rewrite_tree(args.src, args.out, model, _config(args), exts, jobs=args.jobs)
    _warn(args, report.warnings)
    path = args.report or os.path.normpath(args.out) + ".report.csv"
    write_report_csv(report, path)
    if args.verbose:
        for s in report.sites:
            print(f"{s.file}:{s.line}: {s.kind} {s.outcome.value} {s.reason}".rstrip())
    print(report.summary())
    print(f"report written to {path}")
    return EXIT_OK


def cmd_check(args):
    model = read_model(args.model)
    try:
        text, res = check_text(args.cond, model, _config(args), args.semantics, args.guard)
    except SkipCondition as exc:
        _warn(args, [f"condition skipped: {exc}"])
        print(f"SKIPPED ({exc.reason.value})")
        return EXIT_OK
    _warn(args, res.warnings)
    print(text)
    print(res.describe())
    return EXIT_COUNTEREXAMPLE if res.verdict is Verdict.COUNTEREXAMPLE else EXIT_OK


def cmd_bench(args):
    os.makedirs(args.out, exist_ok=True)

    def progress(row):
        if args.verbose:
            print(f"{row.series} {row.param}: {row.ms:.1f} ms, {row.fallbacks} fallbacks, "
                  f"max {row.max_tuples} combinations", file=sys.stderr)

    common = dict(files=args.files, repeats=args.repeats, seed=args.seed, jobs=args.jobs,
                  progress=progress)
    if args.series == "conditions":
        rows = bench.run_series_conditions(
            args.start or 50, args.stop or 1000, args.step or 50,
            limit=args.limit or 1000, **common)
    else:
        rows = bench.run_series_ranges(
            args.start or 2, args.stop or 18, args.step or 1, limit=args.limit, **common)
    path = os.path.join(args.out, "bench.csv")
    bench.write_bench_csv(rows, path)
    written = [path]
    if args.gnuplot:
        written += bench.write_gnuplot(rows, args.out)
    if args.figures:
        from intprop.report import render_figures

        written += render_figures(rows, args.out)
    for p in written:
        print(p)
    return EXIT_OK


def cmd_gen(args):
    spec = bench.CorpusSpec(args.files, args.conditions, args.variables, args.range_size,
                            args.seed, not args.no_rule_coverage)
    src, model = bench.generate_corpus(spec, args.out)
    print(f"{spec.total_conditions} conditions in {src}")
    print(f"model written to {model}")
    return EXIT_OK


COMMANDS = {"prepare": cmd_prepare, "check": cmd_check, "bench": cmd_bench, "gen": cmd_gen}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    if args.dump_config:
        print(dump_argv(parser, args))
        return EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (NameCollision, GuardExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ModelError as exc:
        print(f"error: model: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def run():
    sys.exit(main())
