"""``ccsp`` command line.

Exit codes: 0 success, 1 parse error or unreadable input, 2 semantic error
(undefined entry, unsupported BPEL element, unknown law), 3 result limited
by bounds, 4 inequivalence or failed check.  Results go to stdout and
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import terms as t
from .analyzer import (
    LAWS,
    UnknownLaw,
    check_compensation_consistency,
    check_equivalence,
    check_law,
    enumerate_traces,
)
from .analyzer import reports
from .bpel import (
    BpelError,
    UnsupportedElement,
    default_naming,
    load_alias_table,
    parse_bpel,
    translate,
)
from .dsl import ParseError, SourceFile, parse_model, print_model

EXIT_OK, EXIT_PARSE, EXIT_SEMANTIC, EXIT_BOUND, EXIT_FAIL = 0, 1, 2, 3, 4
_BPEL_SUFFIXES = (".bpel", ".xml")


class _Exit(Exception):
    def __init__(self, code: int, message: str | None = None):
        super().__init__(message)
        self.code = code
        self.message = message


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _color() -> bool:
    return os.environ.get("CCSP_COLOR", "0") == "1"


_COLORS = {t.COMMIT: "\x1b[32m", t.THROW: "\x1b[31m", t.YIELD: "\x1b[33m"}


def _render(trace: t.CompletedTrace) -> str:
    text = trace.render()
    if not _color():
        return text
    return f"{text[:-len(trace.terminal.symbol())]}{_COLORS[trace.terminal]}{trace.terminal.symbol()}\x1b[0m"


# -- loading ----------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise _Exit(EXIT_PARSE, f"{path}: file not found") from None
    except OSError as exc:
        raise _Exit(EXIT_PARSE, f"{path}: {exc.strerror}") from None


def _aliases(path):
    if path is None:
        return {}
    try:
        return load_alias_table(path)
    except FileNotFoundError:
        raise _Exit(EXIT_PARSE, f"{path}: file not found") from None
    except BpelError as exc:
        raise _Exit(EXIT_PARSE, f"{path}: {exc}") from None


def _translate(path: str, alias_path):
    """Parse and translate a BPEL file; returns (model, naming, warnings)."""
    try:
        tree = parse_bpel(_read(path))
    except UnsupportedElement as exc:
        raise _Exit(EXIT_SEMANTIC, f"{path}: {exc}") from None
    except BpelError as exc:
        raise _Exit(EXIT_PARSE, f"{path}: {exc}") from None
    naming, warnings = default_naming(tree).with_aliases(_aliases(alias_path))
    try:
        model = translate(tree, naming)
    except (BpelError, ValueError) as exc:
        raise _Exit(EXIT_SEMANTIC, f"{path}: {exc}") from None
    return model, naming, warnings


def _load(path: str, alias_path=None):
    """Return (model, default entry) for a .ccsp or BPEL file."""
    if path.lower().endswith(_BPEL_SUFFIXES):
        model, _, warnings = _translate(path, alias_path)
        for w in warnings:
            print(f"{path}: warning: {w}", file=sys.stderr)
        return model, next(iter(model.definitions))
    source = SourceFile(path, _read(path))
    try:
        model = parse_model(source)
    except ParseError as exc:
        raise _Exit(EXIT_PARSE, "\n".join(f"{path}:{d}" for d in exc.diagnostics)) from None
    except t.CcspError as exc:
        raise _Exit(EXIT_SEMANTIC, f"{path}: {exc}") from None
    if "System" in model.definitions:
        default = "System"
    elif model.definitions:
        default = list(model.definitions)[-1]
    else:
        default = None
    return model, default


def _split_target(text: str):
    """``file.ccsp:Entry`` -> (file, Entry); a bare path gives (path, None)."""
    for suffix in (".ccsp",) + _BPEL_SUFFIXES:
        marker = suffix + ":"
        at = text.lower().find(marker)
        if at >= 0:
            cut = at + len(suffix)
            return text[:cut], text[cut + 1:]
    return text, None


def _bounds(args) -> t.Bounds:
    return t.Bounds(max_events=args.max_events, max_traces=args.max_traces)


def _emit(args, report: dict, text: str):
    out = reports.dumps(report) if args.format == "json" else text
    if getattr(args, "output", None) and args.command != "translate":
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)


# -- commands -----------------------------------------------------------------------


def cmd_run(args) -> int:
    model, default = _load(args.file, args.aliases)
    entry = args.entry or default
    if entry is None:
        raise _Exit(EXIT_SEMANTIC, f"{args.file}: no definitions and no --entry")
    result = enumerate_traces(model, entry, args.args, _bounds(args))
    lines = [_render(tr) for tr in result.traces]
    summary = f"{len(result.traces)} trace(s)"
    if not result.exhaustive:
        summary += ", truncated at " + ", ".join(result.truncations)
    _emit(args, reports.run_report(result), "\n".join(lines + [f"-- {summary}"]) + "\n")
    return EXIT_OK if result.exhaustive else EXIT_BOUND


def cmd_translate(args) -> int:
    model, naming, warnings = _translate(args.file, args.aliases)
    for w in warnings:
        print(f"{args.file}: warning: {w}", file=sys.stderr)
    text = print_model(model)
    rows = [(d, e) for d, e in naming.table()]
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        table = "\n".join(f"{d}  {e}" for d, e in rows) + "\n"
        _emit(args, reports.translate_report(text, args.output, rows, warnings), table)
    else:
        sys.stdout.write(text if args.format == "text" else reports.dumps(
            reports.translate_report(text, None, rows, warnings)))
        if args.format == "text":
            for d, e in rows:
                print(f"{d}  {e}", file=sys.stderr)
    return EXIT_OK


def cmd_compare(args) -> int:
    path1, entry1 = _split_target(args.first)
    path2, entry2 = _split_target(args.second)
    m1, d1 = _load(path1, args.aliases)
    m2, d2 = _load(path2, args.aliases)
    entry1 = entry1 or args.entry or d1
    entry2 = entry2 or args.entry2 or args.entry or d2
    if entry1 is None or entry2 is None:
        raise _Exit(EXIT_SEMANTIC, "no entry to compare")
    verdict = check_equivalence(m1, entry1, m2, entry2, _bounds(args), args1=args.args)
    if verdict.equal:
        text = "equal" + (" up to bound" if verdict.up_to_bound else "") + "\n"
        code = EXIT_BOUND if verdict.up_to_bound else EXIT_OK
    else:
        owner = path1 if verdict.side == "first" else path2
        text = f"not equal: {_render(verdict.counterexample)} only in {owner}"
        if verdict.up_to_bound:
            text += " (bounds reached)"
        text += "\n"
        code = EXIT_FAIL
    _emit(args, reports.compare_report(verdict), text)
    return code


def cmd_check(args) -> int:
    if args.compensation:
        model, default = _load(args.compensation, args.aliases)
        entry = args.entry or default
        if entry is None:
            raise _Exit(EXIT_SEMANTIC, f"{args.compensation}: no definitions and no --entry")
        report = check_compensation_consistency(model, entry, args.args, _bounds(args))
        status = "consistent" if report.consistent else "inconsistent"
        lines = [f"{status}: {report.observations} interrupted run(s) checked"]
        lines += [f"  {f}" for f in report.failures]
        if not report.exhaustive:
            lines.append("  (bounds reached)")
        _emit(args, reports.consistency_report(report), "\n".join(lines) + "\n")
        if not report.consistent:
            return EXIT_FAIL
        return EXIT_OK if report.exhaustive else EXIT_BOUND
    names = []
    for group in args.laws or ["all"]:
        for name in group.split(","):
            name = name.strip()
            names.extend(LAWS if name == "all" else [name])
    unknown = [n for n in names if n not in LAWS]
    if unknown:
        raise _Exit(EXIT_SEMANTIC, f"unknown law {unknown[0]}; known: {', '.join(LAWS)}")
    results = [check_law(name, args.samples, args.seed) for name in dict.fromkeys(names)]
    lines = []
    for r in results:
        lines.append(f"{'pass' if r.passed else 'FAIL'}  {r.law}  ({r.instances} instance(s))")
        if r.counterexample:
            lines.append(f"      counterexample: {r.counterexample}")
    _emit(args, reports.law_report(results, args.seed, args.samples), "\n".join(lines) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# -- argument parsing ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-events", type=_positive, default=24, help="longest trace kept (default 24)")
    common.add_argument("--max-traces", type=_positive, default=100_000, help="largest trace set kept (default 100000)")
    common.add_argument("--aliases", help="alias table applied to BPEL inputs")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("-o", "--output", help="write the result to this file")

    entry = argparse.ArgumentParser(add_help=False)
    entry.add_argument("--entry", help="definition name or process expression")
    entry.add_argument("--args", help="comma-separated arguments for a parameterised entry")

    parser = argparse.ArgumentParser(prog="ccsp", description="Compensating CSP workbench.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common, entry], help="enumerate the traces of a process")
    run.add_argument("file")
    run.set_defaults(func=cmd_run)

    tr = sub.add_parser("translate", parents=[common], help="translate BPEL to a .ccsp model")
    tr.add_argument("file")
    tr.set_defaults(func=cmd_translate)

    cmp_ = sub.add_parser("compare", parents=[common, entry], help="compare two processes by traces")
    cmp_.add_argument("first", help="FILE or FILE:ENTRY")
    cmp_.add_argument("second", help="FILE or FILE:ENTRY")
    cmp_.add_argument("--entry2", help="entry of the second file")
    cmp_.set_defaults(func=cmd_compare)

    chk = sub.add_parser("check", parents=[common, entry], help="check algebraic laws or compensation consistency")
    chk.add_argument("--laws", "--law", dest="laws", action="append",
                     help="comma-separated law names or 'all' (default all)")
    chk.add_argument("--samples", type=_positive, default=200)
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--compensation", metavar="FILE", help="check compensation consistency of FILE instead")
    chk.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        if exc.message:
            print(exc.message, file=sys.stderr)
        return exc.code
    except ParseError as exc:
        for d in exc.diagnostics:
            print(d, file=sys.stderr)
        return EXIT_PARSE
    except UnknownLaw as exc:
        print(f"ccsp: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except (t.CcspError, ValueError) as exc:
        print(f"ccsp: error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
