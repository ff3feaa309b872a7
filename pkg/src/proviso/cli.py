"""Command-line entry point.

Exit codes are a stable contract:
  0  goal holds / command succeeded
  1  semantic error (ERROR diagnostics, unsupported clause content)
  2  usage, I/O, or parse failure
  3  evaluated successfully and the goal does not hold
"""

from __future__ import annotations

import argparse
import socket
import sys
from pathlib import Path

from .errors import (
    EngineError,
    NonPropositional,
    OrphanException,
    ParseError,
    UnsupportedShape,
)
from . import lab
from .loader import (
    Severity,
    has_errors,
    parse_fact_file,
    parse_rule_file,
    serialize_rule_base,
    validate,
)
from .proleg import export_proleg, import_proleg
from .reasoner import Strategy, TraceFormat, evaluate, explain

EXIT_OK = 0
EXIT_SEMANTIC = 1
EXIT_USAGE = 2
EXIT_NOT_HELD = 3

STRATEGY_CHOICES = {
    "exception-first": Strategy.EXCEPTION_FIRST,
    "conditions-first": Strategy.CONDITIONS_FIRST,
    "racing": Strategy.RACING,
}


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _print_diagnostics(diagnostics, quiet: bool) -> None:
    for d in diagnostics:
        if quiet and d.severity is Severity.INFO:
            continue
        print(d.render(), file=sys.stderr)


def _load_rule_base(rules_path: str, quiet: bool):
    """Read + parse + validate; returns (rb, exit_code_or_None)."""
    try:
        rules = parse_rule_file(_read(rules_path))
    except OSError as e:
        print(f"error: cannot read {rules_path}: {e}", file=sys.stderr)
        return None, EXIT_USAGE
    except EngineError as e:
        print(f"error: {rules_path}: {e}", file=sys.stderr)
        return None, EXIT_USAGE
    rb, diagnostics = validate(rules)
    _print_diagnostics(diagnostics, quiet)
    if rb is None:
        return None, EXIT_SEMANTIC
    return rb, None


def _load_facts(facts_path: str, quiet: bool):
    try:
        facts, diagnostics = parse_fact_file(_read(facts_path))
    except OSError as e:
        print(f"error: cannot read {facts_path}: {e}", file=sys.stderr)
        return None, EXIT_USAGE
    except EngineError as e:
        print(f"error: {facts_path}: {e}", file=sys.stderr)
        return None, EXIT_USAGE
    _print_diagnostics(diagnostics, quiet)
    return facts, None


def cmd_validate(args) -> int:
    try:
        rules = parse_rule_file(_read(args.rules))
    except OSError as e:
        print(f"error: cannot read {args.rules}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except EngineError as e:
        print(f"error: {args.rules}: {e}", file=sys.stderr)
        return EXIT_USAGE
    facts = None
    if args.facts:
        facts, code = _load_facts(args.facts, args.quiet)
        if code is not None:
            return code
    rb, diagnostics = validate(rules, facts)
    for d in diagnostics:
        if args.quiet and d.severity is Severity.INFO:
            continue
        print(d.render())
    if rb is None:
        return EXIT_SEMANTIC
    if not args.quiet:
        print(f"ok: {len(rb)} rule(s)")
    return EXIT_OK


def cmd_eval(args) -> int:
    rb, code = _load_rule_base(args.rules, args.quiet)
    if code is not None:
        return code
    facts, code = _load_facts(args.facts, args.quiet)
    if code is not None:
        return code
    try:
        verdict = evaluate(rb, facts, args.goal, STRATEGY_CHOICES[args.strategy])
    except EngineError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        sys.stdout.write(explain(verdict, TraceFormat.STRUCTURED).decode("utf-8"))
        sys.stdout.write("\n")
    else:
        if verdict.holds:
            print(f"{verdict.goal}: HOLDS")
        else:
            print(f"{verdict.goal}: DOES NOT HOLD ({verdict.root.status.value})")
        if args.explain:
            sys.stdout.write(explain(verdict, TraceFormat.TEXT).decode("utf-8"))
    return EXIT_OK if verdict.holds else EXIT_NOT_HELD


def cmd_bench(args) -> int:
    try:
        params = lab.GenParams(
            n_rules=args.rules, max_conditions=args.max_conditions,
            max_exceptions=args.max_exceptions, max_depth=args.max_depth,
            p_any=args.p_any, p_fact=args.p_fact, seed=args.seed)
        report = lab.bench(params, args.trials)
    except EngineError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    with out.open("w", newline="") as fh:
        lab.write_csv(report, fh)
    written = [out]
    if not args.no_figures:
        from .report import render_bench_figures  # matplotlib import deferred

        written += render_bench_figures(report, out)
    if not args.quiet:
        for path in written:
            print(f"wrote {path}")
        for strategy, summary in report.stats_by_strategy.items():
            print(f"{strategy.value}: mean {summary.mean:.2f} propositions "
                  f"(min {summary.min}, max {summary.max})")
        print(f"mismatches: {len(report.mismatches)}")
    for line in lab.mismatch_lines(report):
        print(f"MISMATCH {line}", file=sys.stderr)
    return EXIT_OK if not report.mismatches else EXIT_SEMANTIC


def cmd_export_proleg(args) -> int:
    rb, code = _load_rule_base(args.rules, args.quiet)
    if code is not None:
        return code
    text = export_proleg(rb)
    if args.out:
        Path(args.out).write_bytes(text)
        if not args.quiet:
            print(f"wrote {args.out}")
    else:
        sys.stdout.write(text.decode("utf-8"))
    return EXIT_OK


def cmd_import_proleg(args) -> int:
    try:
        content = _read(args.clauses)
    except OSError as e:
        print(f"error: cannot read {args.clauses}: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rb, diagnostics = import_proleg(content)
    except ParseError as e:
        print(f"error: {args.clauses}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (NonPropositional, UnsupportedShape, OrphanException) as e:
        print(f"error: {args.clauses}: {e}", file=sys.stderr)
        return EXIT_SEMANTIC
    _print_diagnostics(diagnostics, args.quiet)
    if rb is None:
        return EXIT_SEMANTIC
    text = serialize_rule_base(rb)
    if args.out:
        Path(args.out).write_bytes(text)
        if not args.quiet:
            print(f"wrote {args.out}")
    else:
        sys.stdout.write(text.decode("utf-8"))
    return EXIT_OK


def cmd_serve(args) -> int:
    try:
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((args.host, args.port))
        probe.close()
    except OSError as e:
        print(f"error: cannot bind {args.host}:{args.port}: {e}", file=sys.stderr)
        return EXIT_USAGE
    import uvicorn

    from .service import create_app

    app = create_app(rules_dir=args.rules_dir)
    uvicorn.run(app, host=args.host, port=args.port,
                log_level="warning" if args.quiet else "info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proviso",
        description="Defeasible rule engine: rules with conditions and exceptions, "
                    "strategy-pluggable evaluation, clause-text bridge, cost lab.")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress informational output")
    parser.add_argument("--format", choices=("text", "json"), default="text",
                        help="output format where a command supports it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and statically check a rule file")
    p.add_argument("rules")
    p.add_argument("facts", nargs="?", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("eval", help="evaluate a goal against rules and case facts")
    p.add_argument("rules")
    p.add_argument("facts")
    p.add_argument("goal")
    p.add_argument("--strategy", choices=sorted(STRATEGY_CHOICES),
                   default="exception-first")
    p.add_argument("--explain", action="store_true",
                   help="print the derivation trace")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="differential strategy benchmark over "
                                     "generated rule bases")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rules", type=int, default=12, help="rules per generated base")
    p.add_argument("--max-conditions", type=int, default=3)
    p.add_argument("--max-exceptions", type=int, default=2)
    p.add_argument("--max-depth", type=int, default=4)
    p.add_argument("--p-any", type=float, default=0.5)
    p.add_argument("--p-fact", type=float, default=0.4)
    p.add_argument("--out", default="bench_report.csv")
    p.add_argument("--no-figures", action="store_true",
                   help="skip rendering the cost figures next to the CSV")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-proleg", help="render a rule file as clause text")
    p.add_argument("rules")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export_proleg)

    p = sub.add_parser("import-proleg", help="rebuild a rule file from clause text")
    p.add_argument("clauses")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_import_proleg)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--rules-dir", default=None,
                   help="directory of rule files to preload")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
