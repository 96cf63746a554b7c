"""Command-line entry point: ``dynsem run|demo|check|repl``.

Exit codes: 0 success (an absurd verdict is a result, not a failure),
2 parse or compile error (including an unreadable file), 3 engine error,
4 property-suite failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import checks
from .errors import CompileError, DynsemError, ParseError
from .lang.compiler import compile_text
from .lang.repl import DEMOS, demo_text, repl_loop
from .lang.report import RunReport
from .lang.runner import run_script

EXIT_OK, EXIT_SYNTAX, EXIT_ENGINE, EXIT_CHECK = 0, 2, 3, 4


def _diagnose(source: str, exc: DynsemError) -> None:
    kind = "parse error" if isinstance(exc, ParseError) else (
        "compile error" if isinstance(exc, CompileError) else "error")
    if exc.position is not None:
        line, col = exc.position
        print(f"{source}:{line}:{col}: {kind}: {exc.message}", file=sys.stderr)
    else:
        print(f"{source}: {kind}: {exc.message}", file=sys.stderr)
    if isinstance(exc, ParseError) and exc.excerpt:
        print(exc.excerpt, file=sys.stderr)


def _fmt_value(v) -> str:
    if isinstance(v, list):
        return "{" + ", ".join(map(str, v)) + "}" if v else "∅"
    return str(v)


def render_text(report: RunReport, show_trace: bool) -> str:
    lines = []
    for d in report.diagnostics:
        lines.append(f"note: {d}")
    for r in report.results:
        head = f"{r.command} {r.target} [{r.engine}] at {r.position}"
        if r.verdict:
            head += f": {r.verdict}"
        lines.append(head)
        if r.trace:
            steps = r.trace if show_trace else r.trace[-1:]
            for step in steps:
                rest = ", ".join(f"{k}={_fmt_value(v)}" for k, v in sorted(step.items()) if k != "step")
                lines.append(f"  {step['step']}: {rest}")
        if r.bindings:
            lines.append("  bindings: " + ", ".join(f"{k} ↦ {v}" for k, v in r.bindings.items()))
        if r.probabilities:
            for k, v in r.probabilities.items():
                lines.append(f"  {k} = {v!r}")
        if r.order_effects:
            oe = r.order_effects
            if "orders" in oe:
                for key, entry in oe["orders"].items():
                    detail = ", ".join(f"{k}={_fmt_value(v)}" for k, v in sorted(entry.items()) if k != "utterances")
                    lines.append(f"  {key}: {detail}")
                lines.append(f"  divergent: {str(oe['divergent']).lower()}")
            else:
                for key in ("a_first", "b_first", "differences"):
                    lines.append(f"  {key}: " + ", ".join(f"{k}={v:.12g}" for k, v in oe[key].items()))
                lines.append(f"  commutator norm = {oe['commutator_norm']:.12g}")
                lines.append(f"  QQ discrepancy = {oe['qq_discrepancy']:.3g}")
    return "\n".join(lines)


def _execute(source: str, text: str, as_json: bool, trace: bool) -> int:
    try:
        script = compile_text(text)
    except (ParseError, CompileError) as exc:
        _diagnose(source, exc)
        return EXIT_SYNTAX
    try:
        report = run_script(script, with_trace=trace)
    except DynsemError as exc:
        _diagnose(source, exc)
        return EXIT_ENGINE
    print(report.to_json() if as_json else render_text(report, trace))
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        print(f"{args.file}: cannot read script: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    return _execute(args.file, text, args.json, args.trace)


def cmd_demo(args) -> int:
    return _execute(f"<demo {args.name}>", demo_text(args.name), args.json, True)


def cmd_check(args) -> int:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("DYNSEM_SEED", checks.DEFAULT_SEED))
    results = checks.run_all(seed, args.cases)
    for r in results:
        print(r.line())
        for v in r.violations[:5]:
            print(f"    {v}")
    failed = [r for r in results if not r.passed]
    print(f"seed {seed}: {len(results) - len(failed)}/{len(results)} suites passed")
    return EXIT_CHECK if failed else EXIT_OK


def cmd_repl(args) -> int:
    repl_loop(sys.stdin, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynsem", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a DSL script")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="emit the JSON report")
    p.add_argument("--trace", action="store_true", help="include every intermediate state")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("demo", help="run one of the bundled scenarios")
    p.add_argument("name", choices=DEMOS)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("check", help="run the randomized property suites")
    p.add_argument("--seed", type=int, default=None, help="default: $DYNSEM_SEED or %d" % checks.DEFAULT_SEED)
    p.add_argument("--cases", type=int, default=None, help="cases per suite (default: per-suite)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("repl", help="interactive session")
    p.set_defaults(func=cmd_repl)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DynsemError as exc:
        _diagnose("dynsem", exc)
        return EXIT_ENGINE
    except Exception as exc:  # last resort: never a traceback
        print(f"dynsem: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
