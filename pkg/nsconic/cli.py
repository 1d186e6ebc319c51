from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .errors import MaxIterationsExceeded, NsconicError, ParseError
from .formats import parse_problem, read_trace, solution_payload, write_json, write_problem, write_trace
from .problems import STANDARD_PROBLEMS
from .report import render_markdown_report
from .solver import CORRECTORS, MODES, SolveResult, SolverConfig, solve
from .verifier import audit_trace, count_failures, summarize

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNDECIDED = 2
EXIT_VERDICTS = 3


def _emit(payload: dict, pretty: bool) -> None:
    print(json.dumps(payload, indent=2 if pretty else None))


def _finish_solve(args: argparse.Namespace, result: SolveResult) -> None:
    if args.trace:
        p = result.parameters
        write_trace(result.trace, args.trace, nu=result.nu, beta=p.beta, eta=p.eta)
    payload = solution_payload(result)
    if args.json_out:
        write_json(payload, args.json_out)
    _emit(payload, args.pretty)


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        config = SolverConfig(
            mode=args.mode,
            epsilon=args.epsilon,
            max_iterations=args.max_iters,
            alpha=args.alpha,
            gamma=args.gamma,
            beta=args.beta,
            eta=args.eta,
            verify=args.verify,
            corrector=args.corrector,
        )
        problem = parse_problem(args.problem)
        result = solve(problem, config)
    except MaxIterationsExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        if e.result is not None:
            _finish_solve(args, e.result)
            if e.result.verdict_failures:
                return EXIT_VERDICTS
        return EXIT_UNDECIDED
    except NsconicError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    _finish_solve(args, result)
    code = result.exit_code()
    if code == EXIT_VERDICTS:
        print(f"error: {result.verdict_failures} verdict failures", file=sys.stderr)
    elif code == EXIT_UNDECIDED:
        print(f"warning: run ended with status {result.status}", file=sys.stderr)
    return code


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        trace = read_trace(args.trace)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    verdicts = audit_trace(trace.rows, trace.nu, trace.beta, trace.eta)
    failures = count_failures(verdicts)
    _emit({
        "trace": str(args.trace),
        "rows": len(trace.rows),
        "failures": failures,
        "summary": summarize(verdicts),
        "first_failures": [v.to_dict() for v in verdicts if v.failed][:20],
    }, args.pretty)
    return EXIT_VERDICTS if failures else EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    from .selftest import run_selftest

    if args.write_problems:
        args.write_problems.mkdir(parents=True, exist_ok=True)
        for name, make in STANDARD_PROBLEMS.items():
            write_problem(make(), args.write_problems / f"{name}.json")
    cases = run_selftest()
    _emit({"cases": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in cases]}, args.pretty)
    return EXIT_OK if all(c.passed for c in cases) else EXIT_ERROR


def cmd_report(args: argparse.Namespace) -> int:
    try:
        data = json.loads(Path(args.solution).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        print(f"error: cannot read {args.solution}: {e}", file=sys.stderr)
        return EXIT_ERROR
    args.out.write_text(render_markdown_report(data), encoding="utf-8")
    print(f"Wrote report to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nsconic", description="Predictor-corrector solver for nonsymmetric conic programs")
    p.add_argument("-v", "--verbose", action="count", default=0, help="Log INFO (-v) or DEBUG (-vv) to stderr")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", help="Solve a problem file")
    s.add_argument("problem", type=Path, help="Path to problem JSON")
    s.add_argument("--mode", choices=list(MODES), default="theoretical", help="Fixed schedule or step-size search")
    s.add_argument("--epsilon", type=float, default=1e-8, help="Target for mu_e and relative ||G||")
    s.add_argument("--max-iters", type=int, help="Iteration cap (default scales with nu and epsilon)")
    s.add_argument("--alpha", type=float, help="Adaptive mode: largest step size tried")
    s.add_argument("--gamma", type=float, help="Adaptive mode: centering weight")
    s.add_argument("--beta", type=float, default=0.9, help="Neighborhood parameter beta")
    s.add_argument("--eta", type=float, help="Neighborhood radius for ||x - mu x~||_x")
    s.add_argument("--corrector", choices=list(CORRECTORS), default="scaled", help="Corrector system (hessian: adaptive only)")
    s.add_argument("--trace", type=Path, help="Write the iteration trace CSV here")
    s.add_argument("--verify", action="store_true", help="Check every iteration inline; exit 3 on any failure")
    s.add_argument("--json-out", type=Path, help="Also write the solution JSON here")
    s.add_argument("--pretty", action="store_true", help="Pretty-print JSON output")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="Audit a trace CSV")
    v.add_argument("trace", type=Path, help="Path to trace CSV (from solve --trace)")
    v.add_argument("--pretty", action="store_true", help="Pretty-print JSON output")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("selftest", help="Run the built-in acceptance suite")
    t.add_argument("--write-problems", type=Path, help="Also export the standard problems as JSON into this directory")
    t.add_argument("--pretty", action="store_true", help="Pretty-print JSON output")
    t.set_defaults(func=cmd_selftest)

    r = sub.add_parser("report", help="Write a Markdown report from solution JSON")
    r.add_argument("solution", type=Path, help="Path to JSON (from solve --json-out)")
    r.add_argument("--out", type=Path, default=Path("nsconic-report.md"), help="Output Markdown file")
    r.set_defaults(func=cmd_report)

    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
