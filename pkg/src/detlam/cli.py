"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from detlam.compiler import compile_machine
from detlam.harness import DEFAULT_FUEL, FAMILIES, bench, lambda_run, trace, verify
from detlam.machine import SpecError, format_string, load_spec, parse_input
from detlam.syntax import pretty
from detlam.terms import validate_det

TRACE_FIELDS = """\
trace records are JSON objects, one per line, with fields:
  step       1-based index of the beta-step
  redex      list of "fun" edges from the root to the contracted redex
  pre_size   size of the term before the step
  post_size  size of the term after the step
  checkpoint null, or {left, head, right, state} when the reduct is trans k C
"""


class InputError(Exception):
    pass


def _default_fuel() -> int:
    value = os.environ.get("DETLAM_FUEL")
    if value is None:
        return DEFAULT_FUEL
    try:
        return int(value)
    except ValueError:
        raise InputError(f"DETLAM_FUEL must be an integer, got {value!r}") from None


def _load(path: str):
    try:
        return load_spec(path)
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    except SpecError as e:
        raise InputError(f"{path}: {e}") from None


def _input(tm, text: str) -> tuple:
    try:
        return parse_input(tm, text)
    except ValueError as e:
        raise InputError(str(e)) from None


def _sizes(text: str) -> list:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"bad size list {text!r}; use 0..8 or 0,2,4") from None


def cmd_compile(args) -> int:
    tm = _load(args.spec)
    cm = compile_machine(tm)
    text = pretty(cm.term_full)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    ok = bool(validate_det(cm.term_full)) and not cm.term_full.fv
    print(
        f"size={cm.term_full.size} |sigma|={len(tm.sigma)} |sigma+blank|={len(cm.sigma_box)} "
        f"|Q|={len(tm.states)} closed-det={'yes' if ok else 'no'}",
        file=sys.stderr,
    )
    return 0


def cmd_run(args) -> int:
    tm = _load(args.spec)
    s = _input(tm, args.input)
    cm = compile_machine(tm)
    lam = lambda_run(cm, s, args.fuel)
    if lam.halted:
        status = "halted" if lam.output is not None else "stuck"
        print(f"output: {format_string(lam.output) if lam.output is not None else '?'}")
    else:
        status = "diverged-or-budget"
        print("output: -")
    print(f"beta-steps: {lam.steps}")
    print(f"transitions: {max(len(lam.checkpoints) - 1, 0)}")
    print(f"status: {status}")
    return 0


def cmd_verify(args) -> int:
    tm = _load(args.spec)
    inputs = [_input(tm, x) for x in args.inputs.split(",")]
    cm = compile_machine(tm)
    failed = 0
    for s in inputs:
        report = verify(cm, s, args.fuel)
        label = format_string(s)
        if report.passed:
            print(
                f"PASS {label}: transitions={report.transitions} beta-steps={report.beta_steps} "
                f"output={format_string(report.lambda_output)} spread={report.spread}"
            )
        else:
            failed += 1
            where = f" (first mismatch at checkpoint {report.first_mismatch})" if report.first_mismatch is not None else ""
            print(f"FAIL {label}: {report.message}{where}")
    return 1 if failed else 0


def cmd_bench(args) -> int:
    tm = _load(args.spec)
    cm = compile_machine(tm)
    try:
        report = bench(cm, args.family, _sizes(args.sizes), args.fuel)
    except ValueError as e:
        raise InputError(str(e)) from None
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return 0 if report.passed else 1


def cmd_trace(args) -> int:
    tm = _load(args.spec)
    s = _input(tm, args.input)
    cm = compile_machine(tm)
    for record in trace(cm, s, args.limit):
        print(json.dumps(record.to_dict(), sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="detlam", description="Compile Turing machines to the deterministic lambda-calculus.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="print the compiled machine term")
    c.add_argument("spec")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compile)

    fuel_help = f"beta-step budget (default {DEFAULT_FUEL}, or $DETLAM_FUEL)"
    r = sub.add_parser("run", help="evaluate the compiled machine on an input")
    r.add_argument("spec")
    r.add_argument("input")
    r.add_argument("--fuel", type=int, help=fuel_help)
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="check the lambda run against the simulator")
    v.add_argument("spec")
    v.add_argument("--inputs", required=True, help="comma-separated inputs; an empty item is the empty string")
    v.add_argument("--fuel", type=int, help=fuel_help)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="measure beta-steps across input sizes")
    b.add_argument("spec")
    b.add_argument("--family", choices=sorted(FAMILIES), default="unary",
                   help="unary: first symbol repeated; binary: first two symbols alternating")
    b.add_argument("--sizes", default="0..8")
    b.add_argument("--fuel", type=int, help=fuel_help)
    b.set_defaults(func=cmd_bench)

    t = sub.add_parser("trace", help="one JSON record per beta-step",
                       epilog=TRACE_FIELDS, formatter_class=argparse.RawDescriptionHelpFormatter)
    t.add_argument("spec")
    t.add_argument("input")
    t.add_argument("--limit", type=int, default=1000)
    t.set_defaults(func=cmd_trace)
    return p


def main(argv=None) -> int:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "fuel", 0) is None:
            args.fuel = _default_fuel()
        if getattr(args, "fuel", 0) < 0 or getattr(args, "limit", 0) < 0:
            raise InputError("fuel and limit must be non-negative")
        return args.func(args)
    except InputError as e:
        print(f"detlam: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
