"""Turing machines compiled to the deterministic lambda-calculus, with a
beta-step counting evaluator and a reference simulator."""

from detlam.compiler import CompiledMachine, compile_machine, decode_config, encode_config
from detlam.machine import Configuration, TMSpec, load_spec, parse_spec, run
from detlam.syntax import parse, pretty
from detlam.terms import App, Lam, Term, Var, alpha_equivalent, evaluate, step, validate_det

__all__ = [
    "App", "Lam", "Term", "Var", "alpha_equivalent", "evaluate", "step", "validate_det",
    "parse", "pretty", "Configuration", "TMSpec", "load_spec", "parse_spec", "run",
    "CompiledMachine", "compile_machine", "decode_config", "encode_config",
]
