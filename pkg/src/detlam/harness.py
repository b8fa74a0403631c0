"""Verification driver: lockstep comparison of the compiled term against the
reference simulator, beta-step cost measurement, and traces."""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

from detlam.compiler import CompiledMachine, decode_config, encode_config
from detlam.machine import Configuration, TMSpec, configurations, output_of, transition_kind
from detlam.scott import BLANK, Alphabet, DecodeError, decode_string, encode_string, mk_append, mk_flat, mk_lift
from detlam.terms import App, EvalResult, Status, Term, Var, alpha_equivalent, evaluate, reductions

__all__ = [
    "DEFAULT_FUEL", "Checkpoint", "LambdaRun", "lambda_run", "as_checkpoint",
    "VerifyReport", "verify", "AffineFitError", "fit_exact", "affine_profile",
    "CostModel", "measure_cost_model", "BenchReport", "bench", "FAMILIES",
    "TraceRecord", "trace",
]

DEFAULT_FUEL = 10**7


@dataclass(frozen=True)
class Checkpoint:
    step: int
    config: Optional[Configuration]  # None when the tuple failed to decode


def as_checkpoint(cm: CompiledMachine, t: Term) -> Optional[Term]:
    """The configuration argument if ``t`` has the shape ``trans k C``."""
    if not (isinstance(t, App) and isinstance(t.fun, App)):
        return None
    f = t.fun.fun
    trans = cm.term_trans
    if f is trans or (f.size == trans.size and isinstance(f, App) and alpha_equivalent(f, trans)):
        return t.arg
    return None


def _decode_checkpoint(cm: CompiledMachine, c: Term) -> Optional[Configuration]:
    try:
        return decode_config(cm.machine, c)
    except DecodeError:
        return None


@dataclass
class LambdaRun:
    result: EvalResult
    checkpoints: list
    output: Optional[tuple]
    violations: list = field(default_factory=list)  # step indices outside the fragment

    @property
    def steps(self) -> int:
        return self.result.steps

    @property
    def halted(self) -> bool:
        return self.result.status is Status.NORMAL_FORM


def lambda_run(
    cm: CompiledMachine,
    s: Sequence,
    fuel: int = DEFAULT_FUEL,
    observe: Optional[Callable[[int, Term], None]] = None,
) -> LambdaRun:
    """Evaluate the compiled machine on ``s`` recording every checkpoint."""
    t = cm.apply(s)
    checkpoints = []
    violations = [] if t.det else [0]
    steps = 0
    for steps, t in enumerate(itertools.islice(reductions(t), fuel), 1):
        if not t.det:
            violations.append(steps)
        c = as_checkpoint(cm, t)
        if c is not None:
            checkpoints.append(Checkpoint(steps, _decode_checkpoint(cm, c)))
        if observe is not None:
            observe(steps, t)
    status = Status.FUEL_EXHAUSTED if steps == fuel and _reducible(t) else Status.NORMAL_FORM
    output = None
    if status is Status.NORMAL_FORM:
        try:
            output = decode_string(cm.machine.sigma, t)
        except DecodeError:
            output = None
    return LambdaRun(EvalResult(t, steps, status), checkpoints, output, violations)


def _reducible(t: Term) -> bool:
    while isinstance(t, App):
        t = t.fun
        if not isinstance(t, App):
            return not isinstance(t, Var)
    return False


@dataclass
class VerifyReport:
    input: tuple
    passed: bool
    transitions: int
    beta_steps: int
    oracle_output: Optional[tuple]
    lambda_output: Optional[tuple]
    first_mismatch: Optional[int]  # checkpoint index
    per_transition: list  # beta-steps between consecutive checkpoints
    kinds: list  # transition case of each of those intervals
    violations: list
    message: str = ""

    @property
    def spread(self) -> int:
        return max(self.per_transition) - min(self.per_transition) if self.per_transition else 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["input"] = "".join(self.input)
        for key in ("oracle_output", "lambda_output"):
            if d[key] is not None:
                d[key] = "".join(d[key])
        d["spread"] = self.spread
        return d


def verify(cm: CompiledMachine, s: Sequence, fuel: int = DEFAULT_FUEL) -> VerifyReport:
    """Run both sides on ``s`` and compare configuration by configuration."""
    tm = cm.machine
    s = tm.sigma.check(s)
    lam = lambda_run(cm, s, fuel)
    # the lambda side cannot have made more transitions than it has checkpoints
    oracle = list(itertools.islice(configurations(tm, s), len(lam.checkpoints) + 1))
    halted = oracle[-1].state == tm.final
    oracle_output = output_of(tm, oracle[-1]) if halted else None

    mismatch = None
    message = ""
    for i, (cp, oc) in enumerate(zip(lam.checkpoints, oracle)):
        if cp.config != oc:
            mismatch, message = i, f"checkpoint {i}: lambda side {cp.config}, oracle {oc}"
            break
    if mismatch is None and lam.halted and len(lam.checkpoints) != len(oracle):
        mismatch = min(len(lam.checkpoints), len(oracle))
        message = f"{len(lam.checkpoints)} checkpoints but {len(oracle)} oracle configurations"
    if mismatch is None and lam.halted and lam.output != oracle_output:
        message = f"output {lam.output} differs from oracle output {oracle_output}"
    if not lam.halted and not message:
        message = "fuel exhausted"
    if lam.violations and not message:
        message = f"term left the deterministic fragment at step {lam.violations[0]}"

    steps_at = [cp.step for cp in lam.checkpoints]
    per_transition = [b - a for a, b in zip(steps_at, steps_at[1:])]
    kinds = [transition_kind(tm, c) for c in oracle[: len(per_transition)]]
    passed = not message
    return VerifyReport(
        input=s,
        passed=passed,
        transitions=len(lam.checkpoints) - 1 if lam.checkpoints else 0,
        beta_steps=lam.steps,
        oracle_output=oracle_output,
        lambda_output=lam.output,
        first_mismatch=mismatch,
        per_transition=per_transition,
        kinds=kinds,
        violations=lam.violations,
        message=message,
    )


# --- exact affine fits -------------------------------------------------------

class AffineFitError(ValueError):
    def __init__(self, message: str, offending=None):
        super().__init__(message)
        self.offending = offending


def fit_exact(rows: Sequence[Sequence[int]], ys: Sequence[int]) -> list:
    """Solve ``rows @ coeffs = ys`` exactly over the rationals.

    Unknowns left free by a rank-deficient system are set to zero; an
    inconsistent system raises :class:`AffineFitError`.
    """
    n = len(rows[0])
    m = [[Fraction(v) for v in row] + [Fraction(y)] for row, y in zip(rows, ys)]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][col]
        m[r] = [v / lead for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    for row in m[r:]:
        if row[-1] != 0:
            raise AffineFitError("inconsistent system")
    coeffs = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        coeffs[col] = m[i][-1]
    return coeffs


def _predict(coeffs, row) -> Fraction:
    return sum(c * v for c, v in zip(coeffs, row))


def affine_profile(xs: Sequence[int], ys: Sequence[int]) -> tuple:
    """Fit ``y = alpha x + beta`` on the first three points and require exact
    agreement on all of them; returns ``(alpha, beta)``."""
    rows = [(x, 1) for x in xs]
    try:
        coeffs = fit_exact(rows[:3], ys[:3])
    except AffineFitError:
        raise AffineFitError(f"size {xs[2]}: no affine fit through sizes {list(xs[:3])}", xs[2]) from None
    for x, row, y in zip(xs, rows, ys):
        if _predict(coeffs, row) != y:
            raise AffineFitError(f"size {x}: measured {y}, affine fit predicts {_predict(coeffs, row)}", x)
    return tuple(_as_int(c) for c in coeffs)


def _as_int(c: Fraction):
    return int(c) if c.denominator == 1 else c


# --- the cost model ----------------------------------------------------------

@dataclass
class CostModel:
    """Exact beta-step constants of one compiled machine, measured on the evaluator."""

    append_const: int
    lift_affine: tuple
    flat_affine: tuple
    flat_blank_char: int  # steps for one blank character dropped by flat
    init_affine: tuple
    final_affine: tuple
    trans_per_case: dict
    theorem_coeffs: Optional[tuple] = None

    def to_dict(self) -> dict:
        return {k: _jsonable(v) for k, v in asdict(self).items()}


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


_PROBE = "k"


def _steps(t: Term, fuel: int = DEFAULT_FUEL) -> int:
    r = evaluate(t, fuel)
    if r.status is not Status.NORMAL_FORM:
        raise RuntimeError("measurement did not terminate")
    return r.steps


def _sample(alphabet: Alphabet, n: int) -> tuple:
    return tuple(itertools.islice(itertools.cycle(alphabet.symbols), n))


def _cps_steps(f: Term, arg: Term) -> int:
    return _steps(App(App(f, Var(_PROBE)), arg))


def measure_cost_model(cm: CompiledMachine, sizes: Sequence[int] = range(7)) -> CostModel:
    tm = cm.machine
    sigma, box, states = tm.sigma, tm.sigma_box, tm.state_alphabet
    sizes = list(sizes)

    append_counts = {_cps_steps(mk_append(box, a), encode_string(box, _sample(box, n))) for a in box for n in sizes}
    if len(append_counts) != 1:
        raise AffineFitError(f"append is not constant: {sorted(append_counts)}")
    (append_const,) = append_counts

    lift = mk_lift(sigma)
    flat = mk_flat(box)
    lift_affine = affine_profile(sizes, [_cps_steps(lift, encode_string(sigma, _sample(sigma, n))) for n in sizes])
    flat_affine = affine_profile(sizes, [_cps_steps(flat, encode_string(box, _sample(sigma, n))) for n in sizes])
    flat_blank = _cps_steps(flat, encode_string(box, (BLANK,))) - flat_affine[1]
    init_affine = affine_profile(sizes, [_cps_steps(cm.term_init, encode_string(sigma, _sample(sigma, n))) for n in sizes])
    final_affine = affine_profile(sizes, [
        _cps_steps(cm.term_final, encode_config(tm, Configuration((), BLANK, _sample(sigma, n), tm.final)))
        for n in sizes
    ])

    cases: dict = {}
    for q in tm.states:
        for a in box:
            for left, right in (((), ()), ((a,), (a,))):
                c = Configuration(left, a, right, q)
                kind = transition_kind(tm, c)
                n = _trans_steps(cm, c)
                if cases.setdefault(kind, n) != n:
                    raise AffineFitError(f"case {kind} costs both {cases[kind]} and {n} steps")
    return CostModel(append_const, lift_affine, flat_affine, flat_blank, init_affine, final_affine, dict(sorted(cases.items())))


def _trans_steps(cm: CompiledMachine, c: Configuration) -> int:
    """Steps from ``trans k C`` to the next checkpoint, or to ``k C`` when final."""
    t = App(App(cm.term_trans, Var(_PROBE)), encode_config(cm.machine, c))
    for n, r in enumerate(reductions(t), 1):
        if as_checkpoint(cm, r) is not None:
            return n
    return n


# --- benchmarks ----------------------------------------------------------------

def _unary(sigma: Alphabet, n: int) -> tuple:
    return (sigma.symbols[0],) * n


def _binary(sigma: Alphabet, n: int) -> tuple:
    if len(sigma) < 2:
        raise ValueError("binary family needs at least two symbols")
    return tuple(sigma.symbols[i % 2] for i in range(n))


FAMILIES = {"unary": _unary, "binary": _binary}


@dataclass
class BenchReport:
    family: str
    sizes: list
    transitions: list
    beta_steps: list
    theorem_coeffs: Optional[tuple]
    passed: bool
    message: str
    cost_model: Optional[CostModel]

    def to_dict(self) -> dict:
        d = {k: _jsonable(v) for k, v in asdict(self).items() if k != "cost_model"}
        d["theorem_coeffs"] = _jsonable(self.theorem_coeffs)
        d["cost_model"] = self.cost_model.to_dict() if self.cost_model else None
        return d


def bench(cm: CompiledMachine, family: str, sizes: Sequence[int], fuel: int = DEFAULT_FUEL) -> BenchReport:
    """Fit ``A * transitions + B * |s| + C`` on the first three sizes and
    check every other size against it exactly."""
    make = FAMILIES[family]
    sizes = list(sizes)
    transitions, totals = [], []
    for n in sizes:
        s = make(cm.machine.sigma, n)
        lam = lambda_run(cm, s, fuel)
        if not lam.halted:
            return BenchReport(family, sizes, transitions, totals, None, False, f"size {n}: fuel exhausted", None)
        transitions.append(len(lam.checkpoints) - 1)
        totals.append(lam.steps)
    # column order (g, 1, |s|): when g is itself affine in |s| the system is
    # rank-deficient and the |s| coefficient is the one left at zero
    rows = [(g, 1, n) for g, n in zip(transitions, sizes)]
    coeffs = None
    message = ""
    try:
        try:
            fitted = fit_exact(rows[:3], totals[:3])
        except AffineFitError:
            raise AffineFitError(f"size {sizes[2]}: no affine fit through sizes {sizes[:3]}", sizes[2]) from None
        a, c, b = (_as_int(x) for x in fitted)
        coeffs = (a, b, c)
        for n, row, y in zip(sizes, rows, totals):
            if _predict(fitted, row) != y:
                raise AffineFitError(f"size {n}: measured {y}, fit predicts {_predict(fitted, row)}", n)
    except AffineFitError as e:
        message = str(e)
    model = measure_cost_model(cm)
    model.theorem_coeffs = coeffs
    return BenchReport(family, sizes, transitions, totals, coeffs, not message, message, model)


# --- traces ----------------------------------------------------------------------

@dataclass(frozen=True)
class TraceRecord:
    step_index: int
    redex: tuple  # path of "fun" edges to the contracted redex
    pre_size: int
    post_size: int
    checkpoint: Optional[Configuration] = None

    def to_dict(self) -> dict:
        return {
            "step": self.step_index,
            "redex": list(self.redex),
            "pre_size": self.pre_size,
            "post_size": self.post_size,
            "checkpoint": self.checkpoint.as_dict() if self.checkpoint else None,
        }


def trace(cm: CompiledMachine, s: Sequence, limit: int) -> Iterator[TraceRecord]:
    t = cm.apply(s)
    for i, nxt in enumerate(itertools.islice(reductions(t), limit), 1):
        depth = -1
        h = t
        while isinstance(h, App):
            h = h.fun
            depth += 1
        c = as_checkpoint(cm, nxt)
        cfg = _decode_checkpoint(cm, c) if c is not None else None
        yield TraceRecord(i, ("fun",) * depth, t.size, nxt.size, cfg)
        t = nxt
