"""Deterministic Turing machines: spec-file parser, configurations and the
reference simulator the lambda side is checked against."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

from detlam.scott import BLANK, Alphabet

__all__ = [
    "Move", "TMSpec", "Configuration", "RunResult", "SpecError",
    "parse_spec", "load_spec", "initial_config", "step_config", "configurations",
    "run", "output_of", "transition_kind", "parse_input", "format_string",
]


class Move(enum.Enum):
    LEFT = "L"
    RIGHT = "R"
    STAY = "S"


class SpecError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass(frozen=True)
class TMSpec:
    sigma: Alphabet
    states: tuple
    initial: str
    final: str
    delta: Mapping = field(hash=False)

    def __post_init__(self):
        if self.sigma.contains_blank:
            raise SpecError("sigma must not contain the blank")
        if len(set(self.states)) != len(self.states):
            raise SpecError("duplicate state")
        for q in (self.initial, self.final):
            if q not in self.states:
                raise SpecError(f"unknown state {q!r}")
        box = self.sigma_box
        for (q, a), (q2, a2, move) in self.delta.items():
            if q not in self.states or q2 not in self.states:
                raise SpecError(f"unknown state in rule for ({q}, {a})")
            if a not in box or a2 not in box:
                raise SpecError(f"unknown symbol in rule for ({q}, {a})")
            if q == self.final:
                raise SpecError(f"rule defined on the final state {q!r}")
            if not isinstance(move, Move):
                raise SpecError(f"bad move {move!r}")
        for q in self.states:
            if q == self.final:
                continue
            for a in box:
                if (q, a) not in self.delta:
                    raise SpecError(f"missing rule for ({q}, {a})")

    @property
    def sigma_box(self) -> Alphabet:
        return self.sigma.with_blank()

    @property
    def state_alphabet(self) -> Alphabet:
        return Alphabet(self.states)


@dataclass(frozen=True)
class Configuration:
    """``left`` is in tape order, so its last symbol is adjacent to the head."""

    left: tuple
    head: str
    right: tuple
    state: str

    def __str__(self) -> str:
        return f"({format_string(self.left)}, {self.head}, {format_string(self.right)}, {self.state})"

    def as_dict(self) -> dict:
        return {
            "left": "".join(self.left),
            "head": self.head,
            "right": "".join(self.right),
            "state": self.state,
        }


@dataclass(frozen=True)
class RunResult:
    final_config: Optional[Configuration]
    transitions: int

    @property
    def timed_out(self) -> bool:
        return self.final_config is None


def format_string(s: Sequence) -> str:
    return "".join(s) if s else "ε"


_HEADERS = ("alphabet", "states", "initial", "final")


def parse_spec(text: str) -> TMSpec:
    """Parse the line-oriented machine description.

    ::

        alphabet: a b
        states: q0 q1 qf
        initial: q0
        final: qf
        rule: q0 a -> q1 b R     # moves L, R, S; '_' is the blank
    """
    headers: dict = {}
    rules: dict = {}
    rule_lines: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep:
            raise SpecError(f"expected 'key: value', got {line!r}", lineno)
        words = rest.split()
        if key in _HEADERS:
            if key in headers:
                raise SpecError(f"duplicate {key!r}", lineno)
            if key in ("initial", "final") and len(words) != 1:
                raise SpecError(f"{key!r} takes exactly one state", lineno)
            if key == "states" and not words:
                raise SpecError("no states declared", lineno)
            headers[key] = (words, lineno)
        elif key == "rule":
            if len(words) != 6 or words[2] != "->":
                raise SpecError("rule must read 'q a -> q2 b MOVE'", lineno)
            q, a, _, q2, b, mv = words
            try:
                move = Move(mv)
            except ValueError:
                raise SpecError(f"unknown move {mv!r} (use L, R or S)", lineno) from None
            if (q, a) in rules:
                raise SpecError(f"duplicate rule for ({q}, {a})", lineno)
            rules[(q, a)] = (q2, b, move)
            rule_lines.append(((q, a, q2, b), lineno))
        else:
            raise SpecError(f"unknown directive {key!r}", lineno)

    for key in _HEADERS:
        if key not in headers:
            raise SpecError(f"missing {key!r} line")
    symbols, line = headers["alphabet"]
    if BLANK in symbols:
        raise SpecError(f"{BLANK!r} is the implicit blank and cannot be declared", line)
    if len(set(symbols)) != len(symbols):
        raise SpecError("duplicate symbol in alphabet", line)
    states, line = headers["states"]
    if len(set(states)) != len(states):
        raise SpecError("duplicate state", line)
    for key in ("initial", "final"):
        (q,), line = headers[key]
        if q not in states:
            raise SpecError(f"unknown state {q!r}", line)
    initial, final = headers["initial"][0][0], headers["final"][0][0]

    box = set(symbols) | {BLANK}
    for (q, a, q2, b), line in rule_lines:
        for state in (q, q2):
            if state not in states:
                raise SpecError(f"unknown state {state!r}", line)
        for symbol in (a, b):
            if symbol not in box:
                raise SpecError(f"unknown symbol {symbol!r}", line)
        if q == final:
            raise SpecError(f"rule defined on the final state {q!r}", line)
    return TMSpec(Alphabet(symbols), tuple(states), initial, final, rules)


def load_spec(path) -> TMSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


def parse_input(tm: TMSpec, text: str) -> tuple:
    """Split a command-line input into symbols: per character when every
    symbol is one character long, on whitespace otherwise."""
    if all(len(a) == 1 for a in tm.sigma):
        s = tuple(text)
    else:
        s = tuple(text.split())
    return tm.sigma.check(s)


def initial_config(tm: TMSpec, s: Sequence) -> Configuration:
    return Configuration((), BLANK, tm.sigma.check(s), tm.initial)


def step_config(tm: TMSpec, c: Configuration) -> Optional[Configuration]:
    if c.state == tm.final:
        return None
    q, a, move = tm.delta[(c.state, c.head)]
    if move is Move.STAY:
        return Configuration(c.left, a, c.right, q)
    if move is Move.LEFT:
        if c.left:
            return Configuration(c.left[:-1], c.left[-1], (a,) + c.right, q)
        return Configuration((), BLANK, (a,) + c.right, q)
    if c.right:
        return Configuration(c.left + (a,), c.right[0], c.right[1:], q)
    return Configuration(c.left + (a,), BLANK, (), q)


def transition_kind(tm: TMSpec, c: Configuration) -> str:
    """Which case of the compiled transition table ``c`` exercises."""
    if c.state == tm.final:
        return "final"
    move = tm.delta[(c.state, c.head)][2]
    if move is Move.STAY:
        return "stay"
    if move is Move.LEFT:
        return "left-compound" if c.left else "left-empty"
    return "right-compound" if c.right else "right-empty"


def configurations(tm: TMSpec, s: Sequence) -> Iterator[Configuration]:
    """The configuration sequence from the initial one; infinite if the machine loops."""
    c: Optional[Configuration] = initial_config(tm, s)
    while c is not None:
        yield c
        c = step_config(tm, c)


def run(tm: TMSpec, s: Sequence, max_transitions: int) -> RunResult:
    c = initial_config(tm, s)
    n = 0
    while c.state != tm.final:
        if n == max_transitions:
            return RunResult(None, n)
        c = step_config(tm, c)
        n += 1
    return RunResult(c, n)


def output_of(tm: TMSpec, c: Configuration) -> tuple:
    """The right tape with every blank removed."""
    if c.state != tm.final:
        raise ValueError(f"configuration {c} is not final")
    return tuple(a for a in c.right if a != BLANK)
