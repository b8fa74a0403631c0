"""Compile a Turing machine into a closed term of the deterministic calculus.

Configurations are 4-tuples ``<left reversed, head, right, state>`` with the
tapes encoded over sigma + blank and the state encoded over the state set.
The transition term dispatches on the state, then on the head symbol, and
each table cell receives ``u`` (reversed left tape), ``k`` (continuation)
and ``v`` (right tape), in that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from detlam.machine import Configuration, Move, TMSpec
from detlam.scott import (
    BLANK,
    Alphabet,
    DecodeError,
    decode_char,
    decode_string,
    encode_char,
    encode_string,
    encode_tuple,
    mk_append,
    mk_flat,
    mk_lift,
    mk_theta,
)
from detlam.terms import App, Lam, Term, Var

__all__ = [
    "CompiledMachine", "encode_config", "decode_config",
    "mk_init", "mk_trans", "mk_final", "assemble", "compile_machine",
]


@dataclass(frozen=True)
class CompiledMachine:
    machine: TMSpec
    term_init: Term
    term_trans: Term
    term_final: Term
    term_full: Term
    sigma_box: Alphabet

    def apply(self, s: Sequence) -> Term:
        """The full term applied to the encoded input string."""
        return App(self.term_full, encode_string(self.machine.sigma, s))


def _apps(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def _lams(names, body: Term) -> Term:
    for name in reversed(names):
        body = Lam(name, body)
    return body


def encode_config(tm: TMSpec, c: Configuration) -> Term:
    box = tm.sigma_box
    return encode_tuple([
        encode_string(box, tuple(reversed(c.left))),
        encode_char(box, c.head),
        encode_string(box, c.right),
        encode_char(tm.state_alphabet, c.state),
    ])


def decode_config(tm: TMSpec, t: Term) -> Configuration:
    """Inverse of :func:`encode_config` up to alpha-equivalence."""
    if not isinstance(t, Lam):
        raise DecodeError("configuration must be an abstraction")
    parts = []
    body = t.body
    path = ["body"]
    while isinstance(body, App):
        parts.append(body.arg)
        body = body.fun
        path.append("fun")
    if len(parts) != 4 or not (isinstance(body, Var) and body.name == t.param):
        raise DecodeError("not a 4-tuple", tuple(path))
    left_t, head_t, right_t, state_t = reversed(parts)
    for part in parts:
        if t.param in part.fv:
            raise DecodeError("tuple selector occurs in a component", ("body",))
    box = tm.sigma_box
    left = decode_string(box, left_t, ("body", "fun", "fun", "fun", "arg"))
    head = decode_char(box, head_t, ("body", "fun", "fun", "arg"))
    right = decode_string(box, right_t, ("body", "fun", "arg"))
    state = decode_char(tm.state_alphabet, state_t, ("body", "arg"))
    return Configuration(tuple(reversed(left)), head, right, state)


def mk_init(tm: TMSpec) -> Term:
    """``\\k. lift (\\r. k <eps, blank, r, s_in>)``."""
    box = tm.sigma_box
    start = encode_tuple([
        encode_string(box, ()),
        encode_char(box, BLANK),
        Var("r"),
        encode_char(tm.state_alphabet, tm.initial),
    ])
    return Lam("k", App(mk_lift(tm.sigma), Lam("r", App(Var("k"), start))))


def mk_final(tm: TMSpec) -> Term:
    """``\\k.\\y. y (\\v.\\a.\\s.\\q. flat k s)``: project the right tape and flatten it."""
    project = _lams("vasq", _apps(mk_flat(tm.sigma_box), Var("k"), Var("s")))
    return _lams("ky", App(Var("y"), project))


def _recurse(k: Term, left: Term, head: Term, right: Term, state: Term) -> Term:
    # x k <left, head, right, state>; x is bound by transaux to \z. trans z
    return _apps(Var("x"), k, encode_tuple([left, head, right, state]))


def _cell(tm: TMSpec, q: str, a: str) -> Term:
    box = tm.sigma_box
    states = tm.state_alphabet
    u, k, v, w = Var("u"), Var("k"), Var("v"), Var("w")
    if q == tm.final:
        done = encode_tuple([u, encode_char(box, a), v, encode_char(states, q)])
        return _lams("ukv", App(k, done))
    q2, b, move = tm.delta[(q, a)]
    code_q2 = encode_char(states, q2)
    blank = encode_char(box, BLANK)
    empty = encode_string(box, ())
    append_b = mk_append(box, b)
    if move is Move.STAY:
        return _lams("ukv", _recurse(k, u, encode_char(box, b), v, code_q2))
    if move is Move.LEFT:
        # dispatch on the reversed left tape u, then push b onto the right tape v
        pops = [
            _lams("uk", _apps(append_b, Lam("w", _recurse(k, u, encode_char(box, c), w, code_q2))))
            for c in box
        ]
        at_edge = Lam("k", _apps(append_b, Lam("w", _recurse(k, empty, blank, w, code_q2))))
        return Lam("u", _apps(u, *pops, at_edge))
    # right: dispatch on v, then push b onto the reversed left tape u
    pops = [
        _lams("uk", _apps(append_b, Lam("w", _recurse(k, w, encode_char(box, c), u, code_q2))))
        for c in box
    ]
    at_edge = Lam("k", _apps(append_b, Lam("w", _recurse(k, w, blank, empty, code_q2))))
    return _lams("ukv", _apps(v, *pops, at_edge, k, u))


def mk_trans(tm: TMSpec) -> Term:
    """``theta transaux`` with
    ``transaux = \\x.\\k.\\y. y (\\u.\\a.\\v.\\q. q M_1 ... M_|Q| a u k v)``
    and ``M_i = \\a. a N_i^1 ... N_i^|box|``.
    """
    rows = [Lam("a", _apps(Var("a"), *[_cell(tm, q, a) for a in tm.sigma_box])) for q in tm.states]
    dispatch = _lams("uavq", _apps(Var("q"), *rows, Var("a"), Var("u"), Var("k"), Var("v")))
    transaux = _lams("xky", App(Var("y"), dispatch))
    return App(mk_theta(), transaux)


def assemble(tm: TMSpec, init: Term, trans: Term, final: Term) -> CompiledMachine:
    """``init (\\y. trans (\\x. final (\\w.w) x) y)``."""
    done = Lam("x", _apps(final, Lam("w", Var("w")), Var("x")))
    full = App(init, Lam("y", _apps(trans, done, Var("y"))))
    return CompiledMachine(tm, init, trans, final, full, tm.sigma_box)


def compile_machine(tm: TMSpec) -> CompiledMachine:
    return assemble(tm, mk_init(tm), mk_trans(tm), mk_final(tm))
