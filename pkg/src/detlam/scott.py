"""Scott encodings of characters, strings and tuples, plus the CPS string
combinators: the call-by-value fixpoint, append, lift and flat.

Every combinator takes its continuation as the first argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from detlam.terms import App, Lam, Term, Var, alpha_equivalent, fresh_name, is_value

__all__ = [
    "BLANK", "Alphabet", "DecodeError",
    "encode_char", "decode_char", "encode_string", "decode_string", "encode_tuple",
    "mk_theta", "mk_append", "mk_lift", "mk_flat",
]

BLANK = "_"

Str = tuple  # of symbol names


@dataclass(frozen=True)
class Alphabet:
    """An ordered set of symbols; the order fixes the encodings."""

    symbols: tuple
    contains_blank: bool = False

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate symbols in alphabet {self.symbols}")
        if self.contains_blank:
            if not self.symbols or self.symbols[-1] != BLANK:
                raise ValueError("the blank must be the last symbol")
            if BLANK in self.symbols[:-1]:
                raise ValueError("blank appears twice")
        elif BLANK in self.symbols:
            raise ValueError(f"{BLANK!r} is reserved for the blank")

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self.symbols

    def __iter__(self):
        return iter(self.symbols)

    def index(self, symbol) -> int:
        """1-based position of ``symbol``."""
        try:
            return self.symbols.index(symbol) + 1
        except ValueError:
            raise ValueError(f"unknown symbol {symbol!r} for alphabet {self.symbols}") from None

    def with_blank(self) -> "Alphabet":
        if self.contains_blank:
            raise ValueError("alphabet already contains the blank")
        return Alphabet(self.symbols + (BLANK,), True)

    def without_blank(self) -> "Alphabet":
        if not self.contains_blank:
            raise ValueError("alphabet has no blank")
        return Alphabet(self.symbols[:-1], False)

    def check(self, s: Iterable) -> Str:
        s = tuple(s)
        for symbol in s:
            self.index(symbol)
        return s


class DecodeError(ValueError):
    """The term does not have the shape of an encoding; ``path`` locates the mismatch."""

    def __init__(self, message: str, path: tuple = ()):
        where = "/".join(path) or "root"
        super().__init__(f"{message} (at {where})")
        self.path = path


def _binders(n: int) -> list[str]:
    return [f"x{i}" for i in range(1, n + 1)]


def encode_char(alphabet: Alphabet, symbol) -> Term:
    i = alphabet.index(symbol)
    xs = _binders(len(alphabet))
    t: Term = Var(xs[i - 1])
    for x in reversed(xs):
        t = Lam(x, t)
    return t


def encode_string(alphabet: Alphabet, s: Sequence) -> Term:
    xs = _binders(len(alphabet))
    t: Term = Lam("y", Var("y"))
    for x in reversed(xs):
        t = Lam(x, t)
    for symbol in reversed(tuple(s)):
        body: Term = Lam("y", App(Var(xs[alphabet.index(symbol) - 1]), t))
        for x in reversed(xs):
            body = Lam(x, body)
        t = body
    return t


def _peel(t: Term, n: int, path: list) -> tuple[list[str], Term]:
    names = []
    for _ in range(n):
        if not isinstance(t, Lam):
            raise DecodeError(f"expected {n} leading abstractions", tuple(path))
        names.append(t.param)
        path.append("body")
        t = t.body
    return names, t


def _bound_index(names: list[str], name: str) -> int:
    """Index of the innermost binder called ``name``, or -1."""
    for i in range(len(names) - 1, -1, -1):
        if names[i] == name:
            return i
    return -1


def decode_char(alphabet: Alphabet, t: Term, path: tuple = ()) -> str:
    trail = list(path)
    names, body = _peel(t, len(alphabet), trail)
    if isinstance(body, Var):
        i = _bound_index(names, body.name)
        if i >= 0:
            return alphabet.symbols[i]
    raise DecodeError("not a character encoding", tuple(trail))


def decode_string(alphabet: Alphabet, t: Term, path: tuple = ()) -> Str:
    """Inverse of :func:`encode_string`, up to alpha-equivalence."""
    n = len(alphabet)
    out = []
    trail = list(path)
    while True:
        names, body = _peel(t, n + 1, trail)
        if isinstance(body, Var) and _bound_index(names, body.name) == n:
            return tuple(out)
        if (
            isinstance(body, App)
            and isinstance(body.fun, Var)
            and 0 <= (i := _bound_index(names, body.fun.name)) < n
            and not (body.arg.fv & set(names))
        ):
            out.append(alphabet.symbols[i])
            trail.append("arg")
            t = body.arg
            continue
        raise DecodeError("not a string encoding", tuple(trail))


def encode_tuple(components: Sequence[Term]) -> Term:
    """``<t1,...,tk> = \\x. x t1 ... tk`` with ``x`` fresh for the components."""
    avoid: set = set()
    for c in components:
        if not is_value(c):
            raise ValueError(f"tuple component {c!r} is not a value")
        avoid |= c.fv
    x = "t" if "t" not in avoid else fresh_name("t", avoid)
    body: Term = Var(x)
    for c in components:
        body = App(body, c)
    return Lam(x, body)


def _lams(names: Sequence[str], body: Term) -> Term:
    for name in reversed(names):
        body = Lam(name, body)
    return body


def _apps(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def mk_theta() -> Term:
    """Turing's call-by-value fixpoint ``(\\x.\\y. y (\\z. x x y z))`` applied to itself."""
    x, y, z = Var("x"), Var("y"), Var("z")
    half = _lams("xy", App(y, Lam("z", _apps(x, x, y, z))))
    return App(half, half)


def mk_append(alphabet: Alphabet, symbol) -> Term:
    """``\\k.\\s. k (\\x1...xn.\\y. x_i s)``: prepends ``symbol`` in two steps."""
    xs = _binders(len(alphabet))
    i = alphabet.index(symbol)
    cell = _lams(xs + ["y"], App(Var(xs[i - 1]), Var("s")))
    return _lams(["k", "s"], App(Var("k"), cell))


def _convert_branch(target: Alphabet, symbol) -> Term:
    # \r.\k. x (\p. append_a k p) r
    cont = Lam("p", _apps(mk_append(target, symbol), Var("k"), Var("p")))
    return _lams(["r", "k"], _apps(Var("x"), cont, Var("r")))


def _empty_branch(target: Alphabet) -> Term:
    return Lam("y", App(Var("y"), encode_string(target, ())))


def mk_lift(alphabet: Alphabet) -> Term:
    """Re-encode a string over ``alphabet`` as a string over ``alphabet + blank``."""
    if alphabet.contains_blank:
        raise ValueError("lift expects an alphabet without the blank")
    target = alphabet.with_blank()
    branches = [_convert_branch(target, a) for a in alphabet]
    body = _apps(Var("s"), *branches, _empty_branch(target), Var("k"))
    return App(mk_theta(), _lams(["x", "k", "s"], body))


def mk_flat(alphabet: Alphabet) -> Term:
    """Re-encode a string over ``alphabet`` (which has the blank) without it,
    dropping every blank on the way."""
    if not alphabet.contains_blank:
        raise ValueError("flat expects an alphabet containing the blank")
    target = alphabet.without_blank()
    branches = [_convert_branch(target, a) for a in target]
    skip_blank = _lams(["r", "k"], _apps(Var("x"), Var("k"), Var("r")))
    body = _apps(Var("s"), *branches, skip_blank, _empty_branch(target), Var("k"))
    return App(mk_theta(), _lams(["x", "k", "s"], body))


def same_string(alphabet: Alphabet, t: Term, s: Sequence) -> bool:
    return alpha_equivalent(t, encode_string(alphabet, s))
