"""Lambda terms, the deterministic fragment, and its weak evaluator.

Terms are hash-consed: building a term that is structurally identical to a
live one returns the existing object.  Equality is therefore identity, and
every node caches its free variables, its size and whether it lies in the
deterministic fragment (every application argument is a value).
"""

from __future__ import annotations

import threading
import weakref
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

__all__ = [
    "Term", "Var", "Lam", "App",
    "is_value", "validate_det", "Validation", "NotDeterministic",
    "substitute", "fresh_name", "free_vars",
    "RedexPosition", "find_redex", "step", "reductions",
    "Status", "EvalResult", "evaluate",
    "canonical", "alpha_equivalent", "subterm",
]

_interned: "weakref.WeakValueDictionary[tuple, Term]" = weakref.WeakValueDictionary()
_lock = threading.Lock()


class Term:
    __slots__ = ("fv", "size", "det", "__weakref__")

    fv: frozenset
    size: int
    det: bool

    def __str__(self) -> str:
        from detlam.syntax import pretty

        return pretty(self)

    def __repr__(self) -> str:
        text = str(self)
        if len(text) > 80:
            text = text[:77] + "..."
        return f"<{type(self).__name__} {text}>"

    def __reduce__(self):
        return type(self), self._fields()


class Var(Term):
    __slots__ = ("name",)

    name: str

    def __new__(cls, name: str) -> "Var":
        key = ("v", name)
        with _lock:
            t = _interned.get(key)
            if t is None:
                t = object.__new__(cls)
                t.name = name
                t.fv = frozenset((name,))
                t.size = 1
                t.det = True
                _interned[key] = t
        return t

    def _fields(self):
        return (self.name,)


class Lam(Term):
    __slots__ = ("param", "body")

    param: str
    body: Term

    def __new__(cls, param: str, body: Term) -> "Lam":
        key = ("l", param, id(body))
        with _lock:
            t = _interned.get(key)
            if t is None:
                t = object.__new__(cls)
                t.param = param
                t.body = body
                t.fv = body.fv - {param} if param in body.fv else body.fv
                t.size = body.size + 1
                t.det = body.det
                _interned[key] = t
        return t

    def _fields(self):
        return (self.param, self.body)


class App(Term):
    __slots__ = ("fun", "arg")

    fun: Term
    arg: Term

    def __new__(cls, fun: Term, arg: Term) -> "App":
        key = ("a", id(fun), id(arg))
        with _lock:
            t = _interned.get(key)
            if t is None:
                t = object.__new__(cls)
                t.fun = fun
                t.arg = arg
                if not fun.fv:
                    t.fv = arg.fv
                elif not arg.fv:
                    t.fv = fun.fv
                else:
                    t.fv = fun.fv | arg.fv
                t.size = fun.size + arg.size + 1
                t.det = fun.det and arg.det and not isinstance(arg, App)
                _interned[key] = t
        return t

    def _fields(self):
        return (self.fun, self.arg)


def is_value(t: Term) -> bool:
    return not isinstance(t, App)


def free_vars(t: Term) -> frozenset:
    return t.fv


# --- the deterministic fragment -------------------------------------------

Path = tuple  # of "fun" | "arg" | "body"


@dataclass(frozen=True)
class Validation:
    """Outcome of :func:`validate_det`; truthy iff the term is in the fragment."""

    ok: bool
    path: Optional[Path] = None

    def __bool__(self) -> bool:
        return self.ok


class NotDeterministic(ValueError):
    """Raised when an operation requiring the deterministic fragment gets a term outside it."""

    def __init__(self, path: Path):
        super().__init__(f"application argument at {'/'.join(path) or 'root'} is not a value")
        self.path = path


def validate_det(t: Term) -> Validation:
    """Check that every application argument in ``t`` is a value.

    On failure the path points at the first offending application (in
    pre-order), not at its argument.
    """
    if t.det:
        return Validation(True)
    path: list[str] = []
    while True:
        if isinstance(t, Lam):
            path.append("body")
            t = t.body
        elif isinstance(t, App):
            if isinstance(t.arg, App):
                return Validation(False, tuple(path))
            if not t.fun.det:
                path.append("fun")
                t = t.fun
            else:
                path.append("arg")
                t = t.arg
        else:  # pragma: no cover - variables are always valid
            raise AssertionError("unreachable")


def subterm(t: Term, path: Path) -> Term:
    for direction in path:
        t = getattr(t, direction)
    return t


# --- substitution ----------------------------------------------------------

_SUBST_MEMO_LIMIT = 1 << 20
_subst_memo: dict = {}


def fresh_name(base: str, avoid) -> str:
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def substitute(body: Term, name: str, value: Term) -> Term:
    """Capture-avoiding ``body[name := value]``.

    Binders that would capture a free variable of ``value`` are renamed by
    priming them.  Results are memoized on the (interned) arguments.
    """
    if not is_value(value):
        raise ValueError("only values are substituted in the deterministic calculus")
    return _subst(body, name, value)


def _subst(t: Term, x: str, v: Term) -> Term:
    if x not in t.fv:
        return t
    if isinstance(t, Var):
        return v
    key = (t, x, v)
    r = _subst_memo.get(key)
    if r is not None:
        return r
    if isinstance(t, App):
        r = App(_subst(t.fun, x, v), _subst(t.arg, x, v))
    else:
        y, b = t.param, t.body
        if y in v.fv:
            y2 = fresh_name(y, v.fv | b.fv | {x})
            b = _subst(b, y, Var(y2))
            y = y2
        r = Lam(y, _subst(b, x, v))
    if len(_subst_memo) >= _SUBST_MEMO_LIMIT:
        _subst_memo.clear()
    _subst_memo[key] = r
    return r


# --- weak evaluation ---------------------------------------------------------

@dataclass(frozen=True)
class RedexPosition:
    """Path of function edges from the root down to the unique redex."""

    path: Path = ()

    @property
    def depth(self) -> int:
        return len(self.path)


def _require_det(t: Term) -> None:
    check = validate_det(t)
    if not check:
        raise NotDeterministic(check.path)


def find_redex(t: Term) -> Optional[RedexPosition]:
    _require_det(t)
    depth = 0
    while isinstance(t, App):
        t = t.fun
        depth += 1
    if depth and isinstance(t, Lam):
        return RedexPosition(("fun",) * (depth - 1))
    return None


def step(t: Term) -> Optional[Term]:
    """Contract the unique weak redex of ``t``, or return None if ``t`` is normal."""
    _require_det(t)
    return _step(t)


def _step(t: Term) -> Optional[Term]:
    args = []
    head = t
    while isinstance(head, App):
        args.append(head.arg)
        head = head.fun
    if not args or not isinstance(head, Lam):
        return None
    r = _subst(head.body, head.param, args.pop())
    while args:
        r = App(r, args.pop())
    return r


def reductions(t: Term) -> Iterator[Term]:
    """Yield every reduct of ``t`` in order; finite iff ``t`` normalizes."""
    _require_det(t)
    while True:
        t = _step(t)
        if t is None:
            return
        yield t


class Status(str, Enum):
    NORMAL_FORM = "normal-form"
    FUEL_EXHAUSTED = "fuel-exhausted"


@dataclass(frozen=True)
class EvalResult:
    final: Term
    steps: int
    status: Status


def evaluate(t: Term, fuel: int) -> EvalResult:
    """Reduce ``t`` for at most ``fuel`` beta-steps."""
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    _require_det(t)
    steps = 0
    while True:
        nxt = _step(t)
        if nxt is None:
            return EvalResult(t, steps, Status.NORMAL_FORM)
        if steps == fuel:
            return EvalResult(t, steps, Status.FUEL_EXHAUSTED)
        t = nxt
        steps += 1


# --- alpha-equivalence -------------------------------------------------------

_canon_cache: "weakref.WeakKeyDictionary[Term, Term]" = weakref.WeakKeyDictionary()


def canonical(t: Term) -> Term:
    """Rename every binder to ``%`` and bound occurrences to ``%<de Bruijn index>``.

    Free variables keep their names, so two terms are alpha-equivalent iff
    their canonical forms are the same object.
    """
    return _canon(t, {}, 0)


def _canon(t: Term, env: dict, depth: int) -> Term:
    context_free = not env or t.fv.isdisjoint(env)
    if context_free:
        c = _canon_cache.get(t)
        if c is not None:
            return c
    if isinstance(t, Var):
        c = Var(f"%{depth - env[t.name] - 1}") if t.name in env else t
    elif isinstance(t, Lam):
        saved = env.get(t.param)
        env[t.param] = depth
        c = Lam("%", _canon(t.body, env, depth + 1))
        if saved is None:
            del env[t.param]
        else:
            env[t.param] = saved
    else:
        c = App(_canon(t.fun, env, depth), _canon(t.arg, env, depth))
    if context_free and c is not t:
        _canon_cache[t] = c
    return c


def alpha_equivalent(a: Term, b: Term) -> bool:
    return a is b or canonical(a) is canonical(b)
