"""Concrete syntax: ``\\x. body``, left-associative juxtaposition, parentheses."""

from __future__ import annotations

import re

from detlam.terms import App, Lam, Term, Var

__all__ = ["pretty", "parse", "ParseError"]

_TOKEN = re.compile(r"\s*(?:(\\|λ)|(\.)|(\()|(\))|([A-Za-z_0-9][A-Za-z0-9_']*))")


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at offset {pos}")
        self.pos = pos


def pretty(t: Term) -> str:
    out: list[str] = []
    _emit(t, 0, out)
    return "".join(out)


# level 0: top or lambda body; 1: function position; 2: argument position
def _emit(t: Term, level: int, out: list) -> None:
    if isinstance(t, Var):
        out.append(t.name)
    elif isinstance(t, Lam):
        if level:
            out.append("(")
        out.append("\\" + t.param + ". ")
        _emit(t.body, 0, out)
        if level:
            out.append(")")
    else:
        if level == 2:
            out.append("(")
        _emit(t.fun, 1, out)
        out.append(" ")
        _emit(t.arg, 2, out)
        if level == 2:
            out.append(")")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = ("lam", "dot", "lpar", "rpar", "ident")[m.lastindex - 1]
        tokens.append((kind, m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self, kind: str) -> str:
        k, value, pos = self.tokens[self.i]
        if k != kind:
            raise ParseError(f"expected {kind}, found {value or k!r}", pos)
        self.i += 1
        return value

    def term(self) -> Term:
        if self.peek() == "lam":
            return self.abstraction()
        t = self.atom()
        while self.peek() in ("ident", "lpar", "lam"):
            if self.peek() == "lam":
                t = App(t, self.abstraction())
                break
            t = App(t, self.atom())
        return t

    def abstraction(self) -> Term:
        self.take("lam")
        params = [self.take("ident")]
        while self.peek() == "ident":
            params.append(self.take("ident"))
        self.take("dot")
        body = self.term()
        for p in reversed(params):
            body = Lam(p, body)
        return body

    def atom(self) -> Term:
        if self.peek() == "lpar":
            self.take("lpar")
            t = self.term()
            self.take("rpar")
            return t
        return Var(self.take("ident"))


def parse(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.take("eof")
    return t
