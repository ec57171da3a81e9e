"""Recursive-descent parser for the concrete formula syntax.

    phi   := disj ;  disj := conj { "|" conj } ;  conj := unit { "&" unit }
    unit  := lit | VAR | "<" act ">" "_" nat unit | "[" act "]" "_" nat unit
           | ("mu"|"nu") VAR "." phi | "{" repl "}" unit | "(" phi ")"
           | lit "->" phi
    lit   := prop "(" nat ")" | "~" prop "(" nat ")"
    repl  := item { "," item } ;  item := nat "<-" nat | nat "<->" nat

Binders and implications extend as far right as possible.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (
    And,
    BindingError,
    Box,
    Diamond,
    Formula,
    Mu,
    NegLit,
    Nu,
    Or,
    PosLit,
    Repl,
    Replacement,
    Var,
    implies,
)

KEYWORDS = {"mu", "nu"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<sym><->|<-|->|[<>\[\]{}()_|&~.,])
  | (?P<nat>\d+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        self.position = position
        self.expected = expected
        detail = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at position {position}{detail}")


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[_Tok]:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        if kind != "ws":
            out.append(_Tok(kind, m.group(), i))
        i = m.end()
    out.append(_Tok("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, rename: bool):
        self.toks = tokenize(text)
        self.i = 0
        self.rename = rename
        self.scope: list[tuple[str, str]] = []
        self.used: set[str] = set()
        self.fresh = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind not in ("sym",):
            raise FormulaSyntaxError(f"unexpected {self.tok.text or 'end of input'!r}", self.tok.pos, (repr(text),))
        return self.advance()

    def nat(self) -> int:
        if self.tok.kind != "nat":
            raise FormulaSyntaxError(f"unexpected {self.tok.text or 'end of input'!r}", self.tok.pos, ("number",))
        return int(self.advance().text)

    def parse(self) -> Formula:
        phi = self.disj()
        if self.tok.kind != "eof":
            raise FormulaSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos, ("'|'", "'&'", "end of input"))
        return phi

    def disj(self) -> Formula:
        start = self.tok.pos
        left = self.conj()
        while self.tok.kind == "sym" and self.tok.text == "|":
            self.advance()
            right = self.conj()
            left = self._wrap(Or, left, right, start)
        return left

    def conj(self) -> Formula:
        start = self.tok.pos
        left = self.unit()
        while self.tok.kind == "sym" and self.tok.text == "&":
            self.advance()
            right = self.unit()
            left = self._wrap(And, left, right, start)
        return left

    def _wrap(self, cls, left, right, pos):
        try:
            return cls(left, right)
        except BindingError as e:
            raise BindingError(f"{e} (in formula starting at position {pos})") from None

    def unit(self) -> Formula:
        t = self.tok
        if t.kind == "ident" and t.text in KEYWORDS:
            return self.fixpoint()
        if t.kind == "ident" and t.text[0].isupper():
            self.advance()
            return Var(self.lookup(t.text))
        if t.kind == "ident" or (t.kind == "sym" and t.text == "~"):
            lit = self.literal()
            if self.tok.kind == "sym" and self.tok.text == "->":
                self.advance()
                return implies(lit, self.disj())
            return lit
        if t.kind == "sym" and t.text == "<":
            self.advance()
            act = self.ident("action")
            self.expect(">")
            self.expect("_")
            i = self.index()
            return Diamond(act, i, self.unit())
        if t.kind == "sym" and t.text == "[":
            self.advance()
            act = self.ident("action")
            self.expect("]")
            self.expect("_")
            i = self.index()
            return Box(act, i, self.unit())
        if t.kind == "sym" and t.text == "{":
            self.advance()
            kappa = self.replacement()
            self.expect("}")
            return Repl(kappa, self.unit())
        if t.kind == "sym" and t.text == "(":
            self.advance()
            phi = self.disj()
            self.expect(")")
            return phi
        raise FormulaSyntaxError(
            f"unexpected {t.text or 'end of input'!r}",
            t.pos,
            ("literal", "variable", "'<'", "'['", "'{'", "'('", "'mu'", "'nu'"),
        )

    def ident(self, what: str) -> str:
        if self.tok.kind != "ident":
            raise FormulaSyntaxError(f"unexpected {self.tok.text or 'end of input'!r}", self.tok.pos, (what,))
        return self.advance().text

    def index(self) -> int:
        pos = self.tok.pos
        i = self.nat()
        if i < 1:
            raise FormulaSyntaxError("position index must be >= 1", pos)
        return i

    def literal(self) -> Formula:
        neg = False
        if self.tok.kind == "sym" and self.tok.text == "~":
            self.advance()
            neg = True
        t = self.tok
        if t.kind != "ident" or not t.text[0].islower() or t.text in KEYWORDS:
            raise FormulaSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos, ("proposition",))
        self.advance()
        self.expect("(")
        i = self.index()
        self.expect(")")
        return NegLit(t.text, i) if neg else PosLit(t.text, i)

    def replacement(self) -> Replacement:
        mapping: dict[int, int] = {}

        def put(src, dst, pos):
            if mapping.get(src, dst) != dst:
                raise FormulaSyntaxError(f"conflicting replacement items for index {src}", pos)
            mapping[src] = dst

        while True:
            pos = self.tok.pos
            a = self.index()
            op = self.tok
            if op.kind == "sym" and op.text == "<-":
                self.advance()
                b = self.index()
                put(b, a, pos)
            elif op.kind == "sym" and op.text == "<->":
                self.advance()
                b = self.index()
                put(a, b, pos)
                put(b, a, pos)
            else:
                raise FormulaSyntaxError(f"unexpected {op.text or 'end of input'!r}", op.pos, ("'<-'", "'<->'"))
            if self.tok.kind == "sym" and self.tok.text == ",":
                self.advance()
                continue
            return Replacement.from_map(mapping)

    def fixpoint(self) -> Formula:
        kw = self.advance()
        t = self.tok
        if t.kind != "ident" or not t.text[0].isupper():
            raise FormulaSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos, ("variable",))
        self.advance()
        self.expect(".")
        name = t.text
        if self.rename and name in self.used:
            name = self.fresh_name(name)
        self.used.add(name)
        self.scope.append((t.text, name))
        try:
            body = self.disj()
        finally:
            self.scope.pop()
        try:
            return Mu(name, body) if kw.text == "mu" else Nu(name, body)
        except BindingError as e:
            raise BindingError(f"{e} (binder at position {kw.pos})") from None

    def lookup(self, name: str) -> str:
        for written, actual in reversed(self.scope):
            if written == name:
                return actual
        self.used.add(name)
        return name

    def fresh_name(self, base: str) -> str:
        while True:
            self.fresh += 1
            cand = f"{base}_{self.fresh}"
            if cand not in self.used:
                return cand


def parse_formula(text: str, rename: bool = False) -> Formula:
    """Parse formula text.

    With ``rename=True`` a binder reusing an earlier name is renamed to a
    fresh one instead of raising :class:`BindingError`.
    """
    return _Parser(text, rename).parse()
