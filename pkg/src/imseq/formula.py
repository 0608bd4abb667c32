"""Formula AST, concrete syntax, and the axiom catalog.

The language is intuitionistic propositional logic plus the modalities
``<>`` (diamond) and ``[]`` (box).  Negation and equivalence are input
sugar: ``~a`` reads as ``a -> false`` and ``a <-> b`` as
``(a -> b) & (b -> a)``.  The printer emits only the core connectives.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable


class Formula:
    """Base class for formula nodes.  All nodes are immutable."""

    __slots__ = ()

    def __str__(self) -> str:
        return render_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Dia(Formula):
    body: Formula


@dataclass(frozen=True)
class Box(Formula):
    body: Formula


BOT = Bot()


def neg(a: Formula) -> Formula:
    return Imp(a, BOT)


class ParseError(ValueError):
    """Raised on malformed formula or sequent text."""

    def __init__(self, message: str, pos: int | None = None):
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)
        self.pos = pos


_TOKEN = re.compile(r"<->|->|<>|\[\]|[&|~()]|[a-z][a-zA-Z0-9_]*")
_WS = re.compile(r"\s*")


def _tokenize(text: str) -> list[tuple[str, int]]:
    out = []
    i = 0
    n = len(text)
    while i < n:
        i = _WS.match(text, i).end()
        if i >= n:
            break
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        out.append((m.group(), i))
        i = m.end()
    return out


class _Parser:
    """Recursive descent over the token list.

    Precedence, loosest first: <-> , -> (right assoc), | , & , prefix
    ~ <> [].
    """

    def __init__(self, toks: list[tuple[str, int]], text: str):
        self.toks = toks
        self.i = 0
        self.text = text

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def next(self) -> tuple[str, int]:
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of input", len(self.text))
        t = self.toks[self.i]
        self.i += 1
        return t

    def formula(self) -> Formula:
        a = self.imp()
        if self.peek() == "<->":
            self.next()
            b = self.formula()
            return And(Imp(a, b), Imp(b, a))
        return a

    def imp(self) -> Formula:
        a = self.disj()
        if self.peek() == "->":
            self.next()
            return Imp(a, self.imp())
        return a

    def disj(self) -> Formula:
        a = self.conj()
        while self.peek() == "|":
            self.next()
            a = Or(a, self.conj())
        return a

    def conj(self) -> Formula:
        a = self.unary()
        while self.peek() == "&":
            self.next()
            a = And(a, self.unary())
        return a

    def unary(self) -> Formula:
        tok, pos = self.next()
        if tok == "~":
            return Imp(self.unary(), BOT)
        if tok == "<>":
            return Dia(self.unary())
        if tok == "[]":
            return Box(self.unary())
        if tok == "(":
            a = self.formula()
            tok2, pos2 = self.next()
            if tok2 != ")":
                raise ParseError(f"expected ')', got {tok2!r}", pos2)
            return a
        if tok == "false":
            return BOT
        if tok[0].isalpha():
            return Atom(tok)
        raise ParseError(f"unexpected token {tok!r}", pos)


def parse_formula(text: str) -> Formula:
    p = _Parser(_tokenize(text), text)
    a = p.formula()
    if p.i != len(p.toks):
        tok, pos = p.toks[p.i]
        raise ParseError(f"trailing input {tok!r}", pos)
    return a


# Binding strength used by the printer; parenthesize a child whose
# level is below the context minimum.
_PREC = {Imp: 1, Or: 2, And: 3, Dia: 4, Box: 4, Atom: 5, Bot: 5}


@lru_cache(maxsize=None)
def render_formula(a: Formula) -> str:
    def child(b: Formula, floor: int) -> str:
        s = render_formula(b)
        return f"({s})" if _PREC[type(b)] < floor else s

    if isinstance(a, Atom):
        return a.name
    if isinstance(a, Bot):
        return "false"
    if isinstance(a, And):
        return f"{child(a.left, 3)} & {child(a.right, 4)}"
    if isinstance(a, Or):
        return f"{child(a.left, 2)} | {child(a.right, 3)}"
    if isinstance(a, Imp):
        return f"{child(a.left, 2)} -> {child(a.right, 1)}"
    if isinstance(a, Dia):
        return f"<>{child(a.body, 4)}"
    if isinstance(a, Box):
        return f"[]{child(a.body, 4)}"
    raise TypeError(f"not a formula: {a!r}")


def modal_count(a: Formula) -> int:
    """Number of <> and [] occurrences."""
    if isinstance(a, (Dia, Box)):
        return 1 + modal_count(a.body)
    if isinstance(a, (And, Or, Imp)):
        return modal_count(a.left) + modal_count(a.right)
    return 0


def _dias(n: int, a: Formula) -> Formula:
    for _ in range(n):
        a = Dia(a)
    return a


def _boxes(n: int, a: Formula) -> Formula:
    for _ in range(n):
        a = Box(a)
    return a


def hsl_formula(n: int, k: int, a: Formula) -> Formula:
    """The interaction axiom for the pair (n, k), instantiated at a.

    First conjunct: n diamonds over box a implies k boxes over a.
    Second conjunct: k diamonds over a implies n boxes over diamond a.
    For (0, 0) this is the conjunction of the two T implications.
    """
    if n < 0 or k < 0:
        raise ValueError("hsl_formula needs nonnegative n, k")
    return And(
        Imp(_dias(n, Box(a)), _boxes(k, a)),
        Imp(_dias(k, a), _boxes(n, Dia(a))),
    )


@dataclass(frozen=True)
class AxiomSet:
    """A choice of axioms: seriality plus a finite set of (n, k) pairs."""

    has_d: bool = False
    hsl: frozenset = frozenset()

    def __post_init__(self):
        pairs = frozenset((int(n), int(k)) for n, k in self.hsl)
        for n, k in pairs:
            if n < 0 or k < 0:
                raise ValueError(f"negative pair in axiom set: {(n, k)}")
        object.__setattr__(self, "hsl", pairs)

    def __str__(self) -> str:
        parts = [f"({n},{k})" for n, k in sorted(self.hsl)]
        if self.has_d:
            parts.append("d")
        return "{" + ", ".join(parts) + "}"


EMPTY_AXIOMS = AxiomSet()


def axiom_set(pairs: Iterable[tuple[int, int]] = (), d: bool = False) -> AxiomSet:
    return AxiomSet(has_d=d, hsl=frozenset(pairs))


_P = Atom("p")

BENCHMARKS: dict[str, Formula] = {
    "A1": parse_formula("[](p -> q) -> ([]p -> []q)"),
    "A2": parse_formula("[](p -> q) -> (<>p -> <>q)"),
    "A3": parse_formula("~<>false"),
    "A4": parse_formula("<>(p | q) -> (<>p | <>q)"),
    "A5": parse_formula("(<>p -> []q) -> [](p -> q)"),
    "D": parse_formula("[]p -> <>p"),
    "T": hsl_formula(0, 0, _P),
    "B": hsl_formula(1, 0, _P),
    "4": hsl_formula(0, 2, _P),
    "5": hsl_formula(1, 1, _P),
}
