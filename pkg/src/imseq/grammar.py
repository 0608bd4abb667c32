"""String grammars induced by the axiom pairs, and path reachability.

Each (n, k) pair contributes two rewrite productions over the two-letter
alphabet: forward ⟶ n backwards then k forwards, and backward ⟶ k
backwards then n forwards.  A relational atom w R u gives a forward edge
w→u and a backward edge u→w.  A target node is reachable from a source
when some walk between them spells a string derivable from the forward
letter.  Letters print as ``d`` (forward) and ``b`` (backward).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .formula import AxiomSet


class Sym(str, Enum):
    FWD = "d"
    BWD = "b"

    def converse(self) -> "Sym":
        return Sym.BWD if self is Sym.FWD else Sym.FWD

    def __str__(self) -> str:
        return self.value


def syms(text: Iterable[str]) -> tuple[Sym, ...]:
    """Convert 'd'/'b' characters (or Syms) to a symbol tuple."""
    return tuple(Sym(c) for c in text)


def converse_string(s: Iterable[Sym]) -> tuple[Sym, ...]:
    return tuple(c.converse() for c in reversed(tuple(s)))


@dataclass(frozen=True)
class Production:
    lhs: Sym
    rhs: tuple[Sym, ...]

    def __str__(self) -> str:
        rhs = "".join(c.value for c in self.rhs) or "ε"
        return f"{self.lhs.value} -> {rhs}"


@dataclass(frozen=True)
class Grammar:
    productions: frozenset

    def sorted_productions(self) -> list[Production]:
        return sorted(self.productions, key=lambda p: (p.lhs.value, tuple(c.value for c in p.rhs)))


def grammar_from_axioms(ax: AxiomSet) -> Grammar:
    """Two productions per (n, k) pair; the seriality flag adds none."""
    prods = set()
    for n, k in ax.hsl:
        prods.add(Production(Sym.FWD, (Sym.BWD,) * n + (Sym.FWD,) * k))
        prods.add(Production(Sym.BWD, (Sym.BWD,) * k + (Sym.FWD,) * n))
    return Grammar(frozenset(prods))


def one_step(g: Grammar, s: Iterable[Sym]) -> set:
    """All strings obtained by rewriting one occurrence."""
    s = tuple(s)
    out = set()
    for p in g.productions:
        for i, c in enumerate(s):
            if c == p.lhs:
                out.add(s[:i] + p.rhs + s[i + 1:])
    return out


def _nullable(g: Grammar) -> frozenset:
    null = set()
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.lhs not in null and all(c in null for c in p.rhs):
                null.add(p.lhs)
                changed = True
    return frozenset(null)


def _unit_reach(g: Grammar, null: frozenset) -> dict:
    """reach[X] = symbols Y with X ⟹* Y (as a one-letter string)."""
    hops = {s: {s} for s in Sym}
    for p in g.productions:
        for i, c in enumerate(p.rhs):
            rest = p.rhs[:i] + p.rhs[i + 1:]
            if all(r in null for r in rest):
                hops[p.lhs].add(c)
    changed = True
    while changed:
        changed = False
        for x in Sym:
            new = set()
            for y in hops[x]:
                new |= hops[y]
            if not new <= hops[x]:
                hops[x] |= new
                changed = True
    return hops


def derives(g: Grammar, start: Sym, target: Iterable[Sym]) -> bool:
    """Whether start ⟹* target under the rewrite productions.

    Rewriting with one-letter left-hand sides is context free, so
    membership is decided by a CYK table over spans of the target.  Unit
    chains (a production whose right-hand side collapses to one letter,
    the rest deriving ε) are closed off separately so span parts stay
    strictly smaller than their span.
    """
    t = syms(target)
    null = _nullable(g)
    if not t:
        return start in null
    unit = _unit_reach(g, null)
    prods = g.sorted_productions()
    n = len(t)
    # spans[(i, j)] = symbols deriving t[i:j], built by ascending length
    spans: dict[tuple[int, int], set] = {}
    for i in range(n):
        c = t[i]
        spans[(i, i + 1)] = {x for x in Sym if c in unit[x]}
    for length in range(2, n + 1):
        for i in range(0, n - length + 1):
            j = i + length
            direct = set()
            for p in prods:
                if p.lhs in direct or not p.rhs:
                    continue
                if _rhs_matches(p.rhs, i, j, spans, null, length):
                    direct.add(p.lhs)
            spans[(i, j)] = {x for x in Sym if unit[x] & direct}
    return start in spans[(0, n)]


def _rhs_matches(rhs, i, j, spans, null, span_len) -> bool:
    """Can rhs split t[i:j] into parts, each strictly shorter than the span?"""
    m = len(rhs)

    def go(r: int, p: int) -> bool:
        if r == m:
            return p == j
        c = rhs[r]
        if c in null and go(r + 1, p):
            return True
        for q in range(p + 1, j + 1):
            if q - p >= span_len:
                break
            if c in spans[(p, q)] and go(r + 1, q):
                return True
        return False

    return go(0, i)


@dataclass(frozen=True)
class PropPath:
    """A walk in a propagation graph; nodes may repeat.

    A single-node path has no steps and spells the empty string.
    """

    nodes: tuple[str, ...]
    steps: tuple[Sym, ...]

    def __post_init__(self):
        if not self.nodes or len(self.nodes) != len(self.steps) + 1:
            raise ValueError("path needs len(nodes) == len(steps) + 1")

    @property
    def start(self) -> str:
        return self.nodes[0]

    @property
    def end(self) -> str:
        return self.nodes[-1]

    @property
    def string(self) -> str:
        return "".join(c.value for c in self.steps)

    def converse(self) -> "PropPath":
        return PropPath(tuple(reversed(self.nodes)), converse_string(self.steps))

    def concat(self, other: "PropPath") -> "PropPath":
        if self.end != other.start:
            raise ValueError("paths do not compose")
        return PropPath(self.nodes + other.nodes[1:], self.steps + other.steps)

    def to_list(self) -> list:
        out: list[str] = [self.nodes[0]]
        for c, v in zip(self.steps, self.nodes[1:]):
            out.append(c.value)
            out.append(v)
        return out

    @staticmethod
    def from_list(items: Iterable[str]) -> "PropPath":
        items = list(items)
        if len(items) % 2 == 0:
            raise ValueError("path list must alternate node, letter, node")
        return PropPath(tuple(items[0::2]), syms(items[1::2]))

    def __str__(self) -> str:
        return " ".join(self.to_list())


@dataclass(frozen=True)
class PropGraph:
    nodes: frozenset
    edges: frozenset  # of (node, Sym, node)


def graph_from_pairs(rel: Iterable[tuple[str, str]], extra_nodes: Iterable[str] = ()) -> PropGraph:
    """Converse closure: w R u yields both w→u forward and u→w backward."""
    nodes = set(extra_nodes)
    edges = set()
    for w, u in rel:
        nodes.add(w)
        nodes.add(u)
        edges.add((w, Sym.FWD, u))
        edges.add((u, Sym.BWD, w))
    return PropGraph(frozenset(nodes), frozenset(edges))


def path_in_graph(pg: PropGraph, path: PropPath) -> bool:
    if any(v not in pg.nodes for v in path.nodes):
        return False
    return all(
        (path.nodes[i], path.steps[i], path.nodes[i + 1]) in pg.edges
        for i in range(len(path.steps))
    )


class _Saturator:
    """CFL-reachability worklist over a graph and grammar.

    Facts are Full(S, x, y), a walk x to y spelling a string derivable
    from S, and Part(p, i, x, y), the first i letters of production
    p's right-hand side jointly spelling a walk x to y.  Witnesses are
    recorded at first derivation, so reconstruction is well founded.
    """

    def __init__(self, pg: PropGraph, g: Grammar):
        self.prods = g.sorted_productions()
        self.null = _nullable(g)
        self.witness: dict[tuple, tuple] = {}
        self.queue: deque = deque()
        self.fulls_from: dict[tuple, set] = {}
        self.parts_waiting: dict[tuple, list] = {}
        for x, s, y in sorted(pg.edges):
            self._add(("F", s, x, y), ("edge",))
        for x in sorted(pg.nodes):
            for s in sorted(self.null, key=lambda c: c.value):
                self._add(("F", s, x, x), ("null",))
            for pi in range(len(self.prods)):
                self._add(("P", pi, 0, x, x), ("start",))
        self._run()

    def _add(self, fact: tuple, why: tuple):
        if fact in self.witness:
            return
        self.witness[fact] = why
        self.queue.append(fact)

    def _run(self):
        while self.queue:
            fact = self.queue.popleft()
            if fact[0] == "F":
                _, s, x, y = fact
                self.fulls_from.setdefault((s, x), set()).add(y)
                for part in self.parts_waiting.get((s, x), []):
                    _, pi, i, w, _x = part
                    self._add(("P", pi, i + 1, w, y), ("step", part, fact))
            else:
                _, pi, i, x, y = fact
                rhs = self.prods[pi].rhs
                if i == len(rhs):
                    self._add(("F", self.prods[pi].lhs, x, y), ("prod", fact))
                else:
                    s = rhs[i]
                    self.parts_waiting.setdefault((s, y), []).append(fact)
                    for z in sorted(self.fulls_from.get((s, y), ())):
                        self._add(("P", pi, i + 1, x, z), ("step", fact, ("F", s, y, z)))

    def path_of(self, fact: tuple) -> PropPath:
        why = self.witness[fact]
        kind = why[0]
        if kind == "edge":
            _, s, x, y = fact
            return PropPath((x, y), (s,))
        if kind == "null" or kind == "start":
            return PropPath((fact[-2],), ())
        if kind == "prod":
            return self.path_of(why[1])
        # step: part then full
        return self.path_of(why[1]).concat(self.path_of(why[2]))


def reachable(pg: PropGraph, g: Grammar, start: str, end: str) -> Optional[PropPath]:
    """A witness walk start→end spelling a forward-derivable string, or None."""
    if start not in pg.nodes:
        raise ValueError(f"unknown node {start!r}")
    if end not in pg.nodes:
        raise ValueError(f"unknown node {end!r}")
    sat = _Saturator(pg, g)
    fact = ("F", Sym.FWD, start, end)
    if fact not in sat.witness:
        return None
    return sat.path_of(fact)


def reach_all(pg: PropGraph, g: Grammar) -> dict:
    """Witness walks for every forward-reachable ordered pair."""
    sat = _Saturator(pg, g)
    out = {}
    for fact in sat.witness:
        if fact[0] == "F" and fact[1] is Sym.FWD:
            out[(fact[2], fact[3])] = sat.path_of(fact)
    return out
