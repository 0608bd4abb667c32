"""Nested sequents with input/output polarities, checker, and search.

A nested sequent is a tree of multisets: each node holds input formulas
(``A^i``), at most one node in the whole tree holds the single output
formula (``A^o``), and brackets are subtrees.  Equality is recursive
multiset equality; stored order is kept for serialization and for
addressing, so positions stay meaningful under the structural
transformations (rules only append children, never reorder them).

Nodes are addressed by child-index paths rendered as ``r``, ``r.0``,
``r.0.1``.  The propagation graph of a sequent has one node per tree
position and a forward/backward edge pair per bracket.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

from .formula import (Atom, AxiomSet, Bot, Box, Dia, Formula, Imp, And, Or,
                      ParseError, parse_formula, render_formula)
from .grammar import (PropGraph, PropPath, Sym, derives, grammar_from_axioms,
                      path_in_graph, reach_all)
from .labelled import CheckResult, RuleError, _p_int, _p_path, _p_str


@dataclass(frozen=True, eq=False)
class NestedSequent:
    inputs: tuple    # of Formula
    output: Optional[Formula]
    children: tuple  # of NestedSequent

    @cached_property
    def _key(self):
        return (
            tuple(sorted(render_formula(f) for f in self.inputs)),
            "" if self.output is None else "o " + render_formula(self.output),
            tuple(sorted(c._key for c in self.children)),
        )

    def __eq__(self, other):
        if not isinstance(other, NestedSequent):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __str__(self) -> str:
        return render_nested(self)


EMPTY = NestedSequent((), None, ())


def nseq(inputs: Iterable = (), output: Optional[Formula] = None,
         children: Iterable = ()) -> NestedSequent:
    return NestedSequent(tuple(inputs), output, tuple(children))


def output_count(s: NestedSequent) -> int:
    return (s.output is not None) + sum(output_count(c) for c in s.children)


def is_full(s: NestedSequent) -> bool:
    return output_count(s) == 1


def is_lhs(s: NestedSequent) -> bool:
    return output_count(s) == 0


def output_position(s: NestedSequent) -> Optional[tuple]:
    """(path, formula) of the unique output, or None."""
    if s.output is not None:
        return ((), s.output)
    for i, c in enumerate(s.children):
        found = output_position(c)
        if found is not None:
            return ((i,) + found[0], found[1])
    return None


def render_nested(s: NestedSequent) -> str:
    items = [f"{render_formula(f)}^i" for f in s.inputs]
    if s.output is not None:
        items.append(f"{render_formula(s.output)}^o")
    for c in s.children:
        inner = render_nested(c)
        items.append(f"[ {inner} ]" if inner else "[ ]")
    return ", ".join(items)


def _split_items(text: str) -> list:
    items = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced ']'", i)
        elif ch == "," and depth == 0:
            items.append(text[start:i])
            start = i + 1
    if depth != 0:
        raise ParseError("unbalanced '['")
    items.append(text[start:])
    return [it for it in (x.strip() for x in items) if it]


def _is_bracket(item: str) -> bool:
    if not item.startswith("["):
        return False
    depth = 0
    for i, ch in enumerate(item):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                return i == len(item) - 1
    return False


def parse_nested(text: str) -> NestedSequent:
    inputs = []
    output = None
    children = []
    for item in _split_items(text):
        if _is_bracket(item):
            children.append(parse_nested(item[1:-1]))
            continue
        if "^" not in item:
            raise ParseError(f"formula item needs a ^i or ^o marker: {item!r}")
        body, _, pol = item.rpartition("^")
        if pol == "i":
            inputs.append(parse_formula(body))
        elif pol == "o":
            if output is not None:
                raise ParseError("two output formulas at one node")
            output = parse_formula(body)
        else:
            raise ParseError(f"bad polarity marker {pol!r} in {item!r}")
    return NestedSequent(tuple(inputs), output, tuple(children))


def path_id(path: tuple) -> str:
    return "r" + "".join(f".{i}" for i in path)


def parse_path_id(text: str) -> tuple:
    parts = text.split(".")
    if parts[0] != "r" or not all(p.isdigit() for p in parts[1:]):
        raise ValueError(f"bad node id {text!r}")
    return tuple(int(p) for p in parts[1:])


def node_at(s: NestedSequent, path: tuple) -> NestedSequent:
    for i in path:
        if not 0 <= i < len(s.children):
            raise ValueError(f"no child {i} under {path_id(path)}")
        s = s.children[i]
    return s


def all_paths(s: NestedSequent) -> list:
    out = [()]
    for i, c in enumerate(s.children):
        out.extend((i,) + p for p in all_paths(c))
    return out


def replace_at(s: NestedSequent, path: tuple, new: NestedSequent) -> NestedSequent:
    if not path:
        return new
    i = path[0]
    if not 0 <= i < len(s.children):
        raise ValueError(f"no child {i}")
    kids = s.children[:i] + (replace_at(s.children[i], path[1:], new),) + s.children[i + 1:]
    return NestedSequent(s.inputs, s.output, kids)


def map_node(s: NestedSequent, path: tuple, fn) -> NestedSequent:
    return replace_at(s, path, fn(node_at(s, path)))


def output_pruned(s: NestedSequent) -> NestedSequent:
    """Drop the unique output formula; the tree must contain one."""
    pos = output_position(s)
    if pos is None:
        raise ValueError("no output formula to prune")
    path, _ = pos
    return map_node(s, path, lambda nd: NestedSequent(nd.inputs, None, nd.children))


def prop_graph_nested(s: NestedSequent) -> PropGraph:
    nodes = set()
    edges = set()

    def walk(node: NestedSequent, path: tuple):
        nodes.add(path_id(path))
        for i, c in enumerate(node.children):
            child = path + (i,)
            edges.add((path_id(path), Sym.FWD, path_id(child)))
            edges.add((path_id(child), Sym.BWD, path_id(path)))
            walk(c, child)

    walk(s, ())
    return PropGraph(frozenset(nodes), frozenset(edges))


@dataclass(frozen=True, eq=False)
class NestedProof:
    conclusion: NestedSequent
    rule: str
    params: dict
    premises: tuple

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)

    def count_rule(self, name: str) -> int:
        return (self.rule == name) + sum(p.count_rule(name) for p in self.premises)

    def nodes(self):
        yield self
        for p in self.premises:
            yield from p.nodes()


NESTED_ARITY = {
    "botI": 0, "id": 0,
    "andI": 1, "andO": 2, "orI": 2, "orO": 1, "impO": 1, "impI": 2,
    "boxO": 1, "diaI": 1, "d": 1, "pdia": 1, "pbox": 1,
}


def _p_node(seq: NestedSequent, params: dict, key: str = "at") -> tuple:
    raw = _p_str(params, key)
    try:
        path = parse_path_id(raw)
        node_at(seq, path)
    except ValueError as e:
        raise RuleError(str(e)) from e
    return path


def _p_input(seq: NestedSequent, params: dict, path: tuple, cls=None):
    idx = _p_int(params, "index")
    node = node_at(seq, path)
    if idx >= len(node.inputs):
        raise RuleError(f"no input {idx} at {path_id(path)}")
    f = node.inputs[idx]
    if cls is not None and not isinstance(f, cls):
        raise RuleError(f"input {render_formula(f)!r} has the wrong main connective")
    return idx, f


def _input_replaced(nd: NestedSequent, idx: int, *fs) -> NestedSequent:
    return NestedSequent(nd.inputs[:idx] + fs[:1] + nd.inputs[idx + 1:] + fs[1:],
                         nd.output, nd.children)


def _input_removed(nd: NestedSequent, idx: int) -> NestedSequent:
    return NestedSequent(nd.inputs[:idx] + nd.inputs[idx + 1:], nd.output, nd.children)


def _input_appended(nd: NestedSequent, f: Formula) -> NestedSequent:
    return NestedSequent(nd.inputs + (f,), nd.output, nd.children)


def _output_set(nd: NestedSequent, f: Optional[Formula]) -> NestedSequent:
    return NestedSequent(nd.inputs, f, nd.children)


def _child_appended(nd: NestedSequent, child: NestedSequent) -> NestedSequent:
    return NestedSequent(nd.inputs, nd.output, nd.children + (child,))


def _nested_path(seq: NestedSequent, params: dict, ax: AxiomSet,
                 check: bool) -> PropPath:
    path = _p_path(params, "path")
    for v in path.nodes:
        try:
            node_at(seq, parse_path_id(v))
        except ValueError as e:
            raise RuleError(str(e)) from e
    if check:
        if not path_in_graph(prop_graph_nested(seq), path):
            raise RuleError("path does not lie in the sequent's graph")
        if not derives(grammar_from_axioms(ax), Sym.FWD, path.steps):
            raise RuleError(f"path string {path.string!r} not derivable "
                            "from the forward letter")
    return path


def premises_of_nested(seq: NestedSequent, rule: str, params: dict,
                       ax: AxiomSet, check_side_conditions: bool = True) -> list:
    """Premises of a backward application at the given addresses.

    With check_side_conditions off, path membership, path derivability,
    and the d gate are skipped; only premise shapes are computed.  The
    structural transformations use that to track positions.
    """

    if rule == "botI":
        at = _p_node(seq, params)
        _p_input(seq, params, at, Bot)
        return []

    if rule == "id":
        at = _p_node(seq, params)
        idx, f = _p_input(seq, params, at, Atom)
        if node_at(seq, at).output != f:
            raise RuleError("id needs the matching atomic output at the same node")
        return []

    if rule == "andI":
        at = _p_node(seq, params)
        idx, f = _p_input(seq, params, at, And)
        return [map_node(seq, at, lambda nd: _input_replaced(nd, idx, f.left, f.right))]

    if rule == "andO":
        at = _p_node(seq, params)
        f = node_at(seq, at).output
        if not isinstance(f, And):
            raise RuleError("andO needs a conjunctive output at the node")
        return [map_node(seq, at, lambda nd: _output_set(nd, f.left)),
                map_node(seq, at, lambda nd: _output_set(nd, f.right))]

    if rule == "orI":
        at = _p_node(seq, params)
        idx, f = _p_input(seq, params, at, Or)
        return [map_node(seq, at, lambda nd: _input_replaced(nd, idx, f.left)),
                map_node(seq, at, lambda nd: _input_replaced(nd, idx, f.right))]

    if rule == "orO":
        at = _p_node(seq, params)
        f = node_at(seq, at).output
        if not isinstance(f, Or):
            raise RuleError("orO needs a disjunctive output at the node")
        side = _p_str(params, "side")
        if side not in ("left", "right"):
            raise RuleError("param 'side' must be 'left' or 'right'")
        chosen = f.left if side == "left" else f.right
        return [map_node(seq, at, lambda nd: _output_set(nd, chosen))]

    if rule == "impO":
        at = _p_node(seq, params)
        f = node_at(seq, at).output
        if not isinstance(f, Imp):
            raise RuleError("impO needs an implicative output at the node")
        return [map_node(seq, at,
                         lambda nd: _input_appended(_output_set(nd, f.right), f.left))]

    if rule == "impI":
        at = _p_node(seq, params)
        idx, f = _p_input(seq, params, at, Imp)
        if not is_full(seq):
            raise RuleError("impI needs a full conclusion to prune")
        left = map_node(output_pruned(seq), at, lambda nd: _output_set(nd, f.left))
        right = map_node(seq, at, lambda nd: _input_replaced(nd, idx, f.right))
        return [left, right]

    if rule == "boxO":
        at = _p_node(seq, params)
        f = node_at(seq, at).output
        if not isinstance(f, Box):
            raise RuleError("boxO needs a box output at the node")
        return [map_node(seq, at,
                         lambda nd: _child_appended(_output_set(nd, None),
                                                    nseq(output=f.body)))]

    if rule == "diaI":
        at = _p_node(seq, params)
        idx, f = _p_input(seq, params, at, Dia)
        return [map_node(seq, at,
                         lambda nd: _child_appended(_input_removed(nd, idx),
                                                    nseq(inputs=(f.body,))))]

    if rule == "d":
        if check_side_conditions and not ax.has_d:
            raise RuleError("rule d needs the seriality axiom")
        at = _p_node(seq, params)
        return [map_node(seq, at, lambda nd: _child_appended(nd, EMPTY))]

    if rule == "pdia":
        path = _nested_path(seq, params, ax, check_side_conditions)
        w = parse_path_id(path.start)
        u = parse_path_id(path.end)
        f = node_at(seq, w).output
        if not isinstance(f, Dia):
            raise RuleError("pdia needs a diamond output at the path's start")
        pruned = map_node(seq, w, lambda nd: _output_set(nd, None))
        return [map_node(pruned, u, lambda nd: _output_set(nd, f.body))]

    if rule == "pbox":
        path = _nested_path(seq, params, ax, check_side_conditions)
        w = parse_path_id(path.start)
        u = parse_path_id(path.end)
        idx = _p_int(params, "index")
        node = node_at(seq, w)
        if idx >= len(node.inputs) or not isinstance(node.inputs[idx], Box):
            raise RuleError("pbox needs a box input at the path's start")
        body = node.inputs[idx].body
        return [map_node(seq, u, lambda nd: _input_appended(nd, body))]

    raise RuleError(f"unknown rule {rule!r}")


def check_nested(p: NestedProof, ax: AxiomSet) -> CheckResult:
    def walk(node: NestedProof, at: str) -> CheckResult:
        where = at or "root"
        if node.rule not in NESTED_ARITY:
            return CheckResult(False, f"unknown rule {node.rule!r}", where)
        try:
            expected = premises_of_nested(node.conclusion, node.rule, node.params, ax)
        except RuleError as e:
            return CheckResult(False, f"{node.rule}: {e}", where)
        if len(node.premises) != len(expected):
            return CheckResult(
                False,
                f"{node.rule}: expected {len(expected)} premises, got {len(node.premises)}",
                where)
        for i, (sub, want) in enumerate(zip(node.premises, expected)):
            if sub.conclusion != want:
                return CheckResult(
                    False,
                    f"{node.rule}: premise {i} is {sub.conclusion}, expected {want}",
                    where)
            r = walk(sub, f"{at}.{i}" if at else str(i))
            if not r:
                return r
        return CheckResult(True)

    return walk(p, "")


def _try_leaf(seq: NestedSequent) -> Optional[NestedProof]:
    for path in all_paths(seq):
        node = node_at(seq, path)
        for idx, f in enumerate(node.inputs):
            if isinstance(f, Bot):
                return NestedProof(seq, "botI",
                                   {"at": path_id(path), "index": idx}, ())
            if isinstance(f, Atom) and node.output == f:
                return NestedProof(seq, "id",
                                   {"at": path_id(path), "index": idx}, ())
    return None


def prove_bounded(goal: NestedSequent, ax: AxiomSet, depth: int) -> Optional[NestedProof]:
    """Backward search for a proof of height at most depth + 1.

    Strategy: close leaves; apply the first non-branching invertible
    rule; then branching invertible rules; then backtracking choice
    points (output disjunction side, impI, propagation targets, d).
    A branch gives up on a repeated sequent; failures are cached per
    budget.  Sound (results always check) but incomplete in general.
    """
    if not is_full(goal):
        raise ValueError("goal must have exactly one output formula")
    g = grammar_from_axioms(ax)
    fail: dict = {}

    def attempt(seq, rule, params, budget, seen):
        try:
            prems = premises_of_nested(seq, rule, params, ax)
        except RuleError:
            return None
        subs = []
        for prem in prems:
            sub = search(prem, budget - 1, seen)
            if sub is None:
                return None
            subs.append(sub)
        return NestedProof(seq, rule, params, tuple(subs))

    def search(seq, budget, seen):
        leaf = _try_leaf(seq)
        if leaf is not None:
            return leaf
        if budget <= 0:
            return None
        key = seq._key
        if key in seen or fail.get(key, -1) >= budget:
            return None
        seen = seen | {key}

        positions = [(path, node_at(seq, path)) for path in all_paths(seq)]

        def commit(rule, params):
            got = attempt(seq, rule, params, budget, seen)
            if got is None:
                fail[key] = max(fail.get(key, -1), budget)
            return got

        # non-branching invertible rules, committed
        for path, node in positions:
            pid = path_id(path)
            for idx, f in enumerate(node.inputs):
                if isinstance(f, And):
                    return commit("andI", {"at": pid, "index": idx})
                if isinstance(f, Dia):
                    return commit("diaI", {"at": pid, "index": idx})
            if isinstance(node.output, Imp):
                return commit("impO", {"at": pid})
            if isinstance(node.output, Box):
                return commit("boxO", {"at": pid})

        # branching invertible rules, committed
        for path, node in positions:
            pid = path_id(path)
            if isinstance(node.output, And):
                return commit("andO", {"at": pid})
            for idx, f in enumerate(node.inputs):
                if isinstance(f, Or):
                    return commit("orI", {"at": pid, "index": idx})

        # choice points, backtracking
        reach = None
        for path, node in positions:
            pid = path_id(path)
            if isinstance(node.output, Or):
                for side in ("left", "right"):
                    got = attempt(seq, "orO", {"at": pid, "side": side}, budget, seen)
                    if got is not None:
                        return got
            if isinstance(node.output, Dia):
                if reach is None:
                    reach = reach_all(prop_graph_nested(seq), g)
                for (src, dst), witness in sorted(reach.items()):
                    if src != pid:
                        continue
                    got = attempt(seq, "pdia", {"path": witness.to_list()},
                                  budget, seen)
                    if got is not None:
                        return got
            for idx, f in enumerate(node.inputs):
                if isinstance(f, Imp):
                    got = attempt(seq, "impI", {"at": pid, "index": idx}, budget, seen)
                    if got is not None:
                        return got
                if isinstance(f, Box):
                    if reach is None:
                        reach = reach_all(prop_graph_nested(seq), g)
                    for (src, dst), witness in sorted(reach.items()):
                        if src != pid:
                            continue
                        target = node_at(seq, parse_path_id(dst))
                        if f.body in target.inputs:
                            continue
                        got = attempt(seq, "pbox",
                                      {"path": witness.to_list(), "index": idx},
                                      budget, seen)
                        if got is not None:
                            return got
        if ax.has_d:
            for path, node in positions:
                if EMPTY in node.children:
                    continue
                got = attempt(seq, "d", {"at": path_id(path)}, budget, seen)
                if got is not None:
                    return got

        fail[key] = max(fail.get(key, -1), budget)
        return None

    return search(goal, depth, frozenset())


def prove_formula(a: Formula, ax: AxiomSet, depth: int) -> Optional[NestedProof]:
    return prove_bounded(nseq(output=a), ax, depth)
