"""Translations between labelled tree sequents and nested sequents.

A labelled sequent whose relational atoms form a tree over its labels
carries the same information as a full nested sequent: labels become
tree positions and relational atoms become brackets.  Both directions
are implemented on sequents and lifted to whole proofs, mapping rules
one-to-one and rewriting principal addresses, eigenvariables, and
witness paths through the tree correspondence.

Labelled-to-nested requires a propagation-only proof; run
``refine.eliminate_structural`` first if the proof uses diaR, boxL, or
the relational expansion rule.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import count
from typing import Optional

from .formula import AxiomSet, Bot, parse_formula, render_formula
from .grammar import PropPath
from .labelled import (LabelledProof, LabelledSequent, RuleError,
                       check_labelled, premises_of_labelled, render_labelled_sequent)
from .nested import (NestedProof, NestedSequent, check_nested, is_full,
                     node_at, output_position, parse_path_id, path_id,
                     premises_of_nested)


@dataclass(frozen=True)
class TreeCert:
    """Witness that a sequent's relation is a tree: the root label and
    the parent of every other label."""

    root: str
    parent: dict

    def labels(self) -> set:
        return {self.root, *self.parent}


def is_labelled_tree(seq: LabelledSequent) -> Optional[TreeCert]:
    """Certificate if the relational atoms form a tree covering every
    label of the sequent, else None.

    A repeated atom, a label with two parents, a self loop, a second
    root, or an unreachable label all disqualify.  A sequent with no
    relational atoms and a single label is the degenerate tree.
    """
    labels = seq.labels()
    parent: dict = {}
    children: dict = {}
    for w, u in seq.rel:
        if u in parent or w == u:
            return None
        parent[u] = w
        children.setdefault(w, []).append(u)
    roots = labels - parent.keys()
    if len(roots) != 1:
        return None
    root = roots.pop()
    seen = {root}
    todo = [root]
    while todo:
        for c in children.get(todo.pop(), ()):
            seen.add(c)
            todo.append(c)
    if seen != labels:
        return None
    return TreeCert(root, parent)


@dataclass(frozen=True, eq=False)
class SequentParts:
    """Succedent-free half of a labelled sequent."""

    rel: tuple = ()
    ante: tuple = ()

    @cached_property
    def _key(self):
        return (tuple(sorted(f"{w} R {u}" for w, u in self.rel)),
                tuple(sorted(f"{w}: {render_formula(a)}" for w, a in self.ante)))

    def __eq__(self, other):
        if not isinstance(other, SequentParts):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)


EMPTY_PARTS = SequentParts()


def seq_compose(a: SequentParts, b: SequentParts) -> SequentParts:
    """Componentwise multiset union."""
    return SequentParts(a.rel + b.rel, a.ante + b.ante)


def to_labelled_with_map(s: NestedSequent) -> tuple:
    """(labelled sequent, address-to-label map) for a full nested sequent.

    Labels are w0, w1, ... assigned in preorder, so the result is
    deterministic in the stored child order.
    """
    if not is_full(s):
        raise ValueError("translation needs exactly one output formula")
    names: dict = {}
    fresh = count()

    def walk(node: NestedSequent, addr: tuple) -> SequentParts:
        lab = f"w{next(fresh)}"
        names[addr] = lab
        parts = SequentParts((), tuple((lab, f) for f in node.inputs))
        for i, c in enumerate(node.children):
            sub = walk(c, addr + (i,))
            edge = SequentParts(((lab, names[addr + (i,)]),), ())
            parts = seq_compose(parts, seq_compose(edge, sub))
        return parts

    parts = walk(s, ())
    pos, f = output_position(s)
    return LabelledSequent(parts.rel, parts.ante, (names[pos], f)), names


def to_labelled(s: NestedSequent) -> LabelledSequent:
    return to_labelled_with_map(s)[0]


def to_nested_with_map(seq: LabelledSequent) -> tuple:
    """(nested sequent, label-to-address map) for a labelled tree sequent.

    Children are ordered canonically, by the rendered key of the
    translated subtree, so label names and stored atom order cannot
    influence the result.
    """
    cert = is_labelled_tree(seq)
    if cert is None:
        raise ValueError("relational atoms do not form a tree over the labels")
    children: dict = {}
    for w, u in seq.rel:
        children.setdefault(w, []).append(u)
    inputs: dict = {}
    for w, f in seq.ante:
        inputs.setdefault(w, []).append(f)
    out_w, out_f = seq.succ

    def build(lab: str) -> tuple:
        built = [build(c) for c in children.get(lab, ())]
        built.sort(key=lambda pair: pair[0]._key)
        node = NestedSequent(tuple(inputs.get(lab, ())),
                             out_f if lab == out_w else None,
                             tuple(sub for sub, _ in built))
        m = {lab: ()}
        for i, (_, sub_map) in enumerate(built):
            for l2, addr in sub_map.items():
                m[l2] = (i,) + addr
        return node, m

    return build(cert.root)


def to_nested(seq: LabelledSequent) -> NestedSequent:
    return to_nested_with_map(seq)[0]


def canonical_relabel(seq: LabelledSequent) -> LabelledSequent:
    """Rename labels to w0, w1, ... breadth-first from the root, with
    siblings in the canonical child order.

    Two tree sequents that differ only by a label bijection relabel to
    equal sequents, so this is the normal form for comparisons.
    """
    n, m = to_nested_with_map(seq)
    order: dict = {}
    q = deque([((), n)])
    while q:
        addr, node = q.popleft()
        order[addr] = f"w{len(order)}"
        for j, c in enumerate(node.children):
            q.append((addr + (j,), c))
    ren = {lab: order[addr] for lab, addr in m.items()}
    return LabelledSequent(
        tuple((ren[w], ren[u]) for w, u in seq.rel),
        tuple((ren[w], f) for w, f in seq.ante),
        (ren[seq.succ[0]], seq.succ[1]))


_TO_NESTED_RULE = {
    "id": "id", "botL": "botI",
    "andL": "andI", "orL": "orI", "impL": "impI",
    "andR": "andO", "orR": "orO", "impR": "impO",
    "diaL": "diaI", "boxR": "boxO",
    "d": "d", "pdia": "pdia", "pbox": "pbox",
}
_TO_LABELLED_RULE = {v: k for k, v in _TO_NESTED_RULE.items()}


def _input_index(n: NestedSequent, addr: tuple, f) -> int:
    return node_at(n, addr).inputs.index(f)


def _nested_params(L: LabelledSequent, n: NestedSequent, m: dict,
                   rule: str, params: dict) -> dict:
    if rule == "id":
        w, f = L.succ
        return {"at": path_id(m[w]), "index": _input_index(n, m[w], f)}
    if rule == "botL":
        for w, f in L.ante:
            if isinstance(f, Bot):
                return {"at": path_id(m[w]), "index": _input_index(n, m[w], f)}
        raise ValueError("no falsum antecedent member to translate")
    if rule in ("andL", "orL", "impL", "diaL"):
        w = params["world"]
        f = parse_formula(params["formula"])
        return {"at": path_id(m[w]), "index": _input_index(n, m[w], f)}
    if rule in ("andR", "impR", "boxR"):
        return {"at": path_id(m[L.succ[0]])}
    if rule == "orR":
        return {"at": path_id(m[L.succ[0]]), "side": params["side"]}
    if rule == "d":
        return {"at": path_id(m[params["world"]])}
    if rule == "pdia":
        path = PropPath.from_list(params["path"])
        return {"path": PropPath(tuple(path_id(m[x]) for x in path.nodes),
                                 path.steps).to_list()}
    if rule == "pbox":
        w = params["world"]
        f = parse_formula(params["formula"])
        path = PropPath.from_list(params["path"])
        return {"path": PropPath(tuple(path_id(m[x]) for x in path.nodes),
                                 path.steps).to_list(),
                "index": _input_index(n, m[w], f)}
    raise ValueError(f"rule {rule!r} has no nested counterpart; "
                     "eliminate the relational rules first")


def _proof_to_nested(p: LabelledProof, ax: AxiomSet) -> NestedProof:
    for node in p.nodes():
        if node.rule in ("S", "diaR", "boxL"):
            raise ValueError(f"rule {node.rule!r} has no nested counterpart; "
                             "eliminate the relational rules first")
    ok = check_labelled(p, ax, "refined")
    if not ok:
        raise ValueError(f"input proof fails the checker at {ok.at}: {ok.message}")
    cert = is_labelled_tree(p.conclusion)
    if cert is None:
        raise ValueError("conclusion is not a labelled tree sequent")
    root = cert.root

    def walk(q: LabelledProof) -> NestedProof:
        c = is_labelled_tree(q.conclusion)
        if c is None or c.root != root:
            raise ValueError(
                f"fixed root property failed at {render_labelled_sequent(q.conclusion)}")
        n, m = to_nested_with_map(q.conclusion)
        params = _nested_params(q.conclusion, n, m, q.rule, q.params)
        return NestedProof(n, _TO_NESTED_RULE[q.rule], params,
                           tuple(walk(sub) for sub in q.premises))

    return walk(p)


def _labelled_params(q: NestedProof, m: dict, fresh: int) -> tuple:
    """(params, extended map, next fresh index) for one rule instance."""
    rule, params, n = q.rule, q.params, q.conclusion

    def grew(addr: tuple) -> tuple:
        new = addr + (len(node_at(n, addr).children),)
        lab = f"w{fresh}"
        return lab, {**m, new: lab}

    if rule in ("id", "botI", "andO", "impO"):
        return {}, m, fresh
    if rule == "orO":
        return {"side": params["side"]}, m, fresh
    if rule in ("andI", "orI", "impI"):
        addr = parse_path_id(params["at"])
        f = node_at(n, addr).inputs[params["index"]]
        return {"world": m[addr], "formula": render_formula(f)}, m, fresh
    if rule == "diaI":
        addr = parse_path_id(params["at"])
        f = node_at(n, addr).inputs[params["index"]]
        lab, m2 = grew(addr)
        return {"world": m[addr], "formula": render_formula(f), "fresh": lab}, m2, fresh + 1
    if rule == "boxO":
        addr = parse_path_id(params["at"])
        lab, m2 = grew(addr)
        return {"fresh": lab}, m2, fresh + 1
    if rule == "d":
        addr = parse_path_id(params["at"])
        lab, m2 = grew(addr)
        return {"world": m[addr], "fresh": lab}, m2, fresh + 1
    if rule == "pdia":
        path = PropPath.from_list(params["path"])
        lab_path = PropPath(tuple(m[parse_path_id(x)] for x in path.nodes), path.steps)
        return {"path": lab_path.to_list()}, m, fresh
    if rule == "pbox":
        path = PropPath.from_list(params["path"])
        start = parse_path_id(path.start)
        f = node_at(n, start).inputs[params["index"]]
        lab_path = PropPath(tuple(m[parse_path_id(x)] for x in path.nodes), path.steps)
        return {"world": m[start], "formula": render_formula(f),
                "to": m[parse_path_id(path.end)], "path": lab_path.to_list()}, m, fresh
    raise ValueError(f"unknown rule {rule!r}")


def _realign(stored: NestedSequent, shape: NestedSequent, at_stored: tuple,
             at_shape: tuple, m: dict, out: dict) -> None:
    """Label addresses of a stored premise via a matching against the
    rule-computed premise shape.

    The two trees are multiset-equal, so a greedy matching of equal
    children always completes; equal siblings are interchangeable, which
    makes any such matching sound.
    """
    out[at_stored] = m[at_shape]
    used: set = set()
    for i, c in enumerate(stored.children):
        for j, d in enumerate(shape.children):
            if j in used or c != d:
                continue
            used.add(j)
            _realign(c, d, at_stored + (i,), at_shape + (j,), m, out)
            break
        else:
            raise ValueError("premise trees do not align")


def _proof_to_labelled(p: NestedProof, ax: AxiomSet) -> LabelledProof:
    ok = check_nested(p, ax)
    if not ok:
        raise ValueError(f"input proof fails the checker at {ok.at}: {ok.message}")
    L0, names = to_labelled_with_map(p.conclusion)

    def walk(q: NestedProof, L: LabelledSequent, m: dict, fresh: int) -> LabelledProof:
        if to_nested(L) != q.conclusion:
            raise ValueError(
                f"translation drifted at {render_labelled_sequent(L)}")
        rule = _TO_LABELLED_RULE[q.rule]
        params, m2, fresh2 = _labelled_params(q, m, fresh)
        try:
            prems = premises_of_labelled(L, rule, params, ax)
        except RuleError as e:
            raise ValueError(f"translated instance of {rule} is invalid: {e}") from e
        shapes = premises_of_nested(q.conclusion, q.rule, q.params, ax)
        subs = []
        for sub, prem, shape in zip(q.premises, prems, shapes):
            sub_map: dict = {}
            _realign(sub.conclusion, shape, (), (), m2, sub_map)
            subs.append(walk(sub, prem, sub_map, fresh2))
        return LabelledProof(L, rule, params, tuple(subs))

    return walk(p, L0, names, len(names))


def translate_proof(p, direction: str, ax: AxiomSet):
    """Translate a whole proof into the other calculus.

    direction names the target: "nested" takes a propagation-only
    labelled proof of a tree sequent to a nested proof; "labelled" goes
    the other way.  The input is checked first and the rule-by-rule
    mapping keeps every witness path letter-for-letter.
    """
    if direction == "nested":
        if not isinstance(p, LabelledProof):
            raise ValueError("direction 'nested' needs a labelled proof")
        return _proof_to_nested(p, ax)
    if direction == "labelled":
        if not isinstance(p, NestedProof):
            raise ValueError("direction 'labelled' needs a nested proof")
        return _proof_to_labelled(p, ax)
    raise ValueError(f"direction must be 'nested' or 'labelled', not {direction!r}")
