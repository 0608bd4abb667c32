"""Finite bi-relational models: structure checks, evaluation, generation.

A model carries a preorder ``leq``, an accessibility relation ``acc``,
and a valuation given as a set of (world, atom) pairs.  Truth of an
atom, implication, and box is quantified over ``leq``-successors, so
well-formed models must satisfy the two confluence conditions (F1, F2)
and upward-closed valuations for truth to be monotone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping

from .formula import And, Atom, AxiomSet, Bot, Box, Dia, Formula, Imp, Or
from .labelled import LabelledSequent


@dataclass(frozen=True)
class Violation:
    condition: str
    witness: tuple

    def __str__(self) -> str:
        return f"{self.condition} at {self.witness}"


@dataclass(frozen=True)
class Model:
    worlds: frozenset
    leq: frozenset  # pairs (w, w')
    acc: frozenset  # pairs (w, v)
    val: frozenset  # pairs (world, atom name)


def model_of(worlds: Iterable[str], leq: Iterable = (), acc: Iterable = (),
             val: Iterable = ()) -> Model:
    """Build a model, always including the reflexive leq pairs."""
    ws = frozenset(worlds)
    return Model(ws,
                 frozenset(tuple(p) for p in leq) | frozenset((w, w) for w in ws),
                 frozenset(tuple(p) for p in acc),
                 frozenset(tuple(p) for p in val))


def check_model(m: Model) -> list:
    """Violations of the five structural conditions, empty iff well formed.

    Conditions: leq reflexive, leq transitive, F1, F2, monotone
    valuation.  Out-of-domain pairs are reported as domain violations.
    """
    out = []
    for a, b in sorted(m.leq):
        if a not in m.worlds or b not in m.worlds:
            out.append(Violation("domain-leq", (a, b)))
    for a, b in sorted(m.acc):
        if a not in m.worlds or b not in m.worlds:
            out.append(Violation("domain-acc", (a, b)))
    for w, p in sorted(m.val):
        if w not in m.worlds:
            out.append(Violation("domain-val", (w, p)))
    if out:
        return out
    for w in sorted(m.worlds):
        if (w, w) not in m.leq:
            out.append(Violation("leq-reflexive", (w,)))
    for a, b in sorted(m.leq):
        for b2, c in sorted(m.leq):
            if b == b2 and (a, c) not in m.leq:
                out.append(Violation("leq-transitive", (a, b, c)))
    # F1: wRv and v <= v' need some w' with w <= w' and w'Rv'
    for w, v in sorted(m.acc):
        for v2, v_up in sorted(m.leq):
            if v2 != v:
                continue
            if not any((w, w_up) in m.leq and (w_up, v_up) in m.acc
                       for w_up in m.worlds):
                out.append(Violation("F1", (w, v, v_up)))
    # F2: w <= w' and wRv need some v' with w'Rv' and v <= v'
    for w, w_up in sorted(m.leq):
        for w2, v in sorted(m.acc):
            if w2 != w:
                continue
            if not any((w_up, v_up) in m.acc and (v, v_up) in m.leq
                       for v_up in m.worlds):
                out.append(Violation("F2", (w, w_up, v)))
    for w, p in sorted(m.val):
        for w2, w_up in sorted(m.leq):
            if w2 == w and (w_up, p) not in m.val:
                out.append(Violation("monotonicity", (w, w_up, p)))
    return out


def _power_pairs(m: Model, n: int) -> set:
    """Pairs related by n accessibility steps; zero steps is identity."""
    pairs = {(w, w) for w in m.worlds}
    for _ in range(n):
        pairs = {(a, c) for a, b in pairs for b2, c in m.acc if b == b2}
    return pairs


def check_frame_conditions(m: Model, ax: AxiomSet) -> list:
    out = []
    if ax.has_d:
        for w in sorted(m.worlds):
            if not any(a == w for a, _ in m.acc):
                out.append(Violation("seriality", (w,)))
    for n, k in sorted(ax.hsl):
        rn = _power_pairs(m, n)
        rk = _power_pairs(m, k)
        for w in sorted(m.worlds):
            for w2, u in sorted(rn):
                if w2 != w:
                    continue
                for w3, v in sorted(rk):
                    if w3 == w and (u, v) not in m.acc:
                        out.append(Violation(f"hsl({n},{k})", (w, u, v)))
    return out


def eval_formula(m: Model, w: str, a: Formula) -> bool:
    if w not in m.worlds:
        raise ValueError(f"unknown world {w!r}")
    cache: dict = {}

    def go(x: str, f: Formula) -> bool:
        key = (x, f)
        if key in cache:
            return cache[key]
        if isinstance(f, Atom):
            r = (x, f.name) in m.val
        elif isinstance(f, Bot):
            r = False
        elif isinstance(f, And):
            r = go(x, f.left) and go(x, f.right)
        elif isinstance(f, Or):
            r = go(x, f.left) or go(x, f.right)
        elif isinstance(f, Imp):
            r = all(not go(y, f.left) or go(y, f.right)
                    for x2, y in m.leq if x2 == x)
        elif isinstance(f, Dia):
            r = any(go(v, f.body) for x2, v in m.acc if x2 == x)
        elif isinstance(f, Box):
            r = all(go(v, f.body)
                    for x2, y in m.leq if x2 == x
                    for y2, v in m.acc if y2 == y)
        else:
            raise TypeError(f"not a formula: {f!r}")
        cache[key] = r
        return r

    return go(w, a)


def globally_true(m: Model, a: Formula) -> bool:
    return all(eval_formula(m, w, a) for w in m.worlds)


def sat_sequent(m: Model, interp: Mapping, seq: LabelledSequent) -> bool:
    """Whether the sequent holds in m under the label interpretation.

    The antecedent side (relational atoms and labelled formulas) must
    force the succedent formula.  The interpretation has to cover every
    label of the sequent.
    """
    for lab in sorted(seq.labels()):
        if lab not in interp:
            raise ValueError(f"interpretation misses label {lab!r}")
        if interp[lab] not in m.worlds:
            raise ValueError(f"label {lab!r} maps outside the model")
    if any((interp[w], interp[u]) not in m.acc for w, u in seq.rel):
        return True
    if any(not eval_formula(m, interp[w], f) for w, f in seq.ante):
        return True
    w, f = seq.succ
    return eval_formula(m, interp[w], f)


def random_model(ax: AxiomSet, max_worlds: int, seed: int) -> Model:
    """A pseudorandom model passing both checkers for the axiom set.

    Random preorder and accessibility relations are closed jointly to a
    fixpoint: upward closure of acc along leq on both sides (gives F1
    and F2), the (n, k) closures, and a self-loop at any dead end when
    seriality is required.  The valuation is then closed upward.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    rng = random.Random(seed)
    n = rng.randint(1, max_worlds)
    worlds = [f"m{i}" for i in range(n)]
    leq = {(w, w) for w in worlds}
    for w in worlds:
        for u in worlds:
            if w != u and rng.random() < 0.25:
                leq.add((w, u))
    changed = True
    while changed:  # transitive closure
        changed = False
        for a, b in list(leq):
            for b2, c in list(leq):
                if b == b2 and (a, c) not in leq:
                    leq.add((a, c))
                    changed = True
    acc = set()
    for w in worlds:
        for u in worlds:
            if rng.random() < 0.3:
                acc.add((w, u))
    changed = True
    while changed:
        changed = False
        before = len(acc)
        acc |= {(w2, v2) for w, v in list(acc)
                for w1, w2 in leq if w1 == w
                for v1, v2 in leq if v1 == v}
        for pn, pk in sorted(ax.hsl):
            m0 = Model(frozenset(worlds), frozenset(leq), frozenset(acc), frozenset())
            rn = _power_pairs(m0, pn)
            rk = _power_pairs(m0, pk)
            acc |= {(u, v) for w in worlds
                    for w2, u in rn if w2 == w
                    for w3, v in rk if w3 == w}
        if ax.has_d:
            for w in worlds:
                if not any(a == w for a, _ in acc):
                    acc.add((w, w))
        changed = len(acc) != before
    val = set()
    for w in worlds:
        for p in ("p", "q", "r"):
            if rng.random() < 0.4:
                val.add((w, p))
    val |= {(u, p) for w, p in list(val) for w2, u in leq if w2 == w}
    return Model(frozenset(worlds), frozenset(leq), frozenset(acc), frozenset(val))
