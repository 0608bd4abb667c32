import random

from imseq.formula import axiom_set
from imseq.gen import random_full_nested, random_labelled_proof
from imseq.labelled import check_labelled
from imseq.nested import is_full
from imseq.proofio import dump_proof


def test_generators_deterministic():
    ax = axiom_set([(1, 1)], d=True)
    a = dump_proof(random_labelled_proof(random.Random(5), ax, mode="base"))
    b = dump_proof(random_labelled_proof(random.Random(5), ax, mode="base"))
    assert a == b
    s = random_full_nested(random.Random(5), depth=3)
    assert s == random_full_nested(random.Random(5), depth=3)
    assert is_full(s)


def test_base_mode_reaches_relational_rules():
    rng = random.Random(6)
    ax = axiom_set([(0, 1), (1, 1)], d=True)
    hits = {"S": 0, "diaR": 0, "boxL": 0, "d": 0}
    for _ in range(40):
        p = random_labelled_proof(rng, ax, mode="base", budget=5)
        assert check_labelled(p, ax, "base")
        for n in p.nodes():
            if n.rule in hits:
                hits[n.rule] += 1
    assert all(v > 0 for v in hits.values()), hits
