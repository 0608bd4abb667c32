"""End-to-end runs of the command line entry point."""

import json
import random

import pytest

from imseq.cli import main
from imseq.formula import axiom_set
from imseq.gen import random_labelled_proof
from imseq.proofio import dump_proof, load_nested_proof


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_round_trip(capsys):
    code, out, _ = run(capsys, "parse", "p&q|~r->[]p")
    assert code == 0
    assert out.strip() == "p & q | (r -> false) -> []p"
    code, _, err = run(capsys, "parse", "p &")
    assert code == 1 and err


def test_reach_prints_witness(capsys):
    code, out, _ = run(capsys, "reach", "v R u, u R w", "w", "u", "--hsl", "2,1")
    assert code == 0
    assert out.split() == ["w", "b", "u", "b", "v", "d", "u"]
    code, out, _ = run(capsys, "reach", "v R u", "u", "v")
    assert code == 1 and out.strip() == "unreachable"


def test_prove_axiom_five_conjunct(capsys):
    code, out, _ = run(capsys, "prove", "--hsl", "1,1", "--depth", "12",
                       "<>[]p -> []p")
    assert code == 0
    proof = load_nested_proof(out)
    assert proof.rule == "impO"


def test_prove_unprovable(capsys):
    code, _, err = run(capsys, "prove", "--depth", "6", "p | ~p")
    assert code == 1
    assert "no proof" in err


def test_check_and_corruption(tmp_path, capsys):
    code, out, _ = run(capsys, "prove", "--hsl", "1,1", "--depth", "8",
                       "<>[]p -> []p")
    assert code == 0
    good = tmp_path / "good.json"
    good.write_text(out)
    code, out2, _ = run(capsys, "check", "--calculus", "nested",
                        "--hsl", "1,1", str(good))
    assert code == 0 and out2.strip() == "ok"

    doc = json.loads(out)
    doc["premises"][0]["rule"] = "bogus"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, "check", "--calculus", "nested",
                       "--hsl", "1,1", str(bad))
    assert code == 1
    assert "0" in err and "bogus" in err


def test_check_rejects_malformed_file(tmp_path, capsys):
    f = tmp_path / "junk.json"
    f.write_text("{not json")
    code, _, err = run(capsys, "check", str(f))
    assert code == 2 and err
    code, _, err = run(capsys, "check", str(tmp_path / "missing.json"))
    assert code == 2


def test_refine_then_translate(tmp_path, capsys):
    rng = random.Random(9001)
    ax_flags = ["--hsl", "1,1", "--d"]
    p = random_labelled_proof(rng, axiom_set([(1, 1)], d=True), mode="base", budget=4)
    src = tmp_path / "base.json"
    src.write_text(dump_proof(p))
    refined = tmp_path / "refined.json"
    code, _, _ = run(capsys, "refine", str(src), "-o", str(refined), *ax_flags)
    assert code == 0
    code, out, _ = run(capsys, "check", "--calculus", "refined",
                       str(refined), *ax_flags)
    assert code == 0

    code, _, err = run(capsys, "check", "--calculus", "refined",
                       str(src), *ax_flags)
    if any(n.rule in ("S", "diaR", "boxL") for n in p.nodes()):
        assert code == 1


def test_translate_round_trip_files(tmp_path, capsys):
    rng = random.Random(9002)
    p = random_labelled_proof(rng, axiom_set([(1, 1)]), mode="refined", budget=3)
    src = tmp_path / "refined.json"
    src.write_text(dump_proof(p))
    nested = tmp_path / "nested.json"
    code, _, _ = run(capsys, "translate", "--to", "nested", str(src),
                     "-o", str(nested), "--hsl", "1,1")
    assert code == 0
    code, _, _ = run(capsys, "check", "--calculus", "nested", str(nested),
                     "--hsl", "1,1")
    assert code == 0
    code, out, _ = run(capsys, "translate", "--to", "labelled", str(nested),
                       "--hsl", "1,1")
    assert code == 0
    assert json.loads(out)["rule"] == p.rule


def test_model_eval(tmp_path, capsys):
    model = tmp_path / "model.txt"
    model.write_text(
        "# two worlds, one step\n"
        "worlds: a b\n"
        "acc: a b\n"
        "val: b p\n")
    code, out, _ = run(capsys, "model-eval", str(model), "--formula", "<>p",
                       "--world", "a")
    assert code == 0 and out.strip() == "true"
    code, out, _ = run(capsys, "model-eval", str(model), "--formula", "<>p")
    assert code == 1 and out.strip() == "false"
    code, out, _ = run(capsys, "model-eval", str(model),
                       "--sequent", "w R u ; u: p |- w: <>p",
                       "--interp", "w=a, u=b")
    assert code == 0 and out.strip() == "true"


def test_model_eval_reports_frame_violation(tmp_path, capsys):
    model = tmp_path / "model.txt"
    model.write_text("worlds: a b\nacc: a b\n")
    code, _, err = run(capsys, "model-eval", str(model), "--formula", "p", "--d")
    assert code == 1
    assert "seriality" in err


def test_axioms_output(capsys):
    code, out, _ = run(capsys, "axioms", "--hsl", "2,1")
    assert code == 0
    assert out.startswith("hsl(2,1): ")
    assert "<><>[]p" in out

    code, out, _ = run(capsys, "axioms")
    assert code == 0
    names = [line.split(":")[0] for line in out.strip().splitlines()]
    assert names == ["A1", "A2", "A3", "A4", "A5", "D", "T", "B", "4", "5"]


def test_usage_errors(capsys):
    assert run(capsys, "prove", "p")[0] == 2          # missing --depth
    assert run(capsys, "axioms", "--hsl", "10,1")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
