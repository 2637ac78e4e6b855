from __future__ import annotations

import io
import json
import shutil

import pytest

from disco.claims import corpus_path
from disco.cli import main
from disco.game import load_strategy, load_game
from disco.formula import parse
from disco.proof import gen_supermonotonicity, render_script

FIG = {n: str(corpus_path(f"{n}.game")) for n in ("fig1", "fig2", "fig3")}
ALT = str(corpus_path("fig2_alternating.strategy"))


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_validate():
    code, text = run("validate", FIG["fig1"])
    assert code == 0 and text.startswith("ok: 4 states")


def test_validate_epsilon_cost(tmp_path):
    desc = json.loads(open(FIG["fig1"]).read())
    desc["transitions"].append({"from": "w", "profile": {"a": "eps"}, "costs": {"a": "1"},
                                "to": "s"})
    path = tmp_path / "bad.game"
    path.write_text(json.dumps(desc))
    code, text = run("validate", str(path))
    assert code == 3 and "E-EPSILON-COST" in text


def test_validate_missing_file(tmp_path):
    assert run("validate", str(tmp_path / "none.game"))[0] == 3


def test_check_verdicts():
    code, text = run("check", FIG["fig3"], "--state", "w1", "--gamma", "2/3",
                     "--formula", "[a:8/9, b:8/9, d:0] p")
    assert code == 0 and text.startswith("TRUE")
    code, text = run("check", FIG["fig2"], "--state", "w", "--gamma", "1/2",
                     "--formula", "[a:199] p")
    assert code == 1 and text.startswith("FALSE")
    code, text = run("check", FIG["fig1"], "--state", "w", "--gamma", "1/2",
                     "--formula", "[a:2] p", "--max-depth", "1")
    assert code == 2 and text.startswith("UNKNOWN")


@pytest.mark.parametrize("gamma", ["1", "0", "3/2", "0.5", "x"])
def test_check_bad_gamma(gamma):
    code, _ = run("check", FIG["fig1"], "--state", "w", "--gamma", gamma, "--formula", "p")
    assert code == 3


def test_check_input_errors():
    assert run("check", FIG["fig1"], "--state", "nope", "--gamma", "1/2", "--formula", "p")[0] == 3
    assert run("check", FIG["fig1"], "--state", "w", "--gamma", "1/2", "--formula", "(p")[0] == 3
    assert run("check", FIG["fig1"], "--state", "w", "--gamma", "1/2")[0] == 3
    assert run("frobnicate")[0] == 3
    assert run()[0] == 3


def test_check_oracle():
    code, text = run("check", FIG["fig1"], "--state", "w", "--gamma", "1/2",
                     "--formula", "[a:2] p", "--oracle", "3")
    assert code == 2 and text.startswith("UNKNOWN")
    code, _ = run("check", FIG["fig1"], "--state", "w", "--gamma", "1/2",
                  "--formula", "[a:4] p", "--oracle", "1")
    assert code == 0


def test_witness_file_replays_through_simulate(tmp_path):
    path = tmp_path / "w.strategy"
    code, text = run("check", FIG["fig2"], "--state", "w", "--gamma", "1/2",
                     "--formula", "[a:4/3, b:2/3] p", "--witness", str(path))
    assert code == 0 and "witness written" in text
    strategy = load_strategy(path)
    assert strategy.coalition == ("a", "b")
    code, text = run("simulate", FIG["fig2"], str(path), "--start", "w", "--depth", "8",
                     "--gamma", "1/2")
    assert code == 0
    costs = text.strip().splitlines()[-1]
    assert costs.startswith("cost: ")


def test_simulate():
    code, text = run("simulate", FIG["fig2"], ALT, "--start", "w", "--depth", "4",
                     "--gamma", "1/2")
    assert code == 0
    assert text.strip().splitlines()[-1] == "cost: a: 5/4, b: 5/8"
    code, text = run("simulate", FIG["fig2"], ALT, "--start", "w", "--depth", "0",
                     "--gamma", "1/2")
    assert code == 0 and text.strip() == "cost: a: 0, b: 0"


def test_simulate_bad_strategy(tmp_path):
    foreign = tmp_path / "foreign.strategy"
    foreign.write_text(json.dumps({"coalition": ["z"], "memory": ["m"], "init": "m",
                                   "act": {"m,z": "eps"}}))
    assert run("simulate", FIG["fig2"], str(foreign), "--start", "w", "--depth", "2",
               "--gamma", "1/2")[0] == 3
    broken = tmp_path / "broken.strategy"
    broken.write_text("[]")
    assert run("simulate", FIG["fig2"], str(broken), "--start", "w", "--depth", "2",
               "--gamma", "1/2")[0] == 3


def test_prove(tmp_path):
    good = tmp_path / "mono.proof"
    script = gen_supermonotonicity({"a"}, {"a": 1}, {"a", "b"}, {"a": 2, "b": 5}, parse("p"))
    good.write_text(render_script(script))
    assert run("prove", str(good)) == (0, "VALID\n")

    bad = tmp_path / "scope.proof"
    bad.write_text("hyp: p\n1: p ; hyp 1\n2: [a:1] p ; nec [a:1] 1\n")
    code, text = run("prove", str(bad))
    assert code == 1 and "line 2" in text and "E-NEC-SCOPE" in text

    empty = tmp_path / "empty.proof"
    empty.write_text("")
    assert run("prove", str(empty))[0] == 3
    assert run("prove", str(tmp_path / "missing.proof"))[0] == 3


def test_reproduce_default():
    code, text = run("reproduce")
    assert code == 0
    assert "0 failed" in text and "FAIL" not in text


def test_reproduce_other_gamma():
    code, text = run("reproduce", "--gamma", "2/3")
    assert code == 0 and "0 failed" in text


def test_reproduce_tampered_corpus(tmp_path):
    for name in ("fig1.game", "fig2.game", "fig3.game"):
        shutil.copy(corpus_path(name), tmp_path / name)
    desc = json.loads((tmp_path / "fig1.game").read_text())
    for tr in desc["transitions"]:
        if tr["from"] == "v" and tr["to"] == "v":
            tr["costs"] = {"a": "3/2"}
    (tmp_path / "fig1.game").write_text(json.dumps(desc))
    load_game(tmp_path / "fig1.game")
    code, text = run("reproduce", "--corpus", str(tmp_path))
    assert code == 1 and "FAIL" in text


def test_reproduce_corrupt_corpus(tmp_path):
    for name in ("fig1.game", "fig2.game", "fig3.game"):
        shutil.copy(corpus_path(name), tmp_path / name)
    (tmp_path / "fig2.game").write_text("{")
    assert run("reproduce", "--corpus", str(tmp_path))[0] == 3
