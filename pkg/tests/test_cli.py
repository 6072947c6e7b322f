from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from sacks_lab import codes as C
from sacks_lab.cli import parse_leaf_list, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def one_sided(tmp_path):
    p = tmp_path / "p.json"
    g = tmp_path / "g.json"
    p.write_text(json.dumps({"0": ["1"]}))
    g.write_text(json.dumps(C.projection_code(1).to_json()))
    return str(p), str(g)


class TestLeafLists:
    def test_comma_and_json_agree(self):
        assert parse_leaf_list("00,1") == parse_leaf_list('["00", "1"]')

    @pytest.mark.parametrize("text, pos", [("0a", 1), ("0,,1", 2), ('["0", "2"]', 7)])
    def test_malformed_position(self, text, pos):
        code, out, err = call("tree", text)
        assert code == 2
        assert f"position {pos}" in err


class TestCommands:
    def test_decide_one_sided(self, one_sided):
        p, g = one_sided
        code, out, _ = call("decide", "--condition", p, "--code", g, "--formula", "v0(0)=1")
        assert code == 0 and out.strip() == "ForcedTrue"

    def test_decide_neither_exits_one(self, one_sided):
        _, g = one_sided
        code, out, _ = call("decide", "--code", g, "--formula", "v0(0)=1")
        assert code == 1 and out.startswith("Neither")

    def test_decide_parse_error(self, one_sided):
        _, g = one_sided
        code, _, err = call("decide", "--code", g, "--formula", "v0(0) = ")
        assert code == 2 and "position" in err

    def test_decide_equivalence(self, one_sided):
        p, g = one_sided
        code, _, _ = call("decide", "--condition", p, "--code", g, "--formula", "v0(0)=1", "--how", "equivalence")
        assert code == 0

    def test_word_split(self):
        code, out, _ = call("word", "split", "x a x")
        assert code == 0 and out.strip() == "split: (x | a x); rotated: a x^2; class: nice"

    def test_word_reduce(self):
        code, out, _ = call("word", "reduce", "a x x^-1 a^-1 x")
        assert code == 0 and out.strip().endswith("x")

    def test_extend_log(self):
        code, out, _ = call("extend", "domain", "--point", "2", "--injection", '{"0": 1}', "--words", "a x", "--mode", "log")
        assert code == 0
        assert out.splitlines()[0] == 'extend n=2 m=4 M=4 t={0->1,2->4} words=["a x"] bound=256 verdict=pass'

    def test_extend_range(self):
        code, out, _ = call("extend", "range", "--point", "0", "--words", "x^-1", "--mode", "json")
        assert code == 0
        assert json.loads(out)["t"] == {"1": 0}

    def test_eliminate_mcg_budget(self):
        code, out, err = call("eliminate", "mcg", "--rounds", "3", "--mode", "log")
        assert code == 3 and "budget exceeded" in err
        assert out.startswith("round n=0")

    def test_eliminate_ed(self):
        code, out, _ = call("eliminate", "ed", "--rounds", "2", "--mode", "log")
        assert code == 0 and "eliminate verdict=pass" in out

    def test_eliminate_constant_code(self):
        code, out, _ = call("eliminate", "ed", "--code", "fixture:constant")
        assert code == 1 and "premise failure" in out

    def test_type(self):
        fam = '{"type": "med", "members": [{"period": [0]}]}'
        assert call("type", "--family", fam, "--candidate", '{"period": [1]}')[0] == 0
        assert call("type", "--family", fam, "--candidate", '{"period": [0]}')[0] == 1

    def test_unknown_type(self):
        code, _, err = call("type", "--family", '{"type": "nosuch"}')
        assert code == 2 and "unknown family type" in err

    def test_suitable(self):
        code, out, _ = call("suitable", "--n", "1", "--mode", "json")
        assert code == 0 and json.loads(out)["passed"] is True

    def test_usage_error(self):
        assert call("nosuch")[0] == 2

    @pytest.mark.parametrize("argv", [
        ("eliminate", "ed", "--rounds", "2", "--mode", "json"),
        ("word", "audit", "--x", "pair-swap", "--mode", "log"),
        ("suitable", "--n", "2", "--mode", "log"),
    ])
    def test_byte_identical(self, argv):
        assert call(*argv) == call(*argv)


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "sacks_lab.cli", "word", "split", "x a x"], capture_output=True, text=True)
    assert proc.returncode == 0 and "class: nice" in proc.stdout
