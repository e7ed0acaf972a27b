import json
import subprocess
import sys

import pytest

from hypermatch.cli import main
from hypermatch.constructions import complete, space_barrier
from hypermatch.core import dumps, load
from hypermatch.family import HypergraphFamily, family_dumps, rainbow_from_json, validate_rainbow
from hypermatch.oracles import is_dominating


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_family(path, members):
    path.write_text(family_dumps(HypergraphFamily(tuple(members))))
    return path


class TestGen:
    def test_complete(self, capsys, tmp_path):
        out = tmp_path / "c.json"
        code, _, err = run(capsys, "gen", "complete", "--k", 3, "--n", 2, "--out", out)
        assert code == 0 and err == ""
        assert load(out).num_edges() == 8

    def test_divisibility_default(self, capsys, tmp_path):
        out, meta = tmp_path / "d.json", tmp_path / "d.meta.json"
        code, _, _ = run(capsys, "gen", "divisibility", "--k", 3, "--n", 4, "--out", out, "--meta", meta)
        H = load(out)
        assert code == 0 and H.num_edges() == 32
        A = json.loads(meta.read_text())["A_sets"]
        assert all(sum(1 for c, p in enumerate(e) if p in A[c]) % 2 == 0 for e in H.edges)

    def test_space(self, capsys):
        code, out, _ = run(capsys, "gen", "space", "--k", 3, "--n", 3, "--profile", "1,1,1")
        data = json.loads(out)
        assert code == 0
        assert {tuple(e) for e in data["edges"]} == set(space_barrier(3, 3, (1, 1, 1)).graph.edges)
        assert all(0 in e for e in data["edges"])

    def test_round_trip_is_byte_identical(self, capsys, tmp_path):
        out = tmp_path / "r.json"
        run(capsys, "gen", "random", "--k", 3, "--n", 4, "--profile", "1,0,1", "--density", "1/3",
            "--seed", 9, "--out", out)
        text = out.read_text()
        assert dumps(load(out)) == text

    def test_invalid_params(self, capsys):
        code, out, err = run(capsys, "gen", "divisibility", "--k", 3, "--n", 4, "--sizes", "2,2,2")
        assert code == 1 and out == "" and err

    def test_space_needs_profile(self, capsys):
        assert run(capsys, "gen", "space", "--k", 3, "--n", 3)[0] == 1


class TestSolve:
    def test_oracle_divisibility(self, capsys, tmp_path):
        p = tmp_path / "d.json"
        run(capsys, "gen", "divisibility", "--k", 3, "--n", 4, "--out", p)
        code, out, err = run(capsys, "solve", "--instance", p, "--algorithm", "oracle")
        assert code == 0 and json.loads(out)["nu"] == 3 and err == ""

    def test_fact15_space(self, capsys, tmp_path):
        p = tmp_path / "s.json"
        p.write_text(dumps(space_barrier(3, 4, (1, 1, 1)).graph))
        code, out, _ = run(capsys, "solve", "--instance", p, "--algorithm", "fact15")
        assert code == 0 and json.loads(out)["size"] == 3

    def test_thm17_complete(self, capsys, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(dumps(complete(3, 5)))
        code, out, _ = run(capsys, "solve", "--instance", p, "--algorithm", "thm17", "--profile", "5,0,0")
        report = json.loads(out)
        assert code == 0 and report["size"] == 5 and len(report["matching"]) == 5

    def test_forced_branch_is_reported(self, capsys, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(dumps(complete(3, 6)))
        code, out, _ = run(capsys, "solve", "--instance", p, "--algorithm", "thm17", "--profile", "2,2,2",
                           "--branch", "large_q")
        report = json.loads(out)
        assert code == 0 and report["branch"] == "large_q" and report["trace"][1]["forced"]

    def test_inconclusive_oracle(self, capsys, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(dumps(complete(3, 5)))
        code, out, _ = run(capsys, "solve", "--instance", p, "--budget-nodes", 2)
        assert code == 3 and json.loads(out)["status"] == "unknown"

    def test_malformed_instance(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        code, out, err = run(capsys, "solve", "--instance", p)
        assert code == 1 and out == "" and "error" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "solve", "--instance", tmp_path / "nope.json")[0] == 1

    def test_profile_above_codegrees(self, capsys, tmp_path):
        p = tmp_path / "s.json"
        p.write_text(dumps(space_barrier(3, 3, (1, 0, 0)).graph))
        code, _, err = run(capsys, "solve", "--instance", p, "--algorithm", "fact15", "--profile", "2,0,0")
        assert code == 1 and "hypothesis not met" in err

    def test_usage_error(self, capsys):
        assert run(capsys, "solve")[0] == 1


class TestRainbow:
    def test_oracle(self, capsys, tmp_path):
        p = write_family(tmp_path / "f.json", [complete(3, 3)] * 3)
        code, out, _ = run(capsys, "rainbow", "--family", p)
        assert code == 0 and json.loads(out)["size"] == 3

    def test_lemma22_dominated(self, capsys, tmp_path):
        H = space_barrier(3, 6, (1, 1, 1)).graph
        p = write_family(tmp_path / "f.json", [H] * 3)
        code, out, _ = run(capsys, "rainbow", "--family", p, "--algorithm", "lemma22", "--epsilon", "1/10")
        report = json.loads(out)
        assert code == 0 and report["outcome"] == "dominated"
        for D in report["dominating_sets"].values():
            assert is_dominating(H, [tuple(v) for v in D])

    def test_lemma21_contains_colours(self, capsys, tmp_path):
        F = HypergraphFamily(tuple(complete(3, 8) for _ in range(6)))
        p = write_family(tmp_path / "f.json", F.members)
        code, out, _ = run(capsys, "rainbow", "--family", p, "--algorithm", "lemma21", "--profile", "1,0,0",
                           "--m", 3, "--colours", "4,5")
        report = json.loads(out)
        M = rainbow_from_json(report["matching"])
        assert code == 0 and {4, 5} <= set(M) and validate_rainbow(F, M)[0]

    @pytest.mark.parametrize("algorithm", ["lemma25", "pokrovskiy"])
    def test_other_algorithms(self, capsys, tmp_path, algorithm):
        p = write_family(tmp_path / "f.json", [complete(3, 6)] * 2)
        code, out, _ = run(capsys, "rainbow", "--family", p, "--algorithm", algorithm, "--profile", "2,0,0")
        assert code == 0 and json.loads(out)["achieved"] == 2

    def test_lemma22_needs_epsilon(self, capsys, tmp_path):
        p = write_family(tmp_path / "f.json", [complete(3, 3)])
        assert run(capsys, "rainbow", "--family", p, "--algorithm", "lemma22")[0] == 1


class TestSweep:
    def test_exhaustive(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"grid": [{"generator": "exhaustive", "k": 3, "n": 2}]}))
        code, out, err = run(capsys, "sweep", "--spec", spec, "--out", tmp_path / "o", "--workers", 2)
        rows = [json.loads(x) for x in (tmp_path / "o" / "reports.jsonl").read_text().splitlines()]
        assert code == 0 and out == err == ""
        assert len(rows) == 256 and all(r["fact_1_5"] == "pass" for r in rows)

    def test_barrier_grid(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"grid": [{"generator": "divisibility", "k": 3, "n": [2, 4]}]}))
        assert run(capsys, "sweep", "--spec", spec, "--out", tmp_path / "o")[0] == 0
        lines = (tmp_path / "o" / "summary.csv").read_text().splitlines()
        assert lines[0] == "instance_id,n,k,Q,nu,bound,status"
        for line in lines[1:]:
            _, n, _, _, nu, _, _ = line.split(",")
            assert int(nu) == int(n) - 1

    def test_empty_grid(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text('{"grid": []}')
        assert run(capsys, "sweep", "--spec", spec, "--out", tmp_path / "o")[0] == 0
        assert (tmp_path / "o" / "reports.jsonl").read_text() == ""
        assert (tmp_path / "o" / "summary.csv").read_text() == "instance_id,n,k,Q,nu,bound,status\n"

    def test_bad_spec(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text("[]")
        assert run(capsys, "sweep", "--spec", spec, "--out", tmp_path / "o")[0] == 1


def test_version():
    out = subprocess.run([sys.executable, "-m", "hypermatch", "--version"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() == "hypermatch 0.1.0 (hypermatch-format/1)"
