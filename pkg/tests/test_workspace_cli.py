import json
from pathlib import Path

import pytest

from relsite.cli import EXIT_DISCREPANCY, EXIT_FAIL, EXIT_INPUT, EXIT_OK, enumerate_instances, main
from relsite.corpus import Bounds
from relsite.workspace import (
    ParseError,
    Report,
    UnknownMode,
    UnknownProblem,
    UnresolvedReference,
    ValidationError,
    dumps,
    load_workspace,
    loads_workspace,
    parse_workspace,
    run_check,
    serialize,
)

DEMO = Path(__file__).resolve().parent.parent / "demos" / "workspaces"
FIXTURES = DEMO / "fixtures.json"


@pytest.fixture
def raw():
    return json.loads(FIXTURES.read_text())


@pytest.fixture
def ws():
    return load_workspace(FIXTURES)


def write(tmp_path, data):
    path = tmp_path / "ws.json"
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(path)


class TestLoading:
    def test_loads(self, ws):
        assert set(ws.problems) == {"identity", "NEG", "POS"}
        assert ws.topologies["J1"].is_covering("b", frozenset({"f"}))

    def test_parse_error(self):
        with pytest.raises(ParseError):
            loads_workspace("{not json")

    def test_unknown_arrow_in_composition(self, raw):
        raw["categories"]["C2"]["compose"] = [["f", "g", "f"]]
        with pytest.raises(UnresolvedReference):
            parse_workspace(raw)

    def test_missing_maximal_sieve(self, raw):
        raw["topologies"]["J_triv"]["covers"]["b"] = [["f"]]
        with pytest.raises(ValidationError, match="maximal"):
            parse_workspace(raw)

    def test_unknown_functor(self, raw):
        raw["problems"]["NEG"]["A"] = "nope"
        with pytest.raises(UnresolvedReference):
            parse_workspace(raw)

    def test_invalid_phi(self, raw):
        raw["nat_transforms"]["neg_phi"]["components"] = {"*": "f"}
        with pytest.raises(ValidationError):
            parse_workspace(raw)

    def test_roundtrip(self, ws):
        text = dumps(ws)
        again = loads_workspace(text)
        assert dumps(again) == text
        assert serialize(again) == serialize(ws)

    def test_indexed_expansion(self):
        ws = load_workspace(DEMO / "fibration.json")
        assert {"D4", "p_D4", "J_D4"} <= set(ws.categories) | set(ws.functors) | set(ws.topologies)
        text = dumps(ws)
        assert dumps(loads_workspace(text)) == text


class TestRunCheck:
    def test_identity(self, ws):
        r = run_check(ws, "identity")
        assert r.passed and r.aggregate and not r.discrepancy
        assert set(r.verdicts) == {"cofinality", "filtered", "fiberwise", "diagonal", "oracle"}

    def test_neg(self, ws):
        r = run_check(ws, "NEG")
        assert not any(v["ok"] for v in r.verdicts.values())
        assert r.verdicts["filtered"]["parts"]["a"]["witness"] == {"c": "a", "object": "a", "chi": "id:a"}

    def test_single_mode(self, ws):
        r = run_check(ws, "NEG", "oracle")
        assert list(r.verdicts) == ["oracle"] and not r.passed

    def test_errors(self, ws):
        with pytest.raises(UnknownProblem):
            run_check(ws, "missing")
        with pytest.raises(UnknownMode):
            run_check(ws, "NEG", "bogus")

    def test_report_roundtrip_and_purity(self, ws):
        a, b = run_check(ws, "NEG"), run_check(ws, "NEG")
        assert a.to_json() == b.to_json()
        assert Report.from_json(a.to_json()).to_json() == a.to_json()
        assert run_check(ws, "NEG", timings=True).timings["seconds"] >= 0


class TestCli:
    def test_validate(self, capsys):
        assert main(["validate", str(FIXTURES)]) == EXIT_OK
        assert capsys.readouterr().out.startswith("ok ")

    def test_validate_bad(self, tmp_path, raw):
        raw["topologies"]["J_triv"]["covers"]["b"] = [["f"]]
        assert main(["validate", write(tmp_path, raw)]) == EXIT_INPUT
        assert main(["validate", write(tmp_path, "[")]) == EXIT_INPUT

    @pytest.mark.parametrize("problem,code", [("identity", EXIT_OK), ("NEG", EXIT_FAIL), ("POS", EXIT_OK)])
    def test_check_codes(self, problem, code, capsys):
        assert main(["check", str(FIXTURES), "--problem", problem, "--format", "json"]) == code
        report = json.loads(capsys.readouterr().out)
        assert report["problem"] == problem

    def test_check_unknown_problem(self):
        assert main(["check", str(FIXTURES), "--problem", "nope"]) == EXIT_INPUT

    def test_bad_arguments(self):
        assert main(["check", str(FIXTURES)]) == EXIT_INPUT

    def test_discrepancy_exit(self, monkeypatch):
        import relsite.relative as rel
        from relsite.verdict import Verdict

        monkeypatch.setattr(rel, "check_fiberwise", lambda prob: Verdict(True))
        assert main(["check", str(FIXTURES), "--problem", "NEG"]) == EXIT_DISCREPANCY

    def test_corpus(self, tmp_path):
        out = tmp_path / "c.json"
        args = ["corpus", "--count", "5", "--exhaustive-limit", "30", "--assert-equivalences", "--output", str(out)]
        assert main(args) == EXIT_OK
        report = json.loads(out.read_text())
        assert report["instances"] == 35 and report["discrepancy_events"] == []


def test_enumerate_instances_deterministic():
    b = Bounds(random_count=10)
    first = [dumps(w) for w in enumerate_instances(b, seed=4, exhaustive_limit=20)]
    second = [dumps(w) for w in enumerate_instances(b, seed=4, exhaustive_limit=20)]
    assert first == second and len(first) == 30
