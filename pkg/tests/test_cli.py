import json

import pytest
from click.testing import CliRunner

from twistzhu import cli
from twistzhu.formal import TruncationError
from twistzhu.zhu import CheckResult

RANK_ONE = {
    "backend": {"name": "heisenberg", "form": [[1]], "names": ["h"]},
    "zero_modes": {"kind": "matrix", "dim": 2, "matrices": {"0": [["1/2", 1], [0, "1/2"]]}},
    "bounds": {"ambient": 4, "stability": [4, 5, 6], "sweep_weight": 1, "state_degree": 1,
               "l_bound": 1, "mode_bound": 1, "bracket_weight": 3, "u1_weight": 1, "product_weight": 1},
}

D3 = {
    "backend": {"name": "heisenberg", "form": [[0, 1, 0], [1, 0, 0], [0, 0, 1]], "names": ["u", "v", "w"]},
    "automorphism": {"nilpotent": [[0, 0, 0], [0, 0, -1], [1, 0, 0]]},
    "zero_modes": {"kind": "weyl", "pairs": [[2, 1]], "central": {"0": [[0, 1], [0, 0]]}, "dim": 2, "max_degree": 1},
    "bounds": {"sweep_weight": 1, "state_degree": 1, "l_bound": 1, "mode_bound": 1,
               "lemma_weight": 1, "lemma_state_degree": 0},
}


def write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(p)


def invoke(*args):
    return CliRunner().invoke(cli.main, list(args))


def test_backend_suite_passes(tmp_path):
    res = invoke("check", "backend", "--config", write(tmp_path, RANK_ONE))
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert report["status"] == "pass"
    assert {r["identity"] for r in report["results"]} == {"virasoro-bracket", "commutator"}


def test_lemma_and_jacobi_suites_on_d3(tmp_path):
    cfg = write(tmp_path, D3)
    for suite in ("lemmas", "jacobi"):
        res = invoke("check", suite, "--config", cfg)
        assert res.exit_code == 0, res.output
        assert all(r["checked"] > 0 for r in json.loads(res.output)["results"])


def test_parallel_sweep_matches_serial(tmp_path):
    cfg = write(tmp_path, D3)
    one = invoke("check", "jacobi", "--config", cfg, "--jobs", "1")
    two = invoke("check", "jacobi", "--config", cfg, "--jobs", "2")
    assert one.exit_code == two.exit_code == 0
    assert one.output == two.output


def test_table_is_byte_identical_across_runs(tmp_path):
    cfg = write(tmp_path, RANK_ONE)
    out = tmp_path / "table.json"
    a = invoke("table", "--config", cfg, "--report", str(out))
    b = invoke("table", "--config", cfg)
    assert a.exit_code == b.exit_code == 0
    assert a.output == b.output == out.read_text()
    tables = json.loads(a.output)["tables"]
    assert set(tables) == {"tilde", "plain"}
    assert tables["plain"]["identity_ok"] and tables["plain"]["basis"][0] == "1"


def test_table_for_virasoro(tmp_path):
    cfg = write(tmp_path, {"backend": {"name": "virasoro", "c": "1/2"}})
    res = invoke("table", "--config", cfg, "--cutoff", "4")
    assert res.exit_code == 0, res.output
    assert json.loads(res.output)["tables"]["tilde"]["identity_ok"]


def test_iso_and_laws_suites(tmp_path):
    cfg = write(tmp_path, RANK_ONE)
    for suite in ("iso", "laws"):
        res = invoke("check", suite, "--config", cfg)
        assert res.exit_code == 0, res.output
        assert "note" in json.loads(res.output)


@pytest.mark.parametrize("data", [RANK_ONE, D3, {"backend": {"name": "virasoro", "c": 1}, "lowest_weight": {"l0": [[0]]}}])
def test_induce_recovers_the_seed(tmp_path, data):
    res = invoke("induce", "--config", write(tmp_path, data), "--cutoff", "3")
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert report["omega_recovered"] and report["omega_dimensions"]["0"] == report["seed_dimension"]


def test_induce_with_empty_seed_gives_zero_module(tmp_path):
    data = dict(RANK_ONE, zero_modes={"kind": "matrix", "dim": 0, "matrices": {}})
    res = invoke("induce", "--config", write(tmp_path, data))
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert report["seed_dimension"] == 0 and report["dimensions"] == {}


@pytest.mark.parametrize(
    "data, message",
    [
        ("{not json", "invalid JSON"),
        ({"backend": {"name": "heisenberg", "form": []}}, "zero vertex algebra"),
        ({"backend": {"name": "lattice"}}, "unknown backend"),
        ({"backend": {"name": "virasoro", "c": "x+1"}}, "backend.c"),
        (dict(RANK_ONE, bounds={"nonsense": 1}), "unknown key"),
        (dict(D3, zero_modes={"kind": "matrix", "dim": 2, "matrices": {}}), "zero_modes"),
    ],
)
def test_config_errors_exit_2(tmp_path, data, message):
    res = invoke("table", "--config", write(tmp_path, data))
    assert res.exit_code == 2
    assert message in res.output


def test_missing_config_exits_2():
    assert invoke("check", "backend").exit_code == 2


def test_truncation_errors_exit_3(tmp_path, monkeypatch):
    def boom(s, cutoff):
        raise TruncationError("window too small")

    monkeypatch.setattr(cli, "table_report", boom)
    res = invoke("table", "--config", write(tmp_path, RANK_ONE))
    assert res.exit_code == 3 and "window too small" in res.output


def test_failure_exits_1_with_first_counterexample(tmp_path, monkeypatch):
    def broken(voa, max_weight, mode_bound=4):
        r = CheckResult("virasoro-bracket", checked=5)
        r.fail(m=1, n=-1)
        r.fail(m=2, n=-2)
        return r

    monkeypatch.setattr(cli, "virasoro_bracket_check", broken)
    res = invoke("check", "backend", "--config", write(tmp_path, RANK_ONE))
    assert res.exit_code == 1
    report = json.loads(res.output)
    assert report["status"] == "fail"
    assert report["results"][0]["counterexample"] == {"m": 1, "n": -1}
