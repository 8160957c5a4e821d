import json

import pytest

from starpir.cli import ConfigError, build_scheme_config, main
from starpir.pir import Variant

EX2_CONFIG = {
    "field": {"q": 2, "m": 3},
    "n": 8,
    "storage_k": 3,
    "retrieval_dim": 5,
    "multipliers": "ones",
    "variant": "subfield",
    "mu": 2,
    "seed": 7,
}

EX3_CONFIG = {
    "field": {"q": 3, "m": 2},
    "n": 9,
    "storage_k": 5,
    "retrieval_dim": 4,
    "variant": "subfield",
    "mu": 2,
    "seed": 11,
}


@pytest.fixture
def ex2_path(tmp_path):
    path = tmp_path / "ex2.json"
    path.write_text(json.dumps(EX2_CONFIG))
    return str(path)


@pytest.fixture
def ex3_path(tmp_path):
    path = tmp_path / "ex3.json"
    path.write_text(json.dumps(EX3_CONFIG))
    return str(path)


# -- config parsing -----------------------------------------------------------


def test_build_scheme_config_round_trip():
    cfg = build_scheme_config(EX2_CONFIG)
    assert cfg.variant is Variant.SUBFIELD_SUBCODE
    assert cfg.mu == 2 and cfg.rng_seed == 7
    assert cfg.storage.k == 3 and cfg.retrieval_base.k == 5
    assert cfg.storage.alpha == tuple(range(8))


def test_build_scheme_config_explicit_multipliers():
    doc = dict(EX2_CONFIG)
    doc["multipliers"] = {"storage": ["110"] * 8, "retrieval": ["100"] * 8}
    cfg = build_scheme_config(doc)
    assert cfg.storage.v == (3,) * 8
    assert cfg.retrieval_base.v == (1,) * 8


def test_build_scheme_config_field_errors():
    with pytest.raises(ConfigError, match="'n'"):
        build_scheme_config({"field": {"q": 2, "m": 3}, "storage_k": 1, "retrieval_dim": 2})
    with pytest.raises(ConfigError, match="'n' must be in"):
        build_scheme_config(dict(EX2_CONFIG, n=9))
    with pytest.raises(ConfigError, match="'field'"):
        build_scheme_config(dict(EX2_CONFIG, field={"q": 6, "m": 2}))
    with pytest.raises(ConfigError, match="multipliers"):
        build_scheme_config(dict(EX2_CONFIG, multipliers="zeros"))
    with pytest.raises(ConfigError, match="retrieval"):
        build_scheme_config(dict(EX2_CONFIG, retrieval_dim=12))
    with pytest.raises(ConfigError, match="'mu'"):
        build_scheme_config(dict(EX2_CONFIG, mu="many"))


def test_overrides_take_precedence():
    cfg = build_scheme_config(EX2_CONFIG, {"variant": "plain", "mu": 5, "seed": 1})
    assert cfg.variant is Variant.PLAIN and cfg.mu == 5 and cfg.rng_seed == 1


# -- demo ---------------------------------------------------------------------


@pytest.mark.parametrize("example", [1, 2, 3])
def test_demo_examples_reproduce(example, capsys):
    assert main(["demo", str(example)]) == 0
    out = capsys.readouterr().out
    assert "result: PASS" in out


def test_demo_2_k2_rate(capsys):
    assert main(["demo", "2", "--k", "2", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["bench"]["variants"]["plain"]["rate"] == "1/4"  # (4-2)/8
    assert doc["bench"]["variants"]["subfield"]["t_protect"] == 3
    assert doc["ok"] is True


def test_demo_3_k1_rate(capsys):
    assert main(["demo", "3", "--k", "1", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["bench"]["variants"]["subfield"]["rate"] == "5/9"
    assert doc["bench"]["variants"]["subfield"]["t_protect"] == 2


def test_demo_k_out_of_range(capsys):
    assert main(["demo", "2", "--k", "4"]) == 2
    assert "1..3" in capsys.readouterr().err


# -- verify -------------------------------------------------------------------


def test_verify_example2_config(ex2_path, capsys):
    assert main(["verify", "--config", ex2_path]) == 0
    out = capsys.readouterr().out
    assert "result: PASS" in out and "FAIL" not in out


def test_verify_json_mode(ex2_path, capsys):
    assert main(["verify", "--config", ex2_path, "--json", "--trials", "5"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["ok"] is True
    assert doc["checks"]["op-counts"]["ok"] is True


def test_verify_unusable_scheme(tmp_path, capsys):
    doc = dict(EX2_CONFIG, storage_k=4, retrieval_dim=5, variant="plain")
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert main(["verify", "--config", str(path)]) == 1
    assert "FAIL derive" in capsys.readouterr().out


def test_missing_config_file(capsys):
    assert main(["verify", "--config", "/nonexistent/x.json"]) == 2
    assert "cannot read config" in capsys.readouterr().err


# -- bench --------------------------------------------------------------------


def test_bench_example3_star_equal(ex3_path, capsys):
    assert main(["bench", "--config", ex3_path, "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["variants"]["plain"]["rate"] == "1/9"
    assert doc["variants"]["subfield"]["star_equal_plain"] is True


def test_bench_table_output(ex2_path, capsys):
    assert main(["bench", "--config", ex2_path]) == 0
    out = capsys.readouterr().out
    assert "variant" in out and "subfield" in out


# -- run ----------------------------------------------------------------------


def test_run_retrieves_exactly(ex2_path, capsys):
    assert main(["run", "--config", ex2_path, "--file-index", "2"]) == 0
    out = capsys.readouterr().out
    assert "exact: true" in out


def test_run_file_index_out_of_range(ex2_path, capsys):
    assert main(["run", "--config", ex2_path, "--file-index", "4", "--mu", "3"]) == 2
    assert "out of range 1..3" in capsys.readouterr().err


def test_run_trace_queries_hides_file_index(ex2_path, capsys):
    assert main(["run", "--config", ex2_path, "--file-index", "1",
                 "--trace-queries", "--json"]) == 0
    raw = capsys.readouterr().out
    doc = json.loads(raw)
    assert "file_index" not in raw
    for step in doc["iterations"]:
        assert set(step["queries"]) == {"iteration", "queries"}
        assert len(step["queries"]["queries"]) == 8  # one query per server
    assert doc["exact"] is True


def test_run_deterministic_output(ex3_path, capsys):
    assert main(["run", "--config", ex3_path, "--file-index", "1", "--json"]) == 0
    first = capsys.readouterr().out
    assert main(["run", "--config", ex3_path, "--file-index", "1", "--json"]) == 0
    second = capsys.readouterr().out
    assert first == second


def test_demo_deterministic_output(capsys):
    assert main(["demo", "2", "--seed", "5"]) == 0
    first = capsys.readouterr().out
    assert main(["demo", "2", "--seed", "5"]) == 0
    assert first == capsys.readouterr().out
