import json

import jsonschema

from typer.testing import CliRunner

from polytrap import __version__
from polytrap.cli import app
from polytrap.reports import (
    CONTROL_SCHEMA,
    GRAPH_FILE_SCHEMA,
    GRAPH_SUMMARY_SCHEMA,
    REPORT_SCHEMA,
    SEARCH_SUMMARY_SCHEMA,
    VERDICT_SCHEMA,
)
from polytrap.search import SearchConfig

runner = CliRunner()


def test_verify_additive_trap_writes_report(tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(app, ["--reproducible", "verify", "additive_trap", "--primes", "2..199", "--json", str(out)])
    assert result.exit_code == 0, result.output
    data = json.loads(out.read_text())
    assert len(data["reports"]) == 46
    assert all(r["holds"] for r in data["reports"])
    assert data["manifest"]["reproducible"] is True
    assert data["manifest"]["started_at"] is None


def test_verify_multiplicative_trap_prints_note():
    result = runner.invoke(app, ["verify", "mt", "--primes", "7"])
    assert result.exit_code == 0, result.output
    assert "conditional claim: 2 not a generator; untrapped witness (1,3)" in result.output


def test_verify_rejects_non_prime():
    result = runner.invoke(app, ["verify", "power_trap", "--primes", "4"])
    assert result.exit_code == 2
    assert "4 is not prime" in result.output


def test_verify_all_with_ratio():
    result = runner.invoke(app, ["verify", "all", "--primes", "2,3,5"])
    assert result.exit_code == 0, result.output
    assert "18 verificacoes conferem" in result.output


def test_orbit_reaches_origin():
    result = runner.invoke(app, ["orbit", "additive_trap", "7", "2", "3"])
    assert result.exit_code == 0, result.output
    assert "(2,3) -> (5,2) -> (1,0) -> (0,0)" in result.output
    assert "reaches (0,0) in 3 steps" in result.output


def test_orbit_detects_cycle():
    result = runner.invoke(app, ["orbit", "multiplicative_trap", "7", "1", "3"])
    assert result.exit_code == 0, result.output
    assert "never reaches (0,0); cycle detected" in result.output


def test_orbit_budget_exceeded():
    result = runner.invoke(app, ["orbit", "additive_trap", "2", "1", "1", "--max-steps", "2"])
    assert result.exit_code == 3


def test_graph_edges_export():
    result = runner.invoke(app, ["graph", "additive_trap", "2", "--export", "edges"])
    assert result.exit_code == 0, result.output
    assert "0 -> 0\n1 -> 0\n2 -> 0\n3 -> 2\n" in result.output


def test_graph_summary_export(tmp_path):
    out = tmp_path / "summary.json"
    result = runner.invoke(app, ["graph", "multiplicative_trap", "7", "--export", "summary", "-o", str(out)])
    assert result.exit_code == 0, result.output
    summary = json.loads(out.read_text())["summary"]
    assert summary["size"] == 49
    assert summary["cycle_count"] > 1


def test_graph_over_budget_exits_3():
    result = runner.invoke(app, ["graph", "additive_trap", "5"], env={"POLYTRAP_MAX_GRAPH_POINTS": "10"})
    assert result.exit_code == 3


def test_ext_gf4_two_cycle():
    result = runner.invoke(app, ["ext", "additive_trap", "2", "2"])
    assert result.exit_code == 0, result.output
    assert "2-cycle:" in result.output
    assert "(t, 1)" in result.output
    assert "(t+1, 1)" in result.output


def test_ext_gf2_has_no_nonzero_periodic_points():
    result = runner.invoke(app, ["ext", "additive_trap", "2", "1"])
    assert result.exit_code == 0, result.output
    assert "no nonzero periodic points" in result.output


def test_search_streams_json_lines(tmp_path):
    config = tmp_path / "search.yaml"
    config.write_text("max_degree: 2\ncoefficient_range: [0, 1]\nmax_terms: 1\nprimes: [2, 3, 5]\n")
    result = runner.invoke(app, ["search", str(config)])
    assert result.exit_code == 0, result.output
    lines = [json.loads(line) for line in result.output.strip().splitlines()]
    assert lines[-1]["summary"]["candidates_tested"] == 49
    assert {"index", "map", "per_prime", "overall"} <= set(lines[0])
    assert ["x^2", "0"] in [line["map"] for line in lines[:-1]]


def test_search_rejects_bad_config(tmp_path):
    config = tmp_path / "search.yaml"
    config.write_text("fixed_point_a: [1, 0]\n")
    result = runner.invoke(app, ["search", str(config)])
    assert result.exit_code == 2


def test_generate_config_round_trips(tmp_path):
    out = tmp_path / "polytrap-search.yaml"
    result = runner.invoke(app, ["generate-config", "--output", str(out)])
    assert result.exit_code == 0, result.output
    assert SearchConfig.from_file(out) == SearchConfig()


def test_schema_and_version():
    result = runner.invoke(app, ["schema", "report"])
    assert result.exit_code == 0
    assert json.loads(result.output)["required"] == ["manifest", "reports"]
    assert runner.invoke(app, ["version"]).output.strip() == f"polytrap {__version__}"
    assert runner.invoke(app, ["--version"]).output.strip() == f"polytrap {__version__}"


def test_verify_accepts_jobs_and_seed_after_subcommand():
    result = runner.invoke(app, ["verify", "additive_trap", "--primes", "7", "--jobs", "2", "--seed", "3"])
    assert result.exit_code == 0, result.output


def test_verify_seed_after_subcommand_lands_in_manifest(tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(
        app, ["--seed", "1", "verify", "power_trap", "--primes", "5", "--seed", "9", "--json", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert json.loads(out.read_text())["manifest"]["seed"] == 9


def test_verify_jobs_from_env():
    result = runner.invoke(app, ["verify", "additive_trap", "--primes", "5,7"], env={"POLYTRAP_JOBS": "2"})
    assert result.exit_code == 0, result.output


def test_verify_rejects_negative_jobs():
    result = runner.invoke(app, ["verify", "additive_trap", "--primes", "7", "--jobs=-1"])
    assert result.exit_code == 2


def test_verify_report_matches_schema(tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(app, ["verify", "all", "--primes", "2..11", "--json", str(out)])
    assert result.exit_code == 0, result.output
    jsonschema.validate(json.loads(out.read_text()), REPORT_SCHEMA)


def test_graph_exports_match_schemas(tmp_path):
    out = tmp_path / "summary.json"
    result = runner.invoke(app, ["graph", "power_trap", "5", "--export", "summary", "-o", str(out)])
    assert result.exit_code == 0, result.output
    jsonschema.validate(json.loads(out.read_text()), GRAPH_FILE_SCHEMA)

    result = runner.invoke(app, ["graph", "power_trap", "5", "--export", "summary"])
    assert result.exit_code == 0, result.output
    jsonschema.validate(json.loads(result.output), GRAPH_SUMMARY_SCHEMA)


def test_search_stream_matches_schemas(tmp_path):
    config = tmp_path / "search.yaml"
    config.write_text("max_degree: 2\ncoefficient_range: [0, 1]\nmax_terms: 1\nprimes: [2, 3, 5]\n")
    result = runner.invoke(app, ["search", str(config), "--all", "--control"])
    assert result.exit_code == 0, result.output
    lines = [json.loads(line) for line in result.output.strip().splitlines()]
    controls = [line for line in lines if "control" in line]
    verdicts = [line for line in lines if "index" in line]
    assert controls and verdicts
    for line in controls:
        jsonschema.validate(line, CONTROL_SCHEMA)
    for line in verdicts:
        jsonschema.validate(line, VERDICT_SCHEMA)
    jsonschema.validate(lines[-1], SEARCH_SUMMARY_SCHEMA)


def test_schema_lists_stream_shapes():
    for name in ("graph-file", "control", "search-summary"):
        result = runner.invoke(app, ["schema", name])
        assert result.exit_code == 0, result.output
        json.loads(result.output)
    assert runner.invoke(app, ["schema", "nope"]).exit_code == 2


def test_reproducible_report_is_byte_identical(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for out in (first, second):
        result = runner.invoke(
            app, ["--reproducible", "verify", "all", "--primes", "2..13", "--json", str(out)]
        )
        assert result.exit_code == 0, result.output
    assert first.read_bytes() == second.read_bytes()


def test_ext_zero_degree_is_invalid_input():
    result = runner.invoke(app, ["ext", "additive_trap", "2", "0"])
    assert result.exit_code == 2


def test_orbit_rejects_zero_max_steps():
    result = runner.invoke(app, ["orbit", "additive_trap", "7", "2", "3", "--max-steps", "0"])
    assert result.exit_code == 2


def test_verify_stream_mode(tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(app, ["verify", "pt", "--primes", "17,19", "--stream", "--json", str(out)])
    assert result.exit_code == 0, result.output
    data = json.loads(out.read_text())
    jsonschema.validate(data, REPORT_SCHEMA)
    assert {r["mode"] for r in data["reports"]} == {"streamed"}
    assert data["manifest"]["arguments"]["mode"] == "streamed"


def test_verify_stream_rejects_other_maps_and_modes():
    assert runner.invoke(app, ["verify", "additive_trap", "--primes", "7", "--stream"]).exit_code == 2
    assert runner.invoke(app, ["verify", "all", "--primes", "7", "--stream"]).exit_code == 2
    assert runner.invoke(app, ["verify", "pt", "--primes", "7", "--stream", "--sampled"]).exit_code == 2
