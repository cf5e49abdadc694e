"""Tests for ccshell.__main__ – commands, output formats and exit codes."""

from __future__ import annotations

import json

import pytest

from ccshell import config as cfg
from ccshell.__main__ import main, run_command
from ccshell.documents import load_document


# ---------------------------------------------------------------------------
# Exit codes
# ---------------------------------------------------------------------------


def test_homology_of_fixture():
    result = run_command(["homology", "regular_with_loop"])
    assert result.exit_code == cfg.EXIT_HOLDS
    assert "H_1 = Z" in result.text.splitlines()


def test_regular_verify_natural_order_fails():
    result = run_command(["regular", "verify", "swap_regular", "--order", "natural"])
    assert result.exit_code == cfg.EXIT_FAILS
    assert result.report["violation"].startswith("condition-1 at e2_2")


def test_regular_verify_swapped_order_holds():
    result = run_command(["regular", "verify", "swap_regular", "--order", "e2_2,e2_1"])
    assert result.exit_code == cfg.EXIT_HOLDS
    assert result.report["certificate"]["kind"] == "regular"


def test_cone_search_on_square_fails():
    assert run_command(["cone", "search", "square"]).exit_code == cfg.EXIT_FAILS


@pytest.mark.parametrize("apex, code", [("1", cfg.EXIT_HOLDS), ("2", cfg.EXIT_FAILS)])
def test_cone_verify_with_apex(apex, code):
    assert run_command(["cone", "verify", "two_triangles", "--apex", apex]).exit_code == code


def test_totally_regular_reports_offending_subcomplex():
    result = run_command(["totally-regular", "swap_regular"])
    assert result.exit_code == cfg.EXIT_FAILS
    assert result.report["violation"] == "C_e2_1 is not acyclic"


def test_totally_regular_predicts_homology():
    result = run_command(["totally-regular", "double_disc"])
    assert result.exit_code == cfg.EXIT_HOLDS
    assert result.report["expected_homology"] == ["Z", "0", "Z"]


def test_shelling_verify_natural_order():
    assert run_command(["shelling", "verify", "two_triangles", "--order", "natural"]).exit_code == cfg.EXIT_HOLDS


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


def test_unknown_complex_is_an_error():
    result = run_command(["validate", "no_such_fixture"])
    assert result.exit_code == cfg.EXIT_ERROR
    assert result.report["error"] == "DanglingReference"


def test_exhausted_budget_is_an_error():
    result = run_command(["shelling", "search", "two_triangles", "--budget", "1"])
    assert result.exit_code == cfg.EXIT_ERROR
    assert result.report["status"] == "budget-exceeded"


def test_non_positive_budget_is_an_error():
    assert run_command(["homology", "two_triangles", "--budget", "0"]).exit_code == cfg.EXIT_ERROR


def test_reduced_homology_without_augmentation():
    result = run_command(["homology", "loop_to_vertex", "--reduced"])
    assert result.exit_code == cfg.EXIT_ERROR
    assert result.report["error"] == "HomologyError"


def test_verify_needs_a_certificate_or_order():
    assert run_command(["regular", "verify", "swap_regular"]).exit_code == cfg.EXIT_ERROR


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv(cfg.BUDGET_ENV_VAR, "1")
    result = run_command(["regular", "search", "regular_strip"])
    assert result.report["status"] == "budget-exceeded"


# ---------------------------------------------------------------------------
# Documents and certificates on disk
# ---------------------------------------------------------------------------


def test_from_simplicial_then_validate(tmp_path):
    out = tmp_path / "two.ccx"
    built = run_command(["from-simplicial", "1,2,3;3,4", "--name", "two", "--output", str(out)])
    assert built.exit_code == cfg.EXIT_HOLDS
    result = run_command(["validate", str(out), "--format", "json"])
    assert result.exit_code == cfg.EXIT_HOLDS
    assert result.report["name"] == "two"
    assert result.report["rank_profile"] == [4, 4, 1]


def test_skeleton_with_certificate(tmp_path):
    cert = tmp_path / "shelling.json"
    found = run_command(["shelling", "search", "two_triangles"])
    cert.write_text(json.dumps(found.report["certificate"]), encoding="utf-8")
    result = run_command(["skeleton", "two_triangles", "--degree", "1", "--certificate", str(cert)])
    assert result.exit_code == cfg.EXIT_HOLDS
    assert result.report["rank_profile"] == [4, 5]
    assert result.report["certificate"]["kind"] == "shelling"


def test_wrong_certificate_kind_rejected(tmp_path):
    cert = tmp_path / "shelling.json"
    found = run_command(["shelling", "search", "double_disc"])
    cert.write_text(json.dumps(found.report["certificate"]), encoding="utf-8")
    result = run_command(["regular", "verify", "double_disc", "--certificate", str(cert)])
    assert result.exit_code == cfg.EXIT_ERROR


def test_analyse_report_can_be_rechecked(tmp_path):
    analysed = run_command(["analyse", "double_disc", "--format", "json"])
    assert analysed.exit_code == cfg.EXIT_HOLDS
    report = tmp_path / "report.json"
    report.write_text(json.dumps(analysed.report), encoding="utf-8")
    result = run_command(["check-certificate", "double_disc", str(report)])
    assert result.exit_code == cfg.EXIT_HOLDS
    assert {row["property"] for row in result.report["checks"]} == {"shelling", "regular", "totally_regular"}


def test_analyse_plot_is_requested(mocker, tmp_path):
    plot = mocker.patch("ccshell.__main__.plot_homology")
    out = tmp_path / "h.png"
    result = run_command(["analyse", "triangle", "--plot", str(out)])
    assert result.exit_code == cfg.EXIT_HOLDS
    plot.assert_called_once()
    assert plot.call_args.args[3] == str(out)


# ---------------------------------------------------------------------------
# main
# ---------------------------------------------------------------------------


def test_main_prints_json(capsys):
    code = main(["homology", "independent_edges", "--format", "json", "--quiet"])
    assert code == cfg.EXIT_HOLDS
    data = json.loads(capsys.readouterr().out)
    assert [g["group"] for g in data["homology"]] == ["Z/3", "0"]


def test_main_prints_text(capsys):
    assert main(["validate", "triangle", "--quiet"]) == cfg.EXIT_HOLDS
    assert "valid complex over Z" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# Fixture aliases
# ---------------------------------------------------------------------------


def test_homology_by_alias():
    result = run_command(["homology", "ex_6_1_4.ccx"])
    assert result.exit_code == cfg.EXIT_HOLDS
    assert "H_1 = Z" in result.text.splitlines()


def test_regular_verify_by_alias():
    result = run_command(["regular", "verify", "ex_6_1_2.ccx", "--order", "natural"])
    assert result.exit_code == cfg.EXIT_FAILS
    assert result.report["violation"].startswith("condition-1 at e2_2")


def test_cone_search_by_alias():
    result = run_command(["cone", "search", "ex_4_5.ccx"])
    assert result.exit_code == cfg.EXIT_FAILS
    assert "no cone assignment exists" in result.text


def test_validate_by_alias():
    result = run_command(["validate", "ex_4_3.ccx"])
    assert result.exit_code == cfg.EXIT_HOLDS
    assert result.report["name"] == "pinched_disc"


# ---------------------------------------------------------------------------
# Common flags and written documents
# ---------------------------------------------------------------------------


def test_seed_does_not_change_homology():
    plain = run_command(["homology", "double_disc", "--format", "json"])
    seeded = run_command(["homology", "double_disc", "--format", "json", "--seed", "5"])
    assert seeded.report == plain.report


def test_skeleton_document_keeps_only_provenance(tmp_path):
    out = tmp_path / "sk.ccx"
    result = run_command(["skeleton", "two_triangles", "--degree", "1", "--output", str(out)])
    assert result.exit_code == cfg.EXIT_HOLDS
    metadata = load_document(out).metadata
    assert metadata == {"name": "two_triangles_sk1", "skeleton_of": "two_triangles", "degree": 1}
