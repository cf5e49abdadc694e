"""Tests for ccshell.reports – whole-complex analysis and re-verification."""

from __future__ import annotations

import json

import pytest

from ccshell.fixtures import load_fixture
from ccshell.homology import FGModule
from ccshell.reports import BUDGET_EXCEEDED, FAILS, HOLDS, PROPERTIES, analyse, recheck


@pytest.fixture(scope="module")
def totally_regular_report():
    return analyse(load_fixture("double_disc"), name="double_disc")


def test_report_summary(totally_regular_report):
    report = totally_regular_report
    assert report.order == 2
    assert report.rank_profile == (2, 2, 2)
    assert report.pure
    assert [str(g) for g in report.gamma] == ["e2_1", "e2_2"]
    assert report.homology == (FGModule(1), FGModule(0), FGModule(1))
    assert not report.acyclic


def test_report_statuses(totally_regular_report):
    report = totally_regular_report
    assert report.shelling.status == HOLDS
    assert report.regular.status == HOLDS
    assert report.totally_regular.status == HOLDS
    assert report.cone.status == FAILS
    assert report.expected_homology == report.homology


def test_unknown_property(totally_regular_report):
    with pytest.raises(KeyError):
        totally_regular_report.status("contractible")


def test_tables(totally_regular_report):
    homology = totally_regular_report.homology_table()
    assert list(homology["group"]) == ["Z", "0", "Z"]
    classes = totally_regular_report.classification_table()
    assert list(classes["element"]) == ["e2_1", "e2_2"]
    assert list(classes["class"]) == ["noncritical", "critical"]
    assert list(classes["by_convention"]) == [True, False]


def test_text_report(totally_regular_report):
    text = totally_regular_report.format_text()
    assert "H_2 = Z" in text
    assert "acyclic: no" in text
    assert "totally regular" in text


def test_json_report_rechecks(totally_regular_report):
    data = json.loads(json.dumps(totally_regular_report.to_dict()))
    assert data["name"] == "double_disc"
    assert data["expected_homology"] == ["Z", "0", "Z"]
    rows = recheck(load_fixture("double_disc"), data)
    assert {r["property"] for r in rows} == {"shelling", "regular", "totally_regular"}
    assert all(r["verified"] for r in rows)


def test_recheck_flags_broken_certificate(totally_regular_report):
    data = json.loads(json.dumps(totally_regular_report.to_dict()))
    data["shelling"]["certificate"]["order"] = data["shelling"]["certificate"]["order"][:1]
    rows = {r["property"]: r for r in recheck(load_fixture("double_disc"), data)}
    assert not rows["shelling"]["verified"]
    assert rows["regular"]["verified"]


def test_recheck_on_other_complex_fails(totally_regular_report):
    data = json.loads(json.dumps(totally_regular_report.to_dict()))
    rows = recheck(load_fixture("two_triangles"), data)
    assert not any(r["verified"] for r in rows)


def test_irregular_complex_has_no_prediction():
    report = analyse(load_fixture("independent_edges"))
    assert report.regular.status == FAILS
    assert report.totally_regular.status == FAILS
    assert report.expected_homology is None


def test_budget_is_never_a_failure():
    report = analyse(load_fixture("regular_strip"), budget=1)
    assert {report.status(prop).status for prop in PROPERTIES} == {BUDGET_EXCEEDED}
    assert report.to_dict()["cone"]["status"] == BUDGET_EXCEEDED
