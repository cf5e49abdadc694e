"""Tests for ccshell.regularity – regular and totally regular orders."""

from __future__ import annotations

import dataclasses

import pytest

from ccshell.classification import Witness
from ccshell.complex import complex_from_matrices, from_simplicial, maximal_elements, skeleton
from ccshell.errors import IndexOutOfRange, InvalidCertificate, MalformedCertificate, SearchBudgetExceeded
from ccshell.fixtures import load_fixture
from ccshell.homology import FGModule, homology
from ccshell.regularity import (
    complete_regular_order,
    expected_totally_regular_homology,
    find_witness,
    first_non_acyclic_subcomplex,
    is_totally_regular,
    search_regular,
    skeleton_regular,
    verify_regular,
    witness_holds,
)
from ccshell.oracle import GeneratorConfig, GeneratorSource, generate
from ccshell.shelling import search_shelling, shelling_for_order


def _labels(elements):
    return [str(e) for e in elements]


# ---------------------------------------------------------------------------
# Witnesses
# ---------------------------------------------------------------------------


def test_zero_boundary_has_trivial_witness():
    complex_ = complex_from_matrices([], k0=2)
    v1, v2 = complex_.basis(0)
    assert find_witness(complex_, [v1], v2) == Witness(1, (0,))


def test_witness_needs_a_prefix():
    complex_ = load_fixture("double_disc")
    e1, e2 = complex_.basis(2)
    assert find_witness(complex_, [], e1) is None
    witness = find_witness(complex_, [e1], e2)
    assert witness == Witness(1, (1,))
    assert witness_holds(complex_, [e1], e2, witness)
    assert not witness_holds(complex_, [e1], e2, Witness(0, (0,)))


def test_independent_boundaries_have_no_witness():
    complex_ = load_fixture("independent_edges")
    e1, e2 = complex_.basis(1)
    assert find_witness(complex_, [e1], e2) is None


# ---------------------------------------------------------------------------
# Completing a given shelling
# ---------------------------------------------------------------------------


def test_natural_order_breaks_condition_one():
    complex_ = load_fixture("swap_regular")
    outcome = complete_regular_order(complex_, shelling_for_order(complex_, maximal_elements(complex_)))
    assert outcome.condition == "condition-1"
    assert str(outcome.element) == "e2_2"


def test_swapped_order_is_regular():
    complex_ = load_fixture("swap_regular")
    order = (complex_.find("e2_2"), complex_.find("e2_1"))
    cert = complete_regular_order(complex_, shelling_for_order(complex_, order))
    assert verify_regular(complex_, cert) is None
    assert _labels(cert.gamma_order) == ["e2_2", "e2_1"]


def test_non_monotone_shelling_rejected():
    complex_ = from_simplicial([[1, 2], [2, 3], [4]])
    order = tuple(complex_.find(label) for label in ("{1,2}", "{4}", "{2,3}"))
    outcome = complete_regular_order(complex_, shelling_for_order(complex_, order))
    assert outcome.condition == "monotone"


def test_invalid_shelling_rejected():
    complex_ = from_simplicial([[1, 2], [3, 4]])
    outcome = complete_regular_order(complex_, shelling_for_order(complex_, maximal_elements(complex_)))
    assert outcome.condition == "shelling"
    assert outcome.describe().startswith("shelling: EmptyIntersection")


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


def test_search_finds_the_only_regular_order():
    complex_ = load_fixture("swap_regular")
    cert = search_regular(complex_)
    assert cert is not None
    assert _labels(cert.gamma_order) == ["e2_2", "e2_1"]


@pytest.mark.parametrize("name", ["two_triangles", "regular_with_loop", "half_open_edge", "regular_strip", "regular_disc", "double_disc"])
def test_regular_fixtures(name):
    complex_ = load_fixture(name)
    cert = search_regular(complex_)
    assert cert is not None
    assert verify_regular(complex_, cert) is None


@pytest.mark.parametrize("name", ["independent_edges", "lopsided_edges"])
def test_shellable_but_not_regular(name):
    complex_ = load_fixture(name)
    assert search_shelling(complex_) is not None
    assert search_regular(complex_) is None


def test_search_respects_budget():
    with pytest.raises(SearchBudgetExceeded):
        search_regular(load_fixture("regular_strip"), budget=1)


# ---------------------------------------------------------------------------
# Verification of tampered certificates
# ---------------------------------------------------------------------------


def test_missing_witness_is_reported():
    complex_ = load_fixture("double_disc")
    cert = search_regular(complex_)
    stripped = dataclasses.replace(cert, witnesses={})
    violation = verify_regular(complex_, stripped)
    assert violation.condition == "condition-1"
    assert violation.element.degree == 2


def test_wrong_degree_ordering_is_reported():
    complex_ = load_fixture("double_disc")
    cert = search_regular(complex_)
    orderings = dict(cert.degree_orderings)
    orderings[0] = tuple(reversed(orderings[0]))
    violation = verify_regular(complex_, dataclasses.replace(cert, degree_orderings=orderings))
    assert violation.condition == "ordering"


def test_missing_degree_ordering_is_malformed():
    complex_ = load_fixture("double_disc")
    cert = search_regular(complex_)
    orderings = {nu: order for nu, order in cert.degree_orderings.items() if nu != 0}
    with pytest.raises(MalformedCertificate):
        verify_regular(complex_, dataclasses.replace(cert, degree_orderings=orderings))


# ---------------------------------------------------------------------------
# Totally regular complexes
# ---------------------------------------------------------------------------


def test_totally_regular_with_homology():
    complex_ = load_fixture("double_disc")
    cert = search_regular(complex_)
    assert is_totally_regular(complex_, cert)
    expected = expected_totally_regular_homology(complex_, cert)
    assert expected == [FGModule(1), FGModule(0), FGModule(1)]
    assert expected == homology(complex_)


def test_acyclic_totally_regular_strip():
    complex_ = load_fixture("regular_strip")
    cert = search_regular(complex_)
    assert is_totally_regular(complex_, cert)
    assert expected_totally_regular_homology(complex_, cert) == homology(complex_)


def test_regular_but_not_totally_regular():
    complex_ = load_fixture("swap_regular")
    cert = search_regular(complex_)
    assert not is_totally_regular(complex_, cert)
    assert str(first_non_acyclic_subcomplex(complex_)) == "e2_1"


def test_totally_regular_needs_valid_certificate():
    complex_ = load_fixture("double_disc")
    cert = search_regular(complex_)
    with pytest.raises(InvalidCertificate):
        is_totally_regular(complex_, dataclasses.replace(cert, witnesses={}))


def test_totally_regular_homology_on_generated_complexes():
    sources = [GeneratorSource.RANDOM_SIMPLICIAL, GeneratorSource.SHIFTED_COMPLEX]
    checked = 0
    for seed in range(50):
        config = GeneratorConfig(seed=seed, source=sources[seed % 2], max_cells=3, max_vertices=4)
        complex_ = generate(config)
        try:
            cert = search_regular(complex_, budget=20_000)
        except SearchBudgetExceeded:
            continue
        if cert is None or not is_totally_regular(complex_, cert):
            continue
        assert expected_totally_regular_homology(complex_, cert) == homology(complex_), seed
        checked += 1
    assert checked > 0


# ---------------------------------------------------------------------------
# Skeletons
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("i", [0, 1])
def test_skeleton_regular(i):
    complex_ = load_fixture("regular_strip")
    cert = search_regular(complex_)
    lowered = skeleton_regular(complex_, cert, i)
    assert verify_regular(skeleton(complex_, i), lowered) is None


def test_skeleton_regular_top_degree_is_identity():
    complex_ = load_fixture("regular_strip")
    cert = search_regular(complex_)
    assert skeleton_regular(complex_, cert, 2) is cert
    with pytest.raises(IndexOutOfRange):
        skeleton_regular(complex_, cert, 3)
