"""Tests for ccshell.shelling – verification, search, monotonization and skeletons."""

from __future__ import annotations

import pytest

from ccshell.complex import complex_from_matrices, from_simplicial, maximal_elements, skeleton
from ccshell.errors import IndexOutOfRange, InvalidInput, MalformedCertificate, SearchBudgetExceeded
from ccshell.fixtures import load_fixture
from ccshell.shelling import (
    ShellingCertificate,
    ViolationKind,
    failures,
    is_monotone,
    monotonize,
    monotonize_steps,
    search_shelling,
    shelling_for_order,
    shelling_intersections,
    skeleton_shelling,
    verify_shelling,
)


def _make_loops():
    """A 2-cell whose boundary is two loops with zero boundary, plus a vertex."""
    return complex_from_matrices([[[0, 0]], [[1], [1]]])


def _make_path():
    return from_simplicial([[1, 2], [2, 3], [4]])


def _order(complex_, *labels):
    return tuple(complex_.find(label) for label in labels)


# ---------------------------------------------------------------------------
# verify_shelling
# ---------------------------------------------------------------------------


def test_searched_shelling_verifies():
    complex_ = load_fixture("two_triangles")
    cert = search_shelling(complex_)
    assert cert is not None
    assert verify_shelling(complex_, cert) is None


def test_disjoint_edges_have_empty_intersection():
    complex_ = from_simplicial([[1, 2], [3, 4]])
    cert = shelling_for_order(complex_, maximal_elements(complex_))
    violation = verify_shelling(complex_, cert)
    assert violation.kind is ViolationKind.EMPTY_INTERSECTION
    assert violation.position == 2
    assert search_shelling(complex_) is None


def test_lower_degree_first_is_wrong_order():
    complex_ = _make_path()
    cert = shelling_for_order(complex_, _order(complex_, "{4}", "{1,2}", "{2,3}"))
    violation = verify_shelling(complex_, cert)
    assert violation.kind is ViolationKind.WRONG_ORDER
    assert violation.position == 1


def test_unshellable_boundary_reported_as_missing_sub_shelling():
    complex_ = _make_loops()
    cert = shelling_for_order(complex_, maximal_elements(complex_))
    violation = verify_shelling(complex_, cert)
    assert violation.kind is ViolationKind.NO_PREFIX_SUB_SHELLING
    assert violation.position == 1
    assert search_shelling(complex_) is None


def test_not_a_permutation_is_malformed():
    complex_ = _make_path()
    cert = ShellingCertificate(_order(complex_, "{1,2}", "{2,3}"), {})
    with pytest.raises(MalformedCertificate):
        verify_shelling(complex_, cert)


def test_violation_description_names_kind():
    complex_ = from_simplicial([[1, 2], [3, 4]])
    violation = verify_shelling(complex_, shelling_for_order(complex_, maximal_elements(complex_)))
    assert violation.describe().startswith("EmptyIntersection at position 2")


def test_shelling_intersections():
    complex_ = load_fixture("two_triangles")
    order = maximal_elements(complex_)
    first, second = shelling_intersections(complex_, order)
    assert first == frozenset()
    assert {str(e) for e in second} == {"{1,3}", "{1}", "{3}"}


# ---------------------------------------------------------------------------
# search_shelling
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["tripod_edge", "twin_tripod_edges", "twisted_tripod_edges", "independent_edges", "regular_with_loop", "double_disc"])
def test_fixtures_are_shellable(name):
    complex_ = load_fixture(name)
    cert = search_shelling(complex_)
    assert cert is not None
    assert verify_shelling(complex_, cert) is None


def test_order_zero_complex_any_order_shells():
    complex_ = complex_from_matrices([], k0=3)
    cert = search_shelling(complex_)
    assert len(cert.gamma_order) == 3
    reversed_cert = ShellingCertificate(tuple(reversed(cert.gamma_order)), {})
    assert verify_shelling(complex_, reversed_cert) is None


def test_search_respects_budget():
    with pytest.raises(SearchBudgetExceeded):
        search_shelling(load_fixture("two_triangles"), budget=1)


# ---------------------------------------------------------------------------
# Monotonization
# ---------------------------------------------------------------------------


def test_failures_and_monotone():
    complex_ = _make_path()
    cert = shelling_for_order(complex_, _order(complex_, "{1,2}", "{4}", "{2,3}"))
    assert verify_shelling(complex_, cert) is None
    assert failures(cert) == [(2, 3)]
    assert not is_monotone(cert)


def test_monotonize_removes_one_failure_per_swap():
    complex_ = _make_path()
    cert = shelling_for_order(complex_, _order(complex_, "{1,2}", "{4}", "{2,3}"))
    steps = list(monotonize_steps(complex_, cert))
    assert len(steps) == 1
    assert [str(g) for g in steps[0].gamma_order] == ["{1,2}", "{2,3}", "{4}"]
    assert verify_shelling(complex_, steps[0]) is None
    assert is_monotone(monotonize(complex_, cert))


def test_monotonize_keeps_monotone_certificate():
    complex_ = load_fixture("two_triangles")
    cert = search_shelling(complex_)
    assert monotonize(complex_, cert) == cert


def test_monotonize_rejects_invalid_certificate():
    complex_ = from_simplicial([[1, 2], [3, 4]])
    with pytest.raises(InvalidInput):
        monotonize(complex_, shelling_for_order(complex_, maximal_elements(complex_)))


# ---------------------------------------------------------------------------
# Skeletons
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("i", [0, 1, 2])
def test_skeleton_shelling_verifies(i):
    complex_ = load_fixture("two_triangles")
    cert = search_shelling(complex_)
    lowered = skeleton_shelling(complex_, cert, i)
    assert verify_shelling(skeleton(complex_, i), lowered) is None


def test_skeleton_shelling_starts_with_first_boundary():
    complex_ = load_fixture("two_triangles")
    cert = search_shelling(complex_)
    lowered = skeleton_shelling(complex_, cert, 1)
    first = cert.sub_shellings[cert.gamma_order[0]]
    assert lowered.gamma_order[: len(first.gamma_order)] == first.gamma_order


def test_skeleton_shelling_needs_monotone_certificate():
    complex_ = _make_path()
    cert = shelling_for_order(complex_, _order(complex_, "{1,2}", "{4}", "{2,3}"))
    with pytest.raises(InvalidInput):
        skeleton_shelling(complex_, cert, 0)


def test_skeleton_shelling_degree_range():
    complex_ = load_fixture("two_triangles")
    with pytest.raises(IndexOutOfRange):
        skeleton_shelling(complex_, search_shelling(complex_), 3)
