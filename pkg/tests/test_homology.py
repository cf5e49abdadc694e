"""Tests for ccshell.homology – homology groups, acyclicity and augmentations."""

from __future__ import annotations

import math

import pytest

from ccshell.complex import complex_from_matrices, from_simplicial
from ccshell.errors import InvalidAugmentation
from ccshell.fixtures import fixture_names, load_fixture
from ccshell.homology import (
    Augmentation,
    FGModule,
    betti_numbers,
    build_augmentation,
    euler_characteristic,
    homology,
    is_acyclic,
    min_boundary_support,
    reduced_homology,
)
from ccshell.oracle import GeneratorConfig, GeneratorSource, dense_homology_oracle, generate
from ccshell.rings import QQ, ZZ, prime_field


# ---------------------------------------------------------------------------
# FGModule
# ---------------------------------------------------------------------------


def test_fgmodule_rendering():
    assert str(FGModule(0)) == "0"
    assert str(FGModule(1)) == "Z"
    assert str(FGModule(2, (3,))) == "Z^2 + Z/3"
    assert str(FGModule(1, (), QQ)) == "Q"
    assert str(FGModule(2, (), prime_field(5))) == "F5^2"


def test_fgmodule_equality_ignores_ring():
    assert FGModule(1, (), QQ) == FGModule(1)


@pytest.mark.parametrize("free, torsion", [(-1, ()), (0, (1,)), (0, (2, 3))])
def test_fgmodule_rejects_invalid_data(free, torsion):
    with pytest.raises(ValueError):
        FGModule(free, torsion)


# ---------------------------------------------------------------------------
# homology
# ---------------------------------------------------------------------------


def test_homology_of_triangle_boundary():
    complex_ = from_simplicial([[1, 2], [1, 3], [2, 3]])
    assert homology(complex_) == [FGModule(1), FGModule(1)]


def test_homology_with_h1():
    assert homology(load_fixture("regular_with_loop")) == [FGModule(1), FGModule(1), FGModule(0)]


def test_homology_with_torsion():
    assert homology(load_fixture("independent_edges")) == [FGModule(0, (3,)), FGModule(0)]
    assert homology(load_fixture("twisted_tripod_edges")) == [FGModule(1, (2,)), FGModule(0)]


def test_order_zero_homology_is_free():
    complex_ = complex_from_matrices([], k0=3)
    assert homology(complex_) == [FGModule(3)]


def test_homology_depends_on_ring():
    complex_ = load_fixture("torsion_edge")
    assert homology(complex_) == [FGModule(1, (2,)), FGModule(0)]
    assert homology(complex_.over(QQ)) == [FGModule(1), FGModule(0)]
    assert homology(complex_.over(prime_field(2))) == [FGModule(2), FGModule(1)]
    assert homology(complex_.over(prime_field(3))) == [FGModule(1), FGModule(0)]


@pytest.mark.parametrize("name", fixture_names())
def test_homology_matches_dense_oracle_on_fixtures(name):
    complex_ = load_fixture(name)
    assert homology(complex_) == dense_homology_oracle(complex_)


def test_euler_characteristic_matches_betti_numbers():
    complex_ = load_fixture("regular_with_loop")
    betti = betti_numbers(complex_)
    assert betti == [1, 1, 0]
    assert euler_characteristic(complex_) == sum((-1) ** nu * b for nu, b in enumerate(betti))


def test_acyclicity():
    assert is_acyclic(load_fixture("square"))
    assert is_acyclic(load_fixture("coprime_edge"))
    assert not is_acyclic(load_fixture("double_disc"))
    assert not is_acyclic(load_fixture("loop_to_vertex"))


# ---------------------------------------------------------------------------
# Augmentations and reduced homology
# ---------------------------------------------------------------------------


def test_min_boundary_support():
    assert min_boundary_support(load_fixture("loop_to_vertex")) == 1
    assert min_boundary_support(load_fixture("triangle")) == 2
    assert min_boundary_support(complex_from_matrices([], k0=2)) == math.inf


def test_no_augmentation_when_a_vertex_is_a_boundary():
    assert build_augmentation(load_fixture("loop_to_vertex")) is None


def test_augmentation_of_simplicial_complex_is_constant():
    complex_ = from_simplicial([[1, 2], [2, 3]])
    augmentation = build_augmentation(complex_)
    values = set(augmentation.vector(complex_))
    assert len(values) == 1
    assert abs(values.pop()) == 1
    augmentation.check(complex_)


def test_augmentation_for_coprime_boundary():
    complex_ = load_fixture("coprime_edge")
    augmentation = build_augmentation(complex_)
    assert tuple(abs(v) for v in augmentation.vector(complex_)) == (3, 2)
    assert reduced_homology(complex_, augmentation) == [FGModule(0), FGModule(0)]


def test_augmentation_with_isolated_vertex():
    complex_ = from_simplicial([[1, 2], [3]])
    augmentation = build_augmentation(complex_)
    assert all(v != 0 for v in augmentation.vector(complex_))


def test_reduced_homology_of_two_points():
    complex_ = complex_from_matrices([], k0=2)
    augmentation = build_augmentation(complex_)
    assert reduced_homology(complex_, augmentation) == [FGModule(1)]


def test_reduced_homology_of_triangle_vanishes():
    complex_ = load_fixture("triangle")
    reduced = reduced_homology(complex_, build_augmentation(complex_))
    assert all(g.is_trivial for g in reduced)


def test_invalid_augmentation_rejected():
    complex_ = from_simplicial([[1, 2]])
    v1, v2 = complex_.basis(0)
    with pytest.raises(InvalidAugmentation):
        Augmentation({v1: 1, v2: 0}).check(complex_)
    with pytest.raises(InvalidAugmentation):
        Augmentation({v1: 1, v2: 2}).check(complex_)


# ---------------------------------------------------------------------------
# Seeded augmentation runs
# ---------------------------------------------------------------------------


def test_augmentation_exists_when_supports_have_two_elements():
    sources = list(GeneratorSource)
    built = 0
    for seed in range(100):
        complex_ = generate(GeneratorConfig(seed=seed, source=sources[seed % len(sources)]))
        augmentation = build_augmentation(complex_)
        if min_boundary_support(complex_) < 2:
            assert augmentation is None, seed
            continue
        assert augmentation is not None, seed
        augmentation.check(complex_)
        assert all(v != 0 for v in augmentation.vector(complex_)), seed
        built += 1
    assert built > 0


@pytest.mark.parametrize("k", range(1, 6))
def test_no_augmentation_for_single_vertex_boundary(k):
    complex_ = complex_from_matrices([[[k], [0]]])
    assert min_boundary_support(complex_) == 1
    assert build_augmentation(complex_) is None
