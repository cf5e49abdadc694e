"""Tests for ccshell.oracle – brute-force shellings, dense homology and generators."""

from __future__ import annotations

import pytest

from ccshell.complex import complex_from_matrices, from_simplicial, is_pure
from ccshell.errors import TooLarge
from ccshell.fixtures import fixture_names, load_fixture
from ccshell.homology import homology
from ccshell.oracle import (
    GeneratorConfig,
    GeneratorSource,
    brute_shellable,
    brute_shellings,
    dense_homology_oracle,
    fuzz,
    generate,
)
from ccshell.rings import QQ, prime_field
from ccshell.shelling import search_shelling, verify_shelling


def _matrices(complex_):
    return [complex_.boundary_matrix(nu).entries for nu in range(1, complex_.order + 1)]


# ---------------------------------------------------------------------------
# Brute-force shellings
# ---------------------------------------------------------------------------


def test_all_shellings_of_triangle_boundary():
    complex_ = from_simplicial([[1, 2], [1, 3], [2, 3]])
    shellings = brute_shellings(complex_)
    # 3! edge orders, each with 2 * 1 * 2 vertex orders below it.
    assert len(shellings) == 24
    assert all(verify_shelling(complex_, cert) is None for cert in shellings)


def test_brute_agrees_on_disjoint_edges():
    complex_ = from_simplicial([[1, 2], [3, 4]])
    assert not brute_shellable(complex_)
    assert search_shelling(complex_) is None


@pytest.mark.parametrize("name", ["pinched_disc", "torsion_edge", "independent_edges", "lopsided_edges", "half_open_edge", "double_disc"])
def test_brute_agrees_with_search_on_fixtures(name):
    complex_ = load_fixture(name)
    assert brute_shellable(complex_) == (search_shelling(complex_) is not None)


def test_brute_agrees_on_unshellable_boundary():
    complex_ = complex_from_matrices([[[0, 0]], [[1], [1]]])
    assert not brute_shellable(complex_)


def test_brute_force_refuses_large_input():
    with pytest.raises(TooLarge):
        brute_shellings(from_simplicial([[v] for v in range(1, 7)]))


# ---------------------------------------------------------------------------
# Dense homology
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("ring", [QQ, prime_field(2), prime_field(3)])
def test_dense_oracle_over_fields(ring):
    complex_ = load_fixture("torsion_edge").over(ring)
    assert dense_homology_oracle(complex_) == homology(complex_)


def test_dense_oracle_refuses_large_input():
    with pytest.raises(TooLarge):
        dense_homology_oracle(from_simplicial([list(range(1, 8))]))


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("source", list(GeneratorSource))
def test_generation_is_deterministic(source):
    config = GeneratorConfig(seed=7, source=source)
    first, second = generate(config), generate(config)
    assert first.rank_profile() == second.rank_profile()
    assert _matrices(first) == _matrices(second)


@pytest.mark.parametrize("seed", range(5))
def test_ensure_pure(seed):
    config = GeneratorConfig(seed=seed, source=GeneratorSource.RANDOM_SIMPLICIAL, ensure_pure=True)
    assert is_pure(generate(config))


@pytest.mark.parametrize("seed", range(5))
def test_shifted_complexes_are_shellable(seed):
    complex_ = generate(GeneratorConfig(seed=seed, source=GeneratorSource.SHIFTED_COMPLEX, max_vertices=5))
    assert is_pure(complex_)
    assert search_shelling(complex_) is not None


@pytest.mark.parametrize("seed", range(5))
def test_perturbed_boundaries_keep_homology_exact(seed):
    complex_ = generate(GeneratorConfig(seed=seed, source=GeneratorSource.RANDOM_BOUNDARY))
    assert homology(complex_) == dense_homology_oracle(complex_)


def test_generated_ring():
    complex_ = generate(GeneratorConfig(seed=1, ring=prime_field(5)))
    assert complex_.ring == prime_field(5)


def test_fixed_vertex_count():
    complex_ = generate(GeneratorConfig(seed=3, source=GeneratorSource.SHIFTED_COMPLEX, vertices=4, max_order=1))
    assert max(int(str(v).strip("{}")) for v in complex_.basis(0)) <= 4


# ---------------------------------------------------------------------------
# Fuzzing
# ---------------------------------------------------------------------------


def test_fuzz_finds_no_disagreements():
    table = fuzz(6, seed=0)
    assert list(table.columns) == ["seed", "source", "check", "ok", "detail"]
    assert set(table["seed"]) == set(range(6))
    assert table["ok"].all()


# ---------------------------------------------------------------------------
# Seeded agreement runs
# ---------------------------------------------------------------------------


def test_homology_matches_dense_oracle_on_generated_complexes():
    sources = list(GeneratorSource)
    for seed in range(500):
        complex_ = generate(GeneratorConfig(seed=seed, source=sources[seed % len(sources)]))
        assert homology(complex_) == dense_homology_oracle(complex_), seed


@pytest.mark.parametrize("name", fixture_names())
def test_homology_matches_dense_oracle_on_fixtures(name):
    complex_ = load_fixture(name)
    assert homology(complex_) == dense_homology_oracle(complex_)


def test_shelling_search_matches_brute_force():
    sources = [GeneratorSource.RANDOM_SIMPLICIAL, GeneratorSource.SHIFTED_COMPLEX]
    checked = 0
    for seed in range(2000):
        config = GeneratorConfig(seed=seed, source=sources[seed % 2], max_order=2, max_cells=3, max_vertices=4)
        complex_ = generate(config)
        try:
            expected = brute_shellable(complex_)
        except TooLarge:
            continue
        found = search_shelling(complex_)
        assert (found is not None) == expected, seed
        if found is not None:
            assert verify_shelling(complex_, found) is None, seed
        checked += 1
        if checked == 200:
            break
    assert checked == 200
