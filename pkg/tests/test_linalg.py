"""Tests for ccshell.linalg – sparse matrices and the Smith normal form."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix

from ccshell.errors import IndexOutOfRange, InvalidTarget
from ccshell.linalg import (
    SparseIntMatrix,
    kernel_basis,
    lattice_membership,
    rank,
    rational_span_membership,
    smith_normal_form,
    solve_in_quotient,
)
from ccshell.rings import QQ, ZZ, prime_field

small_matrices = st.integers(1, 4).flatmap(
    lambda rows: st.integers(1, 4).flatmap(
        lambda cols: st.lists(
            st.lists(st.integers(-4, 4), min_size=cols, max_size=cols), min_size=rows, max_size=rows
        )
    )
)


def _dense(m: SparseIntMatrix) -> list:
    return m.to_lists()


def _product(*ms: SparseIntMatrix) -> SparseIntMatrix:
    out = ms[0]
    for m in ms[1:]:
        out = out.matmul(m)
    return out


# ---------------------------------------------------------------------------
# SparseIntMatrix
# ---------------------------------------------------------------------------


def test_zero_entries_are_dropped():
    m = SparseIntMatrix.from_dense([[0, 2], [0, 0]])
    assert m.entries == {(0, 1): 2}
    assert m.nnz == 1


def test_entries_outside_shape_raise():
    with pytest.raises(IndexOutOfRange):
        SparseIntMatrix(2, 2, {(2, 0): 1})


def test_entries_reduced_over_prime_field():
    m = SparseIntMatrix.from_dense([[3, 5]], prime_field(3))
    assert m.entries == {(0, 1): 2}


def test_from_dense_without_rows_keeps_column_count():
    m = SparseIntMatrix.from_dense([], cols=3)
    assert (m.rows, m.cols) == (0, 3)


def test_matmul_and_transpose():
    a = SparseIntMatrix.from_dense([[1, 2], [0, 1]])
    b = SparseIntMatrix.from_dense([[1, 0], [-1, 1]])
    assert _dense(a.matmul(b)) == [[-1, 2], [-1, 1]]
    assert _dense(a.transpose()) == [[1, 0], [2, 1]]


def test_matmul_shape_mismatch():
    with pytest.raises(ValueError):
        SparseIntMatrix.identity(2).matmul(SparseIntMatrix.identity(3))


def test_select_columns_and_delete_rows():
    m = SparseIntMatrix.from_dense([[1, 2, 3], [4, 5, 6]])
    assert _dense(m.select_columns([2, 0])) == [[3, 1], [6, 4]]
    assert _dense(m.delete_rows([0])) == [[4, 5, 6]]


def test_column_vector():
    m = SparseIntMatrix.from_dense([[1, 0], [0, -1], [1, 1]])
    assert m.column_vector(1) == (0, -1, 1)
    assert m.column(0) == {0: 1, 2: 1}


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def test_snf_diagonal_example():
    m = SparseIntMatrix.from_dense([[2, 1], [1, 2]])
    assert smith_normal_form(m).diagonal == (1, 3)


def test_snf_with_torsion_two():
    # Boundary of two edges between the same pair of vertices with
    # coefficients (1, 1) and (-1, 1).
    m = SparseIntMatrix.from_dense([[1, -1], [1, 1]])
    assert smith_normal_form(m).diagonal == (1, 2)


def test_snf_over_field_is_all_ones():
    m = SparseIntMatrix.from_dense([[2, 4], [6, 8]], QQ)
    assert smith_normal_form(m).diagonal == (1, 1)


def test_snf_of_zero_matrix():
    snf = smith_normal_form(SparseIntMatrix.zeros(2, 3))
    assert snf.rank == 0
    assert snf.diagonal == (0, 0)


@settings(max_examples=60, deadline=None)
@given(small_matrices)
def test_snf_factorization_holds(data):
    m = SparseIntMatrix.from_dense(data)
    snf = smith_normal_form(m)
    assert _product(snf.U, m, snf.V).entries == snf.D.entries
    assert _product(snf.V, snf.V_inverse).entries == SparseIntMatrix.identity(m.cols).entries
    nonzero = [d for d in snf.diagonal if d != 0]
    assert all(d > 0 for d in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    assert snf.rank == Matrix(data).rank()


def test_snf_on_seeded_random_matrices():
    rng = np.random.default_rng(20240611)
    for _ in range(1000):
        rows, cols = (int(x) for x in rng.integers(1, 9, size=2))
        data = rng.integers(-9, 10, size=(rows, cols)).tolist()
        m = SparseIntMatrix.from_dense(data)
        snf = smith_normal_form(m)
        assert _product(snf.U, m, snf.V).entries == snf.D.entries, data
        assert _product(snf.V, snf.V_inverse).entries == SparseIntMatrix.identity(cols).entries, data
        assert Matrix(snf.U.to_lists()).det(method="bareiss") in (1, -1), data
        assert Matrix(snf.V.to_lists()).det(method="bareiss") in (1, -1), data
        assert all(key[0] == key[1] for key in snf.D.entries), data
        nonzero = [d for d in snf.diagonal if d != 0]
        assert all(d > 0 for d in nonzero), data
        assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:])), data
        assert snf.diagonal[len(nonzero):] == (0,) * (len(snf.diagonal) - len(nonzero)), data
        assert snf.rank == Matrix(data).rank(), data


@settings(max_examples=40, deadline=None)
@given(small_matrices)
def test_kernel_basis_is_annihilated(data):
    m = SparseIntMatrix.from_dense(data)
    basis = kernel_basis(m)
    assert len(basis) == m.cols - rank(m)
    for vector in basis:
        assert all(x == 0 for x in m.matvec(vector))


def test_rank_over_prime_field_differs():
    data = [[1, 1], [1, -1]]
    assert rank(SparseIntMatrix.from_dense(data)) == 2
    assert rank(SparseIntMatrix.from_dense(data, prime_field(2))) == 1


# ---------------------------------------------------------------------------
# Membership and quotient solving
# ---------------------------------------------------------------------------


def test_lattice_membership():
    m = SparseIntMatrix.from_dense([[2, 0], [0, 3]])
    assert lattice_membership(m, [4, 3]) == (2, 1)
    assert lattice_membership(m, [1, 0]) is None


def test_rational_span_membership_clears_denominators():
    m = SparseIntMatrix.from_dense([[2], [2]])
    scale, x = rational_span_membership(m, [1, 1])
    assert scale == 2
    assert m.matvec(x) == (2, 2)
    assert rational_span_membership(m, [1, 0]) is None


def test_rational_span_over_q_has_unit_scale():
    m = SparseIntMatrix.from_dense([[2], [2]], QQ)
    scale, x = rational_span_membership(m, [1, 1])
    assert scale == 1
    assert x == (Fraction(1, 2),)


def test_membership_target_length_checked():
    with pytest.raises(ValueError):
        lattice_membership(SparseIntMatrix.identity(2), [1, 2, 3])


def test_solve_in_quotient_ignores_killed_rows():
    # Column [1, 5] reaches e_0 once row 1 is ignored.
    m = SparseIntMatrix.from_dense([[1], [5]])
    assert solve_in_quotient(m, [1, 0], kill_rows=[1], unit_coefficient_required=True) == (1, (1,))
    assert solve_in_quotient(m, [1, 0], kill_rows=[], unit_coefficient_required=True) is None


def test_solve_in_quotient_without_unit_requirement():
    m = SparseIntMatrix.from_dense([[3], [1]])
    assert solve_in_quotient(m, [1, 0], kill_rows=[1], unit_coefficient_required=True) is None
    scale, x = solve_in_quotient(m, [1, 0], kill_rows=[1], unit_coefficient_required=False)
    assert scale == 3
    assert x == (1,)


def test_solve_in_quotient_needs_basis_target():
    with pytest.raises(InvalidTarget):
        solve_in_quotient(SparseIntMatrix.identity(2), [1, 1], kill_rows=[], unit_coefficient_required=True)
