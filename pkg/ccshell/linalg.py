"""Exact sparse linear algebra over ℤ, ℚ and ℤ/p.

Matrices are stored sparsely (:class:`SparseIntMatrix`) and factorized with a
Smith normal form that works on a dense numpy object-dtype copy, so integer
entries keep arbitrary precision.  Every other operation in this module
(rank, kernel, lattice and rational-span membership, solving modulo a set of
coordinates) reads its answer off one factorization.

Typical usage::

    from ccshell.linalg import SparseIntMatrix, smith_normal_form

    m = SparseIntMatrix.from_dense([[2, 1], [1, 2]])
    smith_normal_form(m).diagonal      # (1, 3)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property, reduce
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ccshell import config as cfg
from ccshell.errors import IndexOutOfRange, InvalidTarget
from ccshell.rings import ZZ, RingSpec, Scalar

logger = logging.getLogger(__name__)

Vector = Tuple[Scalar, ...]


# ---------------------------------------------------------------------------
# Sparse matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SparseIntMatrix:
    """Sparse matrix of ring scalars, 0-based ``(row, col)`` keys.

    Zero entries are dropped and every entry is normalized into *ring* on
    construction.
    """

    rows: int
    cols: int
    entries: Mapping[Tuple[int, int], Scalar] = field(default_factory=dict)
    ring: RingSpec = ZZ

    def __post_init__(self) -> None:
        cleaned: Dict[Tuple[int, int], Scalar] = {}
        for (i, j), value in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise IndexOutOfRange(
                    f"entry ({i}, {j}) outside a {self.rows}x{self.cols} matrix"
                )
            value = self.ring.normalize(value)
            if value != 0:
                cleaned[(i, j)] = value
        object.__setattr__(self, "entries", cleaned)

    # -- constructors -----------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int, ring: RingSpec = ZZ) -> "SparseIntMatrix":
        return cls(rows, cols, {}, ring)

    @classmethod
    def identity(cls, n: int, ring: RingSpec = ZZ) -> "SparseIntMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)}, ring)

    @classmethod
    def from_dense(
        cls, data: Sequence[Sequence[Scalar]] | np.ndarray, ring: RingSpec = ZZ,
        cols: int | None = None,
    ) -> "SparseIntMatrix":
        """Build from a list of rows (or a 2-D array).

        *cols* is only needed when *data* has no rows.
        """
        rows = len(data)
        if rows:
            cols = len(data[0])
        elif cols is None:
            cols = 0
        entries = {
            (i, j): value
            for i, row in enumerate(data)
            for j, value in enumerate(row)
            if value != 0
        }
        return cls(rows, cols, entries, ring)

    @classmethod
    def from_columns(
        cls, rows: int, columns: Sequence[Mapping[int, Scalar]], ring: RingSpec = ZZ
    ) -> "SparseIntMatrix":
        entries = {(i, j): v for j, col in enumerate(columns) for i, v in col.items()}
        return cls(rows, len(columns), entries, ring)

    # -- views ------------------------------------------------------------------

    @cached_property
    def _column_index(self) -> Tuple[Dict[int, Scalar], ...]:
        columns: List[Dict[int, Scalar]] = [{} for _ in range(self.cols)]
        for (i, j), value in sorted(self.entries.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            columns[j][i] = value
        return tuple(columns)

    def column(self, j: int) -> Dict[int, Scalar]:
        """Sparse column *j* as ``{row: value}`` (a fresh dict)."""
        return dict(self._column_index[j])

    def column_vector(self, j: int) -> Vector:
        col = self._column_index[j]
        return tuple(col.get(i, self.ring.zero) for i in range(self.rows))

    @property
    def nnz(self) -> int:
        return len(self.entries)

    @property
    def density(self) -> float:
        size = self.rows * self.cols
        return self.nnz / size if size else 0.0

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def to_dense(self) -> np.ndarray:
        """Dense copy as a numpy object array (exact scalars)."""
        out = np.empty((self.rows, self.cols), dtype=object)
        out.fill(self.ring.zero)
        for (i, j), value in self.entries.items():
            out[i, j] = value
        return out

    def to_lists(self) -> List[List[Scalar]]:
        return self.to_dense().tolist()

    # -- algebra ----------------------------------------------------------------

    def transpose(self) -> "SparseIntMatrix":
        return SparseIntMatrix(
            self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()}, self.ring
        )

    def matmul(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.cols != other.rows:
            raise ValueError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        by_row: Dict[int, Dict[int, Scalar]] = {}
        for (i, j), v in self.entries.items():
            by_row.setdefault(i, {})[j] = v
        out: Dict[Tuple[int, int], Scalar] = {}
        for k in range(other.cols):
            col = other._column_index[k]
            for i, row in by_row.items():
                acc = sum((row[j] * w for j, w in col.items() if j in row), self.ring.zero)
                if acc != 0:
                    out[(i, k)] = acc
        return SparseIntMatrix(self.rows, other.cols, out, self.ring)

    def matvec(self, vector: Sequence[Scalar]) -> Vector:
        if len(vector) != self.cols:
            raise ValueError(f"vector of length {len(vector)} for {self.cols} columns")
        out = [self.ring.zero] * self.rows
        for (i, j), v in self.entries.items():
            out[i] = out[i] + v * vector[j]
        return tuple(self.ring.normalize(x) for x in out)

    def select_columns(self, indices: Sequence[int]) -> "SparseIntMatrix":
        """Columns *indices* (in that order) as a new matrix."""
        return SparseIntMatrix.from_columns(
            self.rows, [self._column_index[j] for j in indices], self.ring
        )

    def delete_rows(self, indices: Iterable[int]) -> "SparseIntMatrix":
        dropped = set(indices)
        keep = [i for i in range(self.rows) if i not in dropped]
        new_index = {old: new for new, old in enumerate(keep)}
        entries = {
            (new_index[i], j): v for (i, j), v in self.entries.items() if i in new_index
        }
        return SparseIntMatrix(len(keep), self.cols, entries, self.ring)

    def over(self, ring: RingSpec) -> "SparseIntMatrix":
        """The same entries read in another ring."""
        return SparseIntMatrix(self.rows, self.cols, dict(self.entries), ring)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SNFDecomposition:
    """``U @ M @ V == D`` with unimodular ``U``, ``V``."""

    U: SparseIntMatrix
    D: SparseIntMatrix
    V: SparseIntMatrix
    V_inverse: SparseIntMatrix

    @cached_property
    def diagonal(self) -> Vector:
        n = min(self.D.rows, self.D.cols)
        zero = self.D.ring.zero
        return tuple(self.D.entries.get((i, i), zero) for i in range(n))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def _eye(n: int, ring: RingSpec) -> np.ndarray:
    out = np.empty((n, n), dtype=object)
    out.fill(ring.zero)
    for i in range(n):
        out[i, i] = ring.one
    return out


class _Diagonalizer:
    """Row/column reduction of a dense object array, tracking U, V and V⁻¹."""

    def __init__(self, a: np.ndarray, ring: RingSpec) -> None:
        self.a = a
        self.ring = ring
        m, n = a.shape
        self.u = _eye(m, ring)
        self.v = _eye(n, ring)
        self.v_inv = _eye(n, ring)

    def swap_rows(self, i: int, j: int) -> None:
        if i != j:
            self.a[[i, j]] = self.a[[j, i]]
            self.u[[i, j]] = self.u[[j, i]]

    def swap_cols(self, i: int, j: int) -> None:
        if i != j:
            self.a[:, [i, j]] = self.a[:, [j, i]]
            self.v[:, [i, j]] = self.v[:, [j, i]]
            self.v_inv[[i, j]] = self.v_inv[[j, i]]

    def add_row(self, src: int, dst: int, q: Scalar) -> None:
        """row[dst] += q * row[src]"""
        self.a[dst] = self.ring.reduce_array(self.a[dst] + q * self.a[src])
        self.u[dst] = self.ring.reduce_array(self.u[dst] + q * self.u[src])

    def add_col(self, src: int, dst: int, q: Scalar) -> None:
        """col[dst] += q * col[src]"""
        self.a[:, dst] = self.ring.reduce_array(self.a[:, dst] + q * self.a[:, src])
        self.v[:, dst] = self.ring.reduce_array(self.v[:, dst] + q * self.v[:, src])
        self.v_inv[src] = self.ring.reduce_array(self.v_inv[src] - q * self.v_inv[dst])

    def scale_row(self, i: int, unit: Scalar) -> None:
        self.a[i] = self.ring.reduce_array(self.a[i] * unit)
        self.u[i] = self.ring.reduce_array(self.u[i] * unit)

    def _min_pivot(self, t: int) -> Optional[Tuple[int, int]]:
        sub = self.a[t:, t:]
        rows, cols = np.nonzero(sub != 0)
        if len(rows) == 0:
            return None
        best = min(
            zip(rows.tolist(), cols.tolist()),
            key=lambda rc: self.ring.size(sub[rc[0], rc[1]]),
        )
        return best[0] + t, best[1] + t

    def _non_divisible(self, t: int) -> Optional[int]:
        if self.ring.is_field:
            return None
        pivot = self.a[t, t]
        m, n = self.a.shape
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if self.a[i, j] % pivot != 0:
                    return i
        return None

    def run(self) -> None:
        m, n = self.a.shape
        ring = self.ring
        for t in range(min(m, n)):
            pos = self._min_pivot(t)
            if pos is None:
                break
            self.swap_rows(t, pos[0])
            self.swap_cols(t, pos[1])
            while True:
                leftover = False
                for i in range(t + 1, m):
                    if self.a[i, t] != 0:
                        q, _ = ring.quo_rem(self.a[i, t], self.a[t, t])
                        self.add_row(t, i, ring.neg(q))
                        leftover = leftover or self.a[i, t] != 0
                for j in range(t + 1, n):
                    if self.a[t, j] != 0:
                        q, _ = ring.quo_rem(self.a[t, j], self.a[t, t])
                        self.add_col(t, j, ring.neg(q))
                        leftover = leftover or self.a[t, j] != 0
                if leftover:
                    self._repivot(t)
                    continue
                bad_row = self._non_divisible(t)
                if bad_row is not None:
                    self.add_row(bad_row, t, ring.one)
                    continue
                break
            unit, _ = ring.canonical_associate(self.a[t, t])
            if unit != ring.one:
                self.scale_row(t, unit)

    def _repivot(self, t: int) -> None:
        m, n = self.a.shape
        candidates = [(t, t)] if self.a[t, t] != 0 else []
        candidates += [(i, t) for i in range(t + 1, m) if self.a[i, t] != 0]
        candidates += [(t, j) for j in range(t + 1, n) if self.a[t, j] != 0]
        i, j = min(candidates, key=lambda rc: self.ring.size(self.a[rc[0], rc[1]]))
        self.swap_rows(t, i)
        self.swap_cols(t, j)


def _dense_to_sparse(a: np.ndarray, ring: RingSpec) -> SparseIntMatrix:
    rows, cols = a.shape
    entries = {(int(i), int(j)): a[i, j] for i, j in zip(*np.nonzero(a != 0))}
    return SparseIntMatrix(rows, cols, entries, ring)


def smith_normal_form(matrix: SparseIntMatrix) -> SNFDecomposition:
    """Smith normal form ``U·M·V = D`` with ``d_1 | d_2 | …``.

    The pivot is always an entry of minimal Euclidean size (first in
    row-major order on ties), so the result is deterministic.  Over a field
    the nonzero diagonal entries are all 1.
    """
    ring = matrix.ring
    m, n = matrix.rows, matrix.cols
    if matrix.density >= cfg.DENSE_FILL_THRESHOLD or matrix.is_zero:
        row_perm, col_perm = list(range(m)), list(range(n))
        block = matrix.to_dense()
    else:
        row_set = {i for i, _ in matrix.entries}
        col_set = {j for _, j in matrix.entries}
        used_rows, used_cols = sorted(row_set), sorted(col_set)
        row_perm = used_rows + [i for i in range(m) if i not in row_set]
        col_perm = used_cols + [j for j in range(n) if j not in col_set]
        block = matrix.to_dense()[np.ix_(used_rows, used_cols)]

    worker = _Diagonalizer(block.copy(), ring)
    worker.run()
    r, c = block.shape

    u_block, v_block, v_inv_block = _eye(m, ring), _eye(n, ring), _eye(n, ring)
    u_block[:r, :r] = worker.u
    v_block[:c, :c] = worker.v
    v_inv_block[:c, :c] = worker.v_inv
    d = np.empty((m, n), dtype=object)
    d.fill(ring.zero)
    d[:r, :c] = worker.a

    # Undo the row/column permutation that moved the nonzero block first.
    u = np.empty((m, m), dtype=object)
    u[:, row_perm] = u_block
    v = np.empty((n, n), dtype=object)
    v[col_perm, :] = v_block
    v_inv = np.empty((n, n), dtype=object)
    v_inv[:, col_perm] = v_inv_block

    return SNFDecomposition(
        U=_dense_to_sparse(u, ring),
        D=_dense_to_sparse(d, ring),
        V=_dense_to_sparse(v, ring),
        V_inverse=_dense_to_sparse(v_inv, ring),
    )


# ---------------------------------------------------------------------------
# Derived operations
# ---------------------------------------------------------------------------


def rank(matrix: SparseIntMatrix) -> int:
    return smith_normal_form(matrix).rank


def kernel_basis(matrix: SparseIntMatrix) -> List[Vector]:
    """A basis of ``ker M`` (saturated over ℤ), ``cols - rank`` vectors."""
    snf = smith_normal_form(matrix)
    return [snf.V.column_vector(j) for j in range(snf.rank, matrix.cols)]


def _check_target(matrix: SparseIntMatrix, vector: Sequence[Scalar]) -> Vector:
    if len(vector) != matrix.rows:
        raise ValueError(f"target of length {len(vector)} for {matrix.rows} rows")
    return tuple(matrix.ring.normalize(x) for x in vector)


def _solve(matrix: SparseIntMatrix, target: Vector, clear_denominators: bool):
    ring = matrix.ring
    snf = smith_normal_form(matrix)
    w = snf.U.matvec(target)
    diag = snf.diagonal
    r = snf.rank
    if any(w[i] != 0 for i in range(r, matrix.rows)):
        return None
    scale = ring.one
    if clear_denominators and not ring.is_field:
        scale = reduce(
            lambda acc, k: acc * k // gcd(acc, k),
            (diag[i] // gcd(diag[i], w[i]) for i in range(r)),
            1,
        )
    y: List[Scalar] = []
    for i in range(r):
        q, rem = ring.quo_rem(ring.mul(scale, w[i]), diag[i])
        if rem != 0:
            return None
        y.append(q)
    y.extend([ring.zero] * (matrix.cols - r))
    return scale, snf.V.matvec(y)


def lattice_membership(matrix: SparseIntMatrix, vector: Sequence[Scalar]) -> Optional[Vector]:
    """Some ``x`` with ``M·x = v`` over the ring, or ``None``."""
    solved = _solve(matrix, _check_target(matrix, vector), clear_denominators=False)
    return None if solved is None else solved[1]


def rational_span_membership(
    matrix: SparseIntMatrix, vector: Sequence[Scalar]
) -> Optional[Tuple[Scalar, Vector]]:
    """``(a, x)`` with ``a != 0`` and ``a·v = M·x``, or ``None``.

    Over ℤ, *a* is the smallest positive integer that clears the
    denominators of a rational solution.  Over a field, *a* is 1.
    """
    return _solve(matrix, _check_target(matrix, vector), clear_denominators=True)


def solve_in_quotient(
    matrix: SparseIntMatrix,
    vector: Sequence[Scalar],
    kill_rows: Iterable[int],
    unit_coefficient_required: bool,
) -> Optional[Tuple[Scalar, Vector]]:
    """Find ``(c, x)`` with ``M·x ≡ c·v`` modulo the coordinates *kill_rows*.

    *vector* must be a standard basis column.  With
    *unit_coefficient_required* the coefficient is 1 (any unit multiple of a
    solution is a solution); otherwise ``c`` is the smallest positive
    scalar that works.
    """
    ring = matrix.ring
    target = _check_target(matrix, vector)
    support = [i for i, x in enumerate(target) if x != 0]
    if len(support) != 1 or target[support[0]] != ring.one:
        raise InvalidTarget("target must be a standard basis column")
    kill = set(kill_rows)
    reduced = matrix.delete_rows(kill)
    kept_target = tuple(x for i, x in enumerate(target) if i not in kill)
    if unit_coefficient_required:
        x = lattice_membership(reduced, kept_target)
        return None if x is None else (ring.one, x)
    return rational_span_membership(reduced, kept_target)
