"""Exact homology, augmentations and reduced homology.

H_ν = ker ∂_ν / im ∂_{ν+1} is read off two Smith normal forms: one of ∂_ν
gives a saturated kernel basis (the trailing columns of V), the other is of
∂_{ν+1} written in that basis, whose diagonal carries the torsion.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from math import gcd
from typing import List, Mapping, Optional, Sequence, Tuple, Union

from ccshell import config as cfg
from ccshell.complex import BasisElement, ChainComplex, build_complex
from ccshell.errors import InvalidAugmentation
from ccshell.linalg import SparseIntMatrix, kernel_basis, smith_normal_form
from ccshell.rings import PRIME_FIELD, ZZ, RingSpec, Scalar

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FGModule:
    """``R^free_rank ⊕ R/t_1 ⊕ … ⊕ R/t_k`` with ``t_1 | t_2 | …``."""

    free_rank: int
    torsion: Tuple[int, ...] = ()
    ring: RingSpec = field(default=ZZ, compare=False)

    def __post_init__(self) -> None:
        torsion = tuple(int(t) for t in self.torsion)
        object.__setattr__(self, "torsion", torsion)
        if self.free_rank < 0 or any(t < 2 for t in torsion):
            raise ValueError(f"invalid module data ({self.free_rank}, {torsion})")
        if any(b % a for a, b in zip(torsion, torsion[1:])):
            raise ValueError(f"torsion {torsion} is not a divisibility chain")

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        symbol = self.ring.symbol
        parts = []
        if self.free_rank == 1:
            parts.append(symbol)
        elif self.free_rank > 1:
            parts.append(f"{symbol}^{self.free_rank}")
        parts.extend(f"{symbol}/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class Augmentation:
    """ε: C_0 → R given on the basis."""

    values: Mapping[BasisElement, Scalar]

    def check(self, complex_: ChainComplex) -> None:
        """Raise :class:`InvalidAugmentation` unless ε∘∂_1 = 0 and ε(e) ≠ 0 on Ω_0."""
        ring = complex_.ring
        basis = complex_.basis(0)
        missing = [e for e in basis if ring.is_zero(self.values.get(e, 0))]
        if missing:
            raise InvalidAugmentation(f"augmentation vanishes on {', '.join(map(str, missing))}")
        row = SparseIntMatrix.from_dense([[self.values[e] for e in basis]], ring)
        if not row.matmul(complex_.boundary_matrix(1)).is_zero:
            raise InvalidAugmentation("augmentation does not kill the image of d_1")

    def vector(self, complex_: ChainComplex) -> Tuple[Scalar, ...]:
        return tuple(self.values[e] for e in complex_.basis(0))


# ---------------------------------------------------------------------------
# Homology
# ---------------------------------------------------------------------------


def _homology_at(complex_: ChainComplex, degree: int) -> FGModule:
    ring = complex_.ring
    down = smith_normal_form(complex_.boundary_matrix(degree))
    cycles_rank = len(complex_.basis(degree)) - down.rank
    up = complex_.boundary_matrix(degree + 1)
    in_kernel_basis = down.V_inverse.matmul(up).delete_rows(range(down.rank))
    diagonal = smith_normal_form(in_kernel_basis).diagonal
    boundaries_rank = sum(1 for d in diagonal if d != 0)
    torsion = () if ring.is_field else tuple(d for d in diagonal if d not in (0, 1))
    return FGModule(cycles_rank - boundaries_rank, torsion, ring)


def homology(complex_: ChainComplex) -> List[FGModule]:
    """H_0 … H_d."""
    groups = [_homology_at(complex_, nu) for nu in range(complex_.order + 1)]
    logger.debug("Homology: %s", ", ".join(f"H_{nu}={g}" for nu, g in enumerate(groups)))
    return groups


def betti_numbers(complex_: ChainComplex) -> List[int]:
    return [g.free_rank for g in homology(complex_)]


def euler_characteristic(complex_: ChainComplex) -> int:
    """Σ (-1)^ν k_ν, which equals Σ (-1)^ν rank H_ν."""
    return complex_.euler_characteristic()


def is_acyclic(complex_: ChainComplex) -> bool:
    groups = homology(complex_)
    return groups[0] == FGModule(1) and all(g.is_trivial for g in groups[1:])


# ---------------------------------------------------------------------------
# Augmentations
# ---------------------------------------------------------------------------


def min_boundary_support(complex_: ChainComplex) -> Union[int, float]:
    """min |bd(x)| over x ∈ C_1 \\ ker ∂_1, saturated at 2.

    Returns 1 when some coordinate line meets the image of ∂_1 (over the
    fraction field), ``math.inf`` when ∂_1 = 0, and 2 otherwise.
    """
    boundary = complex_.boundary_matrix(1)
    if boundary.is_zero:
        return math.inf
    snf = smith_normal_form(boundary)
    # e_l is in the rational image iff column l of U vanishes below the rank.
    for col in range(boundary.rows):
        u_col = snf.U.column(col)
        if all(row < snf.rank for row in u_col):
            return 1
    return 2


def _combine(vectors: Sequence[Sequence[Scalar]], coefficients: Sequence[Scalar], ring: RingSpec):
    return [
        ring.normalize(sum(c * v[i] for c, v in zip(coefficients, vectors)))
        for i in range(len(vectors[0]))
    ]


def build_augmentation(complex_: ChainComplex) -> Optional[Augmentation]:
    """ε with ε∘∂_1 = 0 and ε(e⁰_ℓ) ≠ 0 for every ℓ, or ``None``.

    Isolated vertices get the value 1.  The other coordinates come from a
    generic combination Σ x^i v_i of a kernel basis of ∂_1ᵀ for x = 1, 2, …
    """
    ring = complex_.ring
    basis = complex_.basis(0)
    boundary = complex_.boundary_matrix(1)
    if boundary.is_zero:
        return Augmentation({e: ring.one for e in basis})
    if min_boundary_support(complex_) < 2:
        return None
    isolated = {i for i in range(len(basis)) if not complex_.cofaces(basis[i])}
    vectors = kernel_basis(boundary.transpose())
    active = [i for i in range(len(basis)) if i not in isolated]

    def acceptable(values) -> bool:
        return all(values[i] != 0 for i in active)

    found = None
    attempts = len(basis) * len(vectors) + 1
    if ring.kind == PRIME_FIELD:
        attempts = min(attempts, ring.p - 1)
    for x in range(1, attempts + 1):
        values = _combine(vectors, [ring.normalize(x**i) for i in range(len(vectors))], ring)
        if acceptable(values):
            found = values
            break
    if found is None and ring.kind == PRIME_FIELD:
        if ring.p ** len(vectors) > cfg.AUGMENTATION_EXHAUSTIVE_LIMIT:
            logger.warning("Augmentation search over Fp:%d skipped: %d kernel vectors", ring.p, len(vectors))
            return None
        for coefficients in product(range(ring.p), repeat=len(vectors)):
            values = _combine(vectors, coefficients, ring)
            if acceptable(values):
                found = values
                break
    if found is None:
        return None
    for i in isolated:
        found[i] = ring.one
    if not ring.is_field:
        common = reduce(gcd, (abs(v) for v in found), 0)
        found = [v // common for v in found]
    return Augmentation({e: v for e, v in zip(basis, found)})


def reduced_homology(complex_: ChainComplex, augmentation: Augmentation) -> List[FGModule]:
    """H̃_0 … H̃_d of ``… → C_1 → C_0 → R → 0`` (ε in the last map)."""
    augmentation.check(complex_)
    labels: List[List[str]] = [["augmentation"]]
    labels += [[str(e) for e in complex_.basis(nu)] for nu in range(complex_.order + 1)]
    entries = [
        (1, e.index, 1, value)
        for e, value in augmentation.values.items()
        if e.degree == 0
    ]
    for nu in range(1, complex_.order + 1):
        for (i, j), value in complex_.boundary_matrix(nu).entries.items():
            entries.append((nu + 1, j + 1, i + 1, value))
    augmented = build_complex(complex_.ring, labels, entries)
    groups = homology(augmented)
    if not groups[0].is_trivial:
        logger.warning("Augmentation is not onto: reduced H_-1 = %s", groups[0])
    return groups[1:]
