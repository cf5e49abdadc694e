"""Critical, precritical and noncritical maximal elements.

Relative to an ordering of Ω_ν in which the non-maximal elements come first,
a maximal element e_j (j ≥ 2) is

* critical     if ∂e_j lies in the R-span of ∂e_1, …, ∂e_{j-1},
* precritical  if some a_j ≠ 0 puts a_j·∂e_j in that span,
* noncritical  otherwise.

Critical elements are precritical too; the ``PRECRITICAL`` tag is only used
for the strictly precritical ones.  Over a field the two notions coincide.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from ccshell.complex import BasisElement, Chain, ChainComplex, is_pure, maximal_elements
from ccshell.errors import (
    ClassificationError,
    FirstPosition,
    IndexOutOfRange,
    NotMaximal,
    OrderingConventionViolated,
    StrictlyPrecriticalPresent,
)
from ccshell.linalg import SparseIntMatrix, lattice_membership, rational_span_membership
from ccshell.rings import Scalar

logger = logging.getLogger(__name__)


class ElementTag(str, Enum):
    CRITICAL = "critical"
    PRECRITICAL = "precritical"
    NONCRITICAL = "noncritical"


@dataclass(frozen=True)
class Witness:
    """``scale · ∂e_j = Σ coefficients[i] · ∂e_{i+1}`` over the prefix."""

    scale: Scalar
    coefficients: Tuple[Scalar, ...]


@dataclass(frozen=True)
class ElementClass:
    element: BasisElement
    tag: ElementTag
    witness: Optional[Witness] = None
    by_convention: bool = False

    @property
    def is_precritical(self) -> bool:
        """Critical or strictly precritical."""
        return self.tag is not ElementTag.NONCRITICAL


@dataclass(frozen=True)
class DegreeOrdering:
    degree: int
    permutation: Tuple[BasisElement, ...]

    def check(self, complex_: ChainComplex) -> None:
        """Raise unless the permutation is a bijection on Ω_degree."""
        basis = complex_.basis(self.degree)
        if sorted(e.key for e in self.permutation) != [e.key for e in basis] or any(
            e.degree != self.degree for e in self.permutation
        ):
            raise IndexOutOfRange(f"ordering is not a permutation of the degree-{self.degree} basis")

    def position(self, element: BasisElement) -> int:
        """1-based position of *element*."""
        return self.permutation.index(element) + 1

    @classmethod
    def natural(cls, complex_: ChainComplex, degree: int) -> "DegreeOrdering":
        return cls(degree, tuple(complex_.basis(degree)))

    @classmethod
    def canonical(cls, complex_: ChainComplex, degree: int) -> "DegreeOrdering":
        """Non-maximal elements first, then maximal ones, each in basis order."""
        gamma = set(maximal_elements(complex_))
        basis = complex_.basis(degree)
        return cls(
            degree,
            tuple(e for e in basis if e not in gamma) + tuple(e for e in basis if e in gamma),
        )


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def prefix_matrix(complex_: ChainComplex, ordering: DegreeOrdering, j: int) -> SparseIntMatrix:
    """Columns ∂e_1 … ∂e_{j-1} of the ordering, as a matrix."""
    boundary = complex_.boundary_matrix(ordering.degree)
    return boundary.select_columns([e.index - 1 for e in ordering.permutation[: j - 1]])


def check_witness(
    complex_: ChainComplex, ordering: DegreeOrdering, j: int, witness: Witness
) -> bool:
    """True iff the witness relation holds exactly and its scale is nonzero."""
    ring = complex_.ring
    if ring.is_zero(witness.scale) or len(witness.coefficients) != j - 1:
        return False
    boundary = complex_.boundary_matrix(ordering.degree)
    target = boundary.column_vector(ordering.permutation[j - 1].index - 1)
    lhs = tuple(ring.mul(witness.scale, x) for x in target)
    rhs = prefix_matrix(complex_, ordering, j).matvec(witness.coefficients)
    return lhs == rhs


def _check_convention(ordering: DegreeOrdering, gamma: set) -> None:
    flags = [e in gamma for e in ordering.permutation]
    if any(flags[i] and not flags[i + 1] for i in range(len(flags) - 1)):
        raise OrderingConventionViolated(
            f"degree-{ordering.degree} ordering puts a maximal element before a non-maximal one"
        )


def _relation(
    complex_: ChainComplex, ordering: DegreeOrdering, j: int
) -> Tuple[ElementTag, Optional[Witness]]:
    matrix = prefix_matrix(complex_, ordering, j)
    element = ordering.permutation[j - 1]
    target = complex_.boundary_matrix(ordering.degree).column_vector(element.index - 1)
    exact = lattice_membership(matrix, target)
    if exact is not None:
        return ElementTag.CRITICAL, Witness(complex_.ring.one, exact)
    scaled = rational_span_membership(matrix, target)
    if scaled is not None:
        return ElementTag.PRECRITICAL, Witness(*scaled)
    return ElementTag.NONCRITICAL, None


# ---------------------------------------------------------------------------
# Public helpers
# ---------------------------------------------------------------------------


def classify_element(complex_: ChainComplex, ordering: DegreeOrdering, j: int) -> ElementClass:
    """Classify the element at 1-based position *j* of *ordering*."""
    ordering.check(complex_)
    if not 1 <= j <= len(ordering.permutation):
        raise IndexOutOfRange(f"position {j} outside 1..{len(ordering.permutation)}")
    if j == 1:
        raise FirstPosition("the first element of an ordering is not classified")
    element = ordering.permutation[j - 1]
    gamma = set(maximal_elements(complex_))
    if element not in gamma:
        raise NotMaximal(f"{element} is not a maximal element")
    _check_convention(ordering, gamma)
    tag, witness = _relation(complex_, ordering, j)
    return ElementClass(element, tag, witness)


def classify_top_degree(complex_: ChainComplex, ordering: DegreeOrdering) -> List[ElementClass]:
    """Classes of every top-degree element; position 1 is noncritical by convention."""
    if complex_.order < 1 or not is_pure(complex_):
        raise ClassificationError("top-degree classification needs a pure complex of order >= 1")
    if ordering.degree != complex_.order:
        raise ClassificationError(f"ordering is on degree {ordering.degree}, not the top degree")
    ordering.check(complex_)
    first = ElementClass(ordering.permutation[0], ElementTag.NONCRITICAL, by_convention=True)
    return [first] + [
        classify_element(complex_, ordering, j) for j in range(2, len(ordering.permutation) + 1)
    ]


def classify_degree(complex_: ChainComplex, degree: int) -> Tuple[DegreeOrdering, List[ElementClass]]:
    """Classify Γ∩Ω_degree under :meth:`DegreeOrdering.canonical`."""
    ordering = DegreeOrdering.canonical(complex_, degree)
    gamma = set(maximal_elements(complex_))
    classes = []
    for j, element in enumerate(ordering.permutation, start=1):
        if element not in gamma:
            continue
        if j == 1:
            classes.append(ElementClass(element, ElementTag.NONCRITICAL, by_convention=True))
        else:
            tag, witness = _relation(complex_, ordering, j)
            classes.append(ElementClass(element, tag, witness))
    return ordering, classes


def precritical_count(classes: Sequence[ElementClass]) -> int:
    """n: critical plus strictly precritical elements."""
    return sum(1 for c in classes if c.is_precritical)


def noncritical_count(classes: Sequence[ElementClass]) -> int:
    return sum(1 for c in classes if not c.is_precritical)


def critical_cycle_basis(complex_: ChainComplex, ordering: DegreeOrdering) -> List[Chain]:
    """Cycles ρ_1 … ρ_n of ker ∂_d with ρ_i(g_j) = δ_ij.

    The g_j are the critical elements.  Noncritical elements are moved to the
    front first (stably), which leaves every class unchanged.
    """
    classes = classify_top_degree(complex_, ordering)
    strict = [c.element for c in classes if c.tag is ElementTag.PRECRITICAL]
    if strict:
        raise StrictlyPrecriticalPresent(
            "strictly precritical elements present: " + ", ".join(map(str, strict))
        )
    noncritical = [c.element for c in classes if c.tag is ElementTag.NONCRITICAL]
    critical = [c.element for c in classes if c.tag is ElementTag.CRITICAL]
    boundary = complex_.boundary_matrix(complex_.order)
    span = boundary.select_columns([e.index - 1 for e in noncritical])
    ring = complex_.ring
    cycles = []
    for g in critical:
        x = lattice_membership(span, boundary.column_vector(g.index - 1))
        if x is None:
            raise ClassificationError(f"{g} is critical but not in the span of the noncritical columns")
        coefficients = {g: ring.one}
        for e, value in zip(noncritical, x):
            coefficients[e] = ring.neg(value)
        cycles.append(Chain(complex_.order, coefficients, ring))
    logger.debug("Critical cycle basis has %d elements", len(cycles))
    return cycles
