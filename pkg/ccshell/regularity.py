"""Regular and totally regular orders.

A regular order starts from a monotonically descending shelling of Γ and
lays out every Ω_ν segment by segment: bd(e^{ν+1}_1) in the order of its
boundary shelling, then the new elements of bd(e^{ν+1}_2), and so on, with
Γ∩Ω_ν last in Γ-order.  Two conditions must hold:

1. a maximal element whose boundary set is covered by the boundary sets of
   the elements before it in Ω_ν is precritical there;
2. each bd(e^ν_ℓ) has a shelling in which the degree-(ν-1) part of
   ⋃_{i<ℓ} Ω_{e^ν_i} ∩ Ω_{e^ν_ℓ} comes first, and every covered f_j of that
   shelling satisfies c_j·∂f_j = Σ_{i<j} c_i·∂f_i with c_j ≠ 0.

Covered means ⊆; the relation is checked exactly and stored as a
:class:`~ccshell.classification.Witness` keyed by ``(element, None)`` for
condition 1 and ``(element, f)`` for condition 2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from ccshell.classification import Witness
from ccshell.complex import (
    BasisElement,
    ChainComplex,
    generated_subcomplex,
    maximal_elements,
    restrict,
    skeleton,
)
from ccshell.errors import IndexOutOfRange, InvalidCertificate, InvalidInput, MalformedCertificate
from ccshell.homology import FGModule, is_acyclic
from ccshell.linalg import rational_span_membership
from ccshell.shelling import (
    ShellingCertificate,
    ShellingSearch,
    is_monotone,
    verify_boundary_shelling,
    verify_shelling,
)

logger = logging.getLogger(__name__)

WitnessKey = Tuple[BasisElement, Optional[BasisElement]]

CONDITIONS = ("shelling", "monotone", "ordering", "boundary-shelling", "condition-1", "condition-2")


@dataclass(frozen=True)
class RegularOrderCertificate:
    shelling: ShellingCertificate
    degree_orderings: Mapping[int, Tuple[BasisElement, ...]]
    boundary_shellings: Mapping[BasisElement, ShellingCertificate]
    witnesses: Mapping[WitnessKey, Witness] = field(default_factory=dict)

    @property
    def gamma_order(self) -> Tuple[BasisElement, ...]:
        return tuple(self.shelling.gamma_order)

    @property
    def boundary_orderings(self) -> Dict[BasisElement, Tuple[BasisElement, ...]]:
        return {e: tuple(s.gamma_order) for e, s in self.boundary_shellings.items()}


@dataclass(frozen=True)
class RegularityViolation:
    condition: str
    element: Optional[BasisElement] = None
    detail: str = ""

    def describe(self) -> str:
        where = f" at {self.element}" if self.element is not None else ""
        return f"{self.condition}{where}: {self.detail}" if self.detail else f"{self.condition}{where}"


# ---------------------------------------------------------------------------
# Relations
# ---------------------------------------------------------------------------


def _covered(complex_: ChainComplex, element: BasisElement, earlier: Iterable[BasisElement]) -> bool:
    union = set()
    for e in earlier:
        union |= complex_.bd(e)
    return complex_.bd(element) <= union


def find_witness(
    complex_: ChainComplex, prefix: Sequence[BasisElement], element: BasisElement
) -> Optional[Witness]:
    """``a·∂e = Σ c_i·∂prefix_i`` with ``a ≠ 0``, or ``None``."""
    ring = complex_.ring
    boundary = complex_.boundary_matrix(element.degree)
    target = boundary.column_vector(element.index - 1)
    if all(ring.is_zero(x) for x in target):
        return Witness(ring.one, tuple(ring.zero for _ in prefix))
    if not prefix:
        return None
    matrix = boundary.select_columns([e.index - 1 for e in prefix])
    found = rational_span_membership(matrix, target)
    return None if found is None else Witness(*found)


def witness_holds(
    complex_: ChainComplex, prefix: Sequence[BasisElement], element: BasisElement, witness: Witness
) -> bool:
    ring = complex_.ring
    if ring.is_zero(witness.scale) or len(witness.coefficients) != len(prefix):
        return False
    boundary = complex_.boundary_matrix(element.degree)
    lhs = tuple(ring.mul(witness.scale, x) for x in boundary.column_vector(element.index - 1))
    if not prefix:
        return all(ring.is_zero(x) for x in lhs)
    rhs = boundary.select_columns([e.index - 1 for e in prefix]).matvec(witness.coefficients)
    return lhs == rhs


def special_ordering(
    degree: int,
    upper_order: Sequence[BasisElement],
    boundary_shellings: Mapping[BasisElement, ShellingCertificate],
    gamma_order: Sequence[BasisElement],
) -> Tuple[BasisElement, ...]:
    """Ω_degree laid out segment by segment from the boundary shellings above."""
    seen = set()
    out: List[BasisElement] = []
    for e in upper_order:
        for f in boundary_shellings[e].gamma_order:
            if f not in seen:
                seen.add(f)
                out.append(f)
    out.extend(g for g in gamma_order if g.degree == degree and g not in seen)
    return tuple(out)


def _boundary_prefixes(
    complex_: ChainComplex, order: Sequence[BasisElement], search: ShellingSearch
) -> Dict[BasisElement, FrozenSet[BasisElement]]:
    """The elements that must open each boundary shelling of one degree."""
    union: FrozenSet[BasisElement] = frozenset()
    out = {}
    for e in order:
        out[e] = frozenset(f for f in search.omega(e) & union if f.degree == e.degree - 1)
        union = union | search.omega(e)
    return out


def _condition_one(
    complex_: ChainComplex, order: Sequence[BasisElement], gamma: FrozenSet[BasisElement]
) -> Tuple[Optional[BasisElement], Dict[WitnessKey, Witness]]:
    """First failing maximal element of one degree ordering, and the witnesses found."""
    witnesses: Dict[WitnessKey, Witness] = {}
    for position, e in enumerate(order):
        if e not in gamma or not _covered(complex_, e, order[:position]):
            continue
        witness = find_witness(complex_, order[:position], e)
        if witness is None:
            return e, witnesses
        witnesses[(e, None)] = witness
    return None, witnesses


def _condition_two_witnesses(
    complex_: ChainComplex, element: BasisElement, boundary_order: Sequence[BasisElement]
) -> Tuple[Optional[BasisElement], Dict[WitnessKey, Witness]]:
    witnesses: Dict[WitnessKey, Witness] = {}
    for j, f in enumerate(boundary_order):
        if not _covered(complex_, f, boundary_order[:j]):
            continue
        witness = find_witness(complex_, boundary_order[:j], f)
        if witness is None:
            return f, witnesses
        witnesses[(element, f)] = witness
    return None, witnesses


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


def verify_regular(complex_: ChainComplex, cert: RegularOrderCertificate) -> Optional[RegularityViolation]:
    """``None`` if *cert* is a regular order, else the first violated condition.

    Raises
    ------
    MalformedCertificate
        When an ordering or boundary shelling is missing or not a permutation.
    """
    shelling_violation = verify_shelling(complex_, cert.shelling)
    if shelling_violation is not None:
        return RegularityViolation("shelling", None, shelling_violation.describe())
    if not is_monotone(cert.shelling):
        return RegularityViolation("monotone", None, "the shelling of Γ has failures")

    d = complex_.order
    gamma_order = cert.gamma_order
    gamma = frozenset(gamma_order)
    search = ShellingSearch(complex_)
    for nu in range(d, -1, -1):
        if nu not in cert.degree_orderings:
            raise MalformedCertificate(f"no ordering for degree {nu}")
        order = tuple(cert.degree_orderings[nu])
        if nu == d:
            expected = tuple(g for g in gamma_order if g.degree == d)
        else:
            upper = tuple(cert.degree_orderings[nu + 1])
            missing = [e for e in upper if e not in cert.boundary_shellings]
            if missing:
                raise MalformedCertificate(f"no boundary shelling for {missing[0]}")
            expected = special_ordering(nu, upper, cert.boundary_shellings, gamma_order)
        if order != expected:
            return RegularityViolation("ordering", None, f"degree-{nu} ordering is not the segment ordering")

    for nu in range(d, 0, -1):
        order = tuple(cert.degree_orderings[nu])
        prefixes = _boundary_prefixes(complex_, order, search)
        for e in order:
            violation = verify_boundary_shelling(complex_, e, cert.boundary_shellings[e], prefixes[e])
            if violation is not None:
                return RegularityViolation("boundary-shelling", e, violation.describe())

    for nu in range(d, -1, -1):
        order = tuple(cert.degree_orderings[nu])
        for position, e in enumerate(order):
            if e not in gamma or not _covered(complex_, e, order[:position]):
                continue
            witness = cert.witnesses.get((e, None))
            if witness is None or not witness_holds(complex_, order[:position], e, witness):
                return RegularityViolation(
                    "condition-1", e, "boundary set is covered but no precritical relation holds"
                )

    for nu in range(d, 0, -1):
        for e in cert.degree_orderings[nu]:
            boundary_order = tuple(cert.boundary_shellings[e].gamma_order)
            for j, f in enumerate(boundary_order):
                if not _covered(complex_, f, boundary_order[:j]):
                    continue
                witness = cert.witnesses.get((e, f))
                if witness is None or not witness_holds(complex_, boundary_order[:j], f, witness):
                    return RegularityViolation(
                        "condition-2", e, f"{f} is covered in bd({e}) but no relation holds"
                    )
    return None


# ---------------------------------------------------------------------------
# Construction and search
# ---------------------------------------------------------------------------


def _canonical_ordering(
    complex_: ChainComplex, degree: int, gamma_order: Sequence[BasisElement]
) -> Tuple[BasisElement, ...]:
    """Non-maximal elements in basis order, then Γ∩Ω_degree in Γ-order.

    Condition 1 only sees the set of earlier columns, so any ordering of the
    non-maximal block gives the same verdict.
    """
    gamma = set(gamma_order)
    return tuple(e for e in complex_.basis(degree) if e not in gamma) + tuple(
        g for g in gamma_order if g.degree == degree
    )


def _complete(
    complex_: ChainComplex, shelling: ShellingCertificate, search: ShellingSearch
) -> Union[RegularOrderCertificate, RegularityViolation]:
    d = complex_.order
    gamma_order = tuple(shelling.gamma_order)
    gamma = frozenset(gamma_order)

    for nu in range(d, -1, -1):
        failing, _ = _condition_one(complex_, _canonical_ordering(complex_, nu, gamma_order), gamma)
        if failing is not None:
            return RegularityViolation(
                "condition-1", failing, "boundary set is covered but the element is not precritical"
            )

    orderings: Dict[int, Tuple[BasisElement, ...]] = {d: tuple(g for g in gamma_order if g.degree == d)}
    chosen: Dict[BasisElement, ShellingCertificate] = {}
    obstruction: List[BasisElement] = []

    def related(placed: Tuple[BasisElement, ...], f: BasisElement) -> bool:
        if not _covered(complex_, f, placed):
            return True
        return find_witness(complex_, placed, f) is not None

    def descend(nu: int) -> bool:
        if nu == 0:
            return True
        order = orderings[nu]
        prefixes = _boundary_prefixes(complex_, order, search)

        def choose(position: int) -> bool:
            if position == len(order):
                orderings[nu - 1] = special_ordering(nu - 1, order, chosen, gamma_order)
                if descend(nu - 1):
                    return True
                del orderings[nu - 1]
                return False
            e = order[position]
            tried = False
            for candidate in search.enumerate(complex_.bd(e), prefixes[e], related):
                tried = True
                chosen[e] = candidate
                if choose(position + 1):
                    return True
            chosen.pop(e, None)
            if not tried and not obstruction:
                obstruction.append(e)
            return False

        return choose(0)

    if not descend(d):
        element = obstruction[0] if obstruction else None
        return RegularityViolation(
            "condition-2", element, "no boundary shelling satisfies the coverage relations"
        )

    witnesses: Dict[WitnessKey, Witness] = {}
    for nu in range(d, -1, -1):
        _, found = _condition_one(complex_, orderings[nu], gamma)
        witnesses.update(found)
    for e, boundary in chosen.items():
        _, found = _condition_two_witnesses(complex_, e, boundary.gamma_order)
        witnesses.update(found)
    return RegularOrderCertificate(shelling, dict(orderings), dict(chosen), witnesses)


def complete_regular_order(
    complex_: ChainComplex, shelling: ShellingCertificate, budget: int | None = None
) -> Union[RegularOrderCertificate, RegularityViolation]:
    """Extend a shelling of Γ to a full regular-order certificate.

    The boundary shellings are searched degree by degree from the top.
    Returns the first obstruction when no extension exists.

    Raises
    ------
    SearchBudgetExceeded
        When the node budget runs out.
    """
    violation = verify_shelling(complex_, shelling)
    if violation is not None:
        return RegularityViolation("shelling", None, violation.describe())
    if not is_monotone(shelling):
        return RegularityViolation("monotone", None, "the shelling of Γ has failures")
    return _complete(complex_, shelling, ShellingSearch(complex_, budget))


def search_regular(complex_: ChainComplex, budget: int | None = None) -> Optional[RegularOrderCertificate]:
    """A regular-order certificate, or ``None`` when provably none exists.

    Monotone shellings of Γ are enumerated with condition 1 checked at each
    placement; each one is handed to :func:`complete_regular_order`.
    """
    search = ShellingSearch(complex_, budget)
    gamma = frozenset(maximal_elements(complex_))
    non_maximal = {
        nu: tuple(e for e in complex_.basis(nu) if e not in gamma) for nu in range(complex_.order + 1)
    }

    def accept(placed: Tuple[BasisElement, ...], g: BasisElement) -> bool:
        if placed and g.degree > placed[-1].degree:
            return False
        earlier = non_maximal[g.degree] + tuple(e for e in placed if e.degree == g.degree)
        if not _covered(complex_, g, earlier):
            return True
        return find_witness(complex_, earlier, g) is not None

    tried = 0
    for shelling in search.enumerate(gamma, frozenset(), accept):
        tried += 1
        outcome = _complete(complex_, shelling, search)
        if isinstance(outcome, RegularOrderCertificate):
            logger.info("Regular order found after %d shellings, %d nodes", tried, search.nodes)
            return outcome
        logger.debug("Shelling %d is not regular: %s", tried, outcome.describe())
    logger.info("No regular order: %d shellings tried, %d nodes", tried, search.nodes)
    return None


# ---------------------------------------------------------------------------
# Totally regular complexes
# ---------------------------------------------------------------------------


def first_non_acyclic_subcomplex(complex_: ChainComplex) -> Optional[BasisElement]:
    """The first e (descending degree) whose C_e is not acyclic, or ``None``."""
    for nu in range(complex_.order, -1, -1):
        for e in complex_.basis(nu):
            if not is_acyclic(restrict(complex_, generated_subcomplex(complex_, e))):
                return e
    return None


def is_totally_regular(complex_: ChainComplex, cert: RegularOrderCertificate) -> bool:
    """True iff *cert* is regular and every C_e is acyclic.

    Raises
    ------
    InvalidCertificate
        When *cert* does not verify.
    """
    try:
        violation = verify_regular(complex_, cert)
    except MalformedCertificate as exc:
        raise InvalidCertificate(str(exc)) from exc
    if violation is not None:
        raise InvalidCertificate(f"not a regular order: {violation.describe()}")
    offending = first_non_acyclic_subcomplex(complex_)
    if offending is not None:
        logger.info("C_%s is not acyclic", offending)
    return offending is None


def skeleton_regular(
    complex_: ChainComplex, cert: RegularOrderCertificate, i: int, budget: int | None = None
) -> RegularOrderCertificate:
    """A regular-order certificate for sk_i(C) built from one for C.

    Γ of the skeleton is taken in the order Ω_i | Γ∩Ω_{<i}; the boundary
    shellings of *cert* are reused where they fit.
    """
    violation = verify_regular(complex_, cert)
    if violation is not None:
        raise InvalidInput(f"not a regular order: {violation.describe()}")
    if not 0 <= i <= complex_.order:
        raise IndexOutOfRange(f"skeleton degree {i} outside 0..{complex_.order}")
    if i == complex_.order:
        return cert
    lower = skeleton(complex_, i)
    search = ShellingSearch(lower, budget)
    order = tuple(cert.degree_orderings[i]) + tuple(g for g in cert.gamma_order if g.degree < i)
    shelling = search.assemble(order, cert.boundary_shellings)
    if shelling is not None and verify_shelling(lower, shelling) is None:
        outcome = _complete(lower, shelling, search)
        if isinstance(outcome, RegularOrderCertificate):
            return outcome
        logger.warning("Induced order on the %d-skeleton is not regular: %s", i, outcome.describe())
    else:
        logger.warning("Induced order on the %d-skeleton is not a shelling; searching", i)
    found = search_regular(lower, search.budget)
    if found is None:
        raise InvalidCertificate(f"the {i}-skeleton has no regular order")
    return found


def expected_totally_regular_homology(
    complex_: ChainComplex, cert: RegularOrderCertificate
) -> List[FGModule]:
    """Free ranks (n_0 + 1, n_1, …, n_d) predicted for a totally regular complex.

    n_ν counts the precritical maximal elements of Ω_ν in the certificate's
    degree ordering; the first position is noncritical by convention.
    """
    gamma = frozenset(cert.gamma_order)
    counts = []
    for nu in range(complex_.order + 1):
        order = tuple(cert.degree_orderings[nu])
        counts.append(
            sum(
                1
                for position, e in enumerate(order)
                if e in gamma and position > 0 and find_witness(complex_, order[:position], e) is not None
            )
        )
    ring = complex_.ring
    return [FGModule(counts[0] + 1, (), ring)] + [FGModule(n, (), ring) for n in counts[1:]]
