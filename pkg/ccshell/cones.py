"""Cones: distinguished subsets S_ν with unit fill-in witnesses.

(C, Ω) is a cone when there are nonempty S_ν ⊆ Ω_ν (1 ≤ ν ≤ d) with

* 1(a) no element of S_ν has its boundary support inside the union of the
  others' (for ν = d, where S_d = Ω_d, this is read as ∂_d injective),
* 1(b) every e_k ∉ S_ν has τ_k ∈ C_{ν+1} with ∂τ_k = c·e_k + r, c a unit and
  r ∈ ⟨S_ν⟩,

together with

* 2 |bd(σ)| ≥ 2 for every σ ∈ C_1 outside ker ∂_1, and
* 3 a single S_0 = {e} such that every other vertex e_k has τ_k ∈ C_1 with
  ∂τ_k = c·e_k + c_0·e, c a unit and c_0 ≠ 0.

Every cone is acyclic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterator, Mapping, Optional, Union

from ccshell import config as cfg
from ccshell.complex import BasisElement, Chain, ChainComplex, basis_order, maximal_elements
from ccshell.errors import DanglingReference, SearchBudgetExceeded
from ccshell.homology import min_boundary_support
from ccshell.linalg import rank, solve_in_quotient

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConeAssignment:
    sets: Mapping[int, FrozenSet[BasisElement]]
    witnesses: Mapping[BasisElement, Chain] = field(default_factory=dict)

    @property
    def apex(self) -> Optional[BasisElement]:
        """The single element of S_0."""
        s0 = self.sets.get(0, frozenset())
        return next(iter(s0)) if len(s0) == 1 else None


@dataclass(frozen=True)
class ConeViolation:
    condition: str
    degree: Optional[int] = None
    element: Optional[BasisElement] = None
    detail: str = ""

    def describe(self) -> str:
        where = []
        if self.degree is not None:
            where.append(f"degree {self.degree}")
        if self.element is not None:
            where.append(str(self.element))
        location = f" ({', '.join(where)})" if where else ""
        return f"condition {self.condition}{location}: {self.detail}"


# ---------------------------------------------------------------------------
# Conditions
# ---------------------------------------------------------------------------


def _structure(complex_: ChainComplex, assign: ConeAssignment) -> Optional[ConeViolation]:
    for nu in range(complex_.order + 1):
        chosen = assign.sets.get(nu)
        if chosen is None:
            return ConeViolation("structure", nu, None, "no set given")
        stray = [e for e in chosen if e not in complex_ or e.degree != nu]
        if stray:
            return ConeViolation("structure", nu, stray[0], "not a basis element of this degree")
        if nu == 0 and len(chosen) != 1:
            return ConeViolation("structure", 0, None, f"S_0 has {len(chosen)} elements, not 1")
        if nu >= 1 and not chosen:
            return ConeViolation("structure", nu, None, "empty set")
    return None


def _independent_supports(
    complex_: ChainComplex, degree: int, chosen: FrozenSet[BasisElement]
) -> Optional[BasisElement]:
    """First element of *chosen* violating 1(a), or ``None``."""
    if degree == complex_.order:
        boundary = complex_.boundary_matrix(degree)
        if rank(boundary) < boundary.cols:
            return basis_order(chosen)[0]
        return None
    for e in basis_order(chosen):
        others = set()
        for f in chosen:
            if f != e:
                others |= complex_.bd(f)
        if complex_.bd(e) <= others:
            return e
    return None


def _fill_in(
    complex_: ChainComplex, element: BasisElement, kill: FrozenSet[BasisElement]
) -> Optional[Chain]:
    """τ with ∂τ = e + r and r supported on *kill*, or ``None``."""
    degree = element.degree
    if degree >= complex_.order:
        return None
    matrix = complex_.boundary_matrix(degree + 1)
    target = [0] * matrix.rows
    target[element.index - 1] = 1
    solved = solve_in_quotient(matrix, target, [e.index - 1 for e in kill], True)
    if solved is None:
        return None
    _, x = solved
    return complex_.chain_from_vector(degree + 1, x)


def _check_fill_in(
    complex_: ChainComplex, element: BasisElement, kill: FrozenSet[BasisElement], tau: Chain
) -> Optional[str]:
    """Reason the witness τ fails, or ``None``."""
    ring = complex_.ring
    if tau.degree != element.degree + 1:
        return f"witness has degree {tau.degree}, expected {element.degree + 1}"
    if any(e not in complex_ for e in tau.coefficients):
        return "witness references unknown basis elements"
    image = complex_.boundary(tau)
    if not ring.is_unit(image[element]):
        return f"coefficient {image[element]} of {element} is not a unit"
    stray = [e for e in image.coefficients if e != element and e not in kill]
    if stray:
        return f"remainder leaves the span of S at {stray[0]}"
    if element.degree == 0 and all(ring.is_zero(image[e]) for e in kill):
        return "c_0 is zero"
    return None


def verify_cone(complex_: ChainComplex, assign: ConeAssignment) -> Optional[ConeViolation]:
    """``None`` if *assign* makes C a cone, else the first violated condition.

    Conditions are checked in the order structure, 1a, 1b, 2, 3.
    """
    violation = _structure(complex_, assign)
    if violation is not None:
        return violation
    d = complex_.order
    for nu in range(1, d + 1):
        offending = _independent_supports(complex_, nu, assign.sets[nu])
        if offending is not None:
            detail = (
                "the top boundary map is not injective"
                if nu == d
                else "boundary support covered by the other elements of S"
            )
            return ConeViolation("1a", nu, offending, detail)
    for nu in range(1, d + 1):
        chosen = assign.sets[nu]
        for e in complex_.basis(nu):
            if e in chosen:
                continue
            tau = assign.witnesses.get(e)
            if tau is None:
                return ConeViolation("1b", nu, e, "no fill-in witness")
            reason = _check_fill_in(complex_, e, chosen, tau)
            if reason is not None:
                return ConeViolation("1b", nu, e, reason)
    if min_boundary_support(complex_) < 2:
        return ConeViolation("2", 1, None, "some chain outside ker d_1 has a single-element boundary")
    apex = assign.sets[0]
    for e in complex_.basis(0):
        if e in apex:
            continue
        tau = assign.witnesses.get(e)
        if tau is None:
            return ConeViolation("3", 0, e, "no fill-in witness")
        reason = _check_fill_in(complex_, e, apex, tau)
        if reason is not None:
            return ConeViolation("3", 0, e, reason)
    return None


def assign_cone(
    complex_: ChainComplex, sets: Mapping[int, FrozenSet[BasisElement]]
) -> Union[ConeAssignment, ConeViolation]:
    """Derive witnesses for *sets* and verify the result."""
    candidate = ConeAssignment({nu: frozenset(s) for nu, s in sets.items()}, {})
    violation = _structure(complex_, candidate)
    if violation is not None:
        return violation
    witnesses: Dict[BasisElement, Chain] = {}
    for nu, chosen in candidate.sets.items():
        for e in complex_.basis(nu):
            if e in chosen:
                continue
            tau = _fill_in(complex_, e, chosen)
            if tau is not None:
                witnesses[e] = tau
    assignment = ConeAssignment(candidate.sets, witnesses)
    violation = verify_cone(complex_, assignment)
    return assignment if violation is None else violation


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


def _candidate_sets(
    complex_: ChainComplex, degree: int, forced: FrozenSet[BasisElement]
) -> Iterator[FrozenSet[BasisElement]]:
    free = [e for e in complex_.basis(degree) if e not in forced]
    for size in range(len(free) + 1):
        if not forced and size == 0:
            continue
        for extra in combinations(free, size):
            yield forced | frozenset(extra)


def _fill_in_all(
    complex_: ChainComplex, degree: int, chosen: FrozenSet[BasisElement]
) -> Optional[Dict[BasisElement, Chain]]:
    out = {}
    for e in complex_.basis(degree):
        if e in chosen:
            continue
        tau = _fill_in(complex_, e, chosen)
        if tau is None or _check_fill_in(complex_, e, chosen, tau) is not None:
            return None
        out[e] = tau
    return out


def search_cone(complex_: ChainComplex, budget: int | None = None) -> Optional[ConeAssignment]:
    """A cone assignment, or ``None`` when provably none exists.

    The degrees are independent of each other, so each S_ν is chosen on its
    own: smallest sets first, then basis order, always containing Γ∩Ω_ν.
    """
    limit = cfg.resolve_budget(budget)
    nodes = 0
    d = complex_.order
    if min_boundary_support(complex_) < 2:
        logger.info("Not a cone: condition 2 fails")
        return None
    gamma = frozenset(maximal_elements(complex_))
    sets: Dict[int, FrozenSet[BasisElement]] = {}
    witnesses: Dict[BasisElement, Chain] = {}
    for nu in range(d, 0, -1):
        forced = frozenset(e for e in complex_.basis(nu) if e in gamma)
        found = False
        for chosen in _candidate_sets(complex_, nu, forced):
            nodes += 1
            if nodes > limit:
                raise SearchBudgetExceeded(limit)
            if _independent_supports(complex_, nu, chosen) is not None:
                continue
            fills = _fill_in_all(complex_, nu, chosen)
            if fills is None:
                continue
            sets[nu] = chosen
            witnesses.update(fills)
            found = True
            break
        if not found:
            logger.info("Not a cone: no admissible S_%d (%d nodes)", nu, nodes)
            return None
    for e in complex_.basis(0):
        nodes += 1
        if nodes > limit:
            raise SearchBudgetExceeded(limit)
        fills = _fill_in_all(complex_, 0, frozenset([e]))
        if fills is not None:
            sets[0] = frozenset([e])
            witnesses.update(fills)
            logger.info("Cone assignment found after %d nodes", nodes)
            return ConeAssignment(sets, witnesses)
    logger.info("Not a cone: no admissible S_0 (%d nodes)", nodes)
    return None


def simplicial_cone_assignment(
    complex_: ChainComplex, apex: str
) -> Union[ConeAssignment, ConeViolation]:
    """The assignment S_ν = {ν-faces containing *apex*} for simplicial input.

    Faces are recognized by their ``{v0,v1,…}`` labels.
    """
    vertex = apex.strip("{}")

    def contains_apex(e: BasisElement) -> bool:
        return vertex in str(e).strip("{}").split(",")

    sets = {
        nu: frozenset(e for e in complex_.basis(nu) if contains_apex(e))
        for nu in range(complex_.order + 1)
    }
    if not sets[0]:
        raise DanglingReference(f"no vertex labelled {apex!r}")
    return assign_cone(complex_, sets)
