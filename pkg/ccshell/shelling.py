"""Shellings: verification, search, monotonization and skeletons.

An ordering g_1, …, g_k of the maximal elements Γ is a shelling when

1. for j ≥ 2, Ω_{g_j} ∩ ⋃_{i<j} Ω_{g_i} generates a pure complex of order
   s(g_j) - 1 (s is the degree),
2. for j ≥ 2, bd(g_j) has a shelling in which the top-degree elements of
   that intersection come first,
3. bd(g_1) has a shelling,

and every complex of order 0 is shelled by any ordering.  A shelling of a set
B of same-degree elements means a shelling of the subcomplex B generates,
whose maximal elements are exactly B.

A :class:`ShellingCertificate` stores the ordering together with one nested
certificate per element of positive degree.  The nested certificates are
independent of each other: two boundaries sharing elements may order them
differently.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from ccshell import config as cfg
from ccshell.complex import (
    BasisElement,
    ChainComplex,
    SubcomplexBasis,
    basis_order,
    closure,
    maximal_elements,
    skeleton,
)
from ccshell.errors import (
    CertificateError,
    IndexOutOfRange,
    InvalidInput,
    MalformedCertificate,
    SearchBudgetExceeded,
)

logger = logging.getLogger(__name__)

Elements = FrozenSet[BasisElement]


@dataclass(frozen=True)
class ShellingCertificate:
    gamma_order: Tuple[BasisElement, ...]
    sub_shellings: Mapping[BasisElement, "ShellingCertificate"] = field(default_factory=dict)


class ViolationKind(str, Enum):
    NOT_PURE = "NotPure"
    WRONG_ORDER = "WrongOrder"
    NO_PREFIX_SUB_SHELLING = "NoPrefixSubShelling"
    EMPTY_INTERSECTION = "EmptyIntersection"


@dataclass(frozen=True)
class ShellingViolation:
    """First failed condition.  ``path`` lists the enclosing elements whose
    boundary shellings contain the failure, outermost first."""

    kind: ViolationKind
    position: int
    degree: int
    offending: Elements = frozenset()
    path: Tuple[BasisElement, ...] = ()

    def describe(self) -> str:
        where = "".join(f"bd({e}) > " for e in self.path)
        offending = ", ".join(str(e) for e in basis_order(self.offending)) or "-"
        return (
            f"{self.kind.value} at {where}position {self.position} "
            f"(degree {self.degree}; elements: {offending})"
        )


# ---------------------------------------------------------------------------
# Shared checks
# ---------------------------------------------------------------------------


class _Closures:
    """Memoized Ω_e lookups for one complex."""

    def __init__(self, complex_: ChainComplex) -> None:
        self.complex = complex_
        self._cache: Dict[BasisElement, Elements] = {}

    def __call__(self, element: BasisElement) -> Elements:
        cached = self._cache.get(element)
        if cached is None:
            cached = closure(self.complex, [element]).elements
            self._cache[element] = cached
        return cached


def _intersection_kind(complex_: ChainComplex, intersection: Elements, degree: int) -> Optional[ViolationKind]:
    """Condition 1 for an element of the given degree."""
    if degree == 0:
        return None if not intersection else ViolationKind.NOT_PURE
    if not intersection:
        return ViolationKind.EMPTY_INTERSECTION
    sub = SubcomplexBasis(intersection)
    if sub.top_degree != degree - 1 or not sub.is_pure_in(complex_):
        return ViolationKind.NOT_PURE
    return None


def shelling_intersections(
    complex_: ChainComplex, order: Sequence[BasisElement]
) -> List[Elements]:
    """Ω_{g_j} ∩ ⋃_{i<j} Ω_{g_i} for every position (empty for j = 1)."""
    omega = _Closures(complex_)
    union: Set[BasisElement] = set()
    out = []
    for g in order:
        out.append(omega(g) & union if union else frozenset())
        union |= omega(g)
    return out


def _top_prefix(intersection: Elements, degree: int) -> Elements:
    return frozenset(e for e in intersection if e.degree == degree - 1)


def _verify(
    complex_: ChainComplex,
    gamma: Elements,
    cert: ShellingCertificate,
    prefix: Elements,
    path: Tuple[BasisElement, ...],
) -> Optional[ShellingViolation]:
    order = tuple(cert.gamma_order)
    if len(set(order)) != len(order) or set(order) != gamma:
        where = "".join(f"bd({e}) > " for e in path)
        raise MalformedCertificate(f"{where}ordering is not a permutation of the maximal elements")
    top = max((e.degree for e in gamma), default=-1)
    if set(order[: len(prefix)]) != prefix:
        return ShellingViolation(ViolationKind.WRONG_ORDER, 1, max(top, 0), prefix, path)
    if top <= 0:
        return None
    if order[0].degree != top:
        return ShellingViolation(ViolationKind.WRONG_ORDER, 1, order[0].degree, frozenset([order[0]]), path)
    intersections = shelling_intersections(complex_, order)
    for j, (g, intersection) in enumerate(zip(order, intersections), start=1):
        if j >= 2:
            kind = _intersection_kind(complex_, intersection, g.degree)
            if kind is not None:
                return ShellingViolation(kind, j, g.degree, intersection, path)
        if g.degree == 0:
            continue
        sub = cert.sub_shellings.get(g)
        if sub is None:
            return ShellingViolation(
                ViolationKind.NO_PREFIX_SUB_SHELLING, j, g.degree, complex_.bd(g), path
            )
        nested = _verify(
            complex_, complex_.bd(g), sub, _top_prefix(intersection, g.degree), path + (g,)
        )
        if nested is not None:
            return nested
    return None


def verify_shelling(complex_: ChainComplex, cert: ShellingCertificate) -> Optional[ShellingViolation]:
    """``None`` if *cert* is a shelling of Γ, else the first violation."""
    gamma = frozenset(maximal_elements(complex_))
    return _verify(complex_, gamma, cert, frozenset(), ())


def verify_boundary_shelling(
    complex_: ChainComplex,
    element: BasisElement,
    cert: ShellingCertificate,
    prefix: Elements = frozenset(),
) -> Optional[ShellingViolation]:
    """Check a shelling of bd(*element*) whose first elements are *prefix*."""
    return _verify(complex_, complex_.bd(element), cert, prefix, (element,))


def failures(cert: ShellingCertificate) -> List[Tuple[int, int]]:
    """Pairs (i, j), i < j, with s(g_i) < s(g_j); 1-based."""
    degrees = [g.degree for g in cert.gamma_order]
    return [
        (i + 1, j + 1)
        for i in range(len(degrees))
        for j in range(i + 1, len(degrees))
        if degrees[i] < degrees[j]
    ]


def is_monotone(cert: ShellingCertificate) -> bool:
    degrees = [g.degree for g in cert.gamma_order]
    return all(a >= b for a, b in zip(degrees, degrees[1:]))


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


class ShellingSearch:
    """Depth-first search for shellings of element sets with prefix constraints.

    Results are memoized per ``(element set, prefix set)``.  Within one such
    subproblem, an extension that failed from a given set of placed elements
    fails from every ordering of that set (condition 1 and the sub-shelling
    prefixes only see the union of what is placed), so dead placed-sets are
    remembered as well.
    """

    def __init__(self, complex_: ChainComplex, budget: int | None = None) -> None:
        self.complex = complex_
        self.budget = cfg.resolve_budget(budget)
        self.nodes = 0
        self.omega = _Closures(complex_)
        self._memo: Dict[Tuple[Elements, Elements], Optional[ShellingCertificate]] = {}

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise SearchBudgetExceeded(self.budget)

    def solve(self, gamma: Elements, prefix: Elements = frozenset()) -> Optional[ShellingCertificate]:
        """A shelling of *gamma* starting with *prefix*, or ``None``."""
        if prefix == gamma:
            prefix = frozenset()
        key = (gamma, prefix)
        if key not in self._memo:
            self._memo[key] = self._solve(gamma, prefix)
        return self._memo[key]

    def candidates(
        self, gamma: Elements, prefix: Elements, placed: Sequence[BasisElement], union: Elements
    ) -> List[BasisElement]:
        pool = prefix if len(placed) < len(prefix) else gamma - prefix
        pool = pool - set(placed)
        return sorted(pool, key=lambda g: (-g.degree, -len(self.omega(g) & union), g.index))

    def sub_shelling(
        self, g: BasisElement, union: Elements, first: bool
    ) -> Tuple[bool, Optional[ShellingCertificate]]:
        """Check conditions 1-3 for placing *g*; returns (ok, sub-certificate)."""
        intersection = self.omega(g) & union
        if not first and _intersection_kind(self.complex, intersection, g.degree) is not None:
            return False, None
        if g.degree == 0:
            return True, None
        sub = self.solve(self.complex.bd(g), _top_prefix(intersection, g.degree))
        return sub is not None, sub

    def _solve(self, gamma: Elements, prefix: Elements) -> Optional[ShellingCertificate]:
        top = max((e.degree for e in gamma), default=-1)
        if top <= 0:
            order = basis_order(prefix) + basis_order(gamma - prefix)
            return ShellingCertificate(tuple(order), {})
        dead: Set[Elements] = set()
        placed: List[BasisElement] = []
        subs: Dict[BasisElement, ShellingCertificate] = {}

        def extend(union: Elements) -> bool:
            if len(placed) == len(gamma):
                return True
            state = frozenset(placed)
            if state in dead:
                return False
            for g in self.candidates(gamma, prefix, placed, union):
                if not placed and g.degree != top:
                    continue
                self.tick()
                ok, sub = self.sub_shelling(g, union, first=not placed)
                if not ok:
                    continue
                placed.append(g)
                if sub is not None:
                    subs[g] = sub
                if extend(union | self.omega(g)):
                    return True
                placed.pop()
                subs.pop(g, None)
            dead.add(state)
            return False

        if not extend(frozenset()):
            return None
        return ShellingCertificate(tuple(placed), dict(subs))

    def enumerate(
        self,
        gamma: Elements,
        prefix: Elements = frozenset(),
        accept: Optional[Callable[[Tuple[BasisElement, ...], BasisElement], bool]] = None,
    ) -> Iterator[ShellingCertificate]:
        """Every shelling order of *gamma* starting with *prefix*, in search order.

        ``accept(placed, g)`` may veto placing *g* after *placed*.  Nested
        sub-shellings are the memoized ones, so each order is yielded once.
        Order-0 sets yield a single order.
        """
        if prefix == gamma:
            prefix = frozenset()
        top = max((e.degree for e in gamma), default=-1)
        if top <= 0:
            order = tuple(basis_order(prefix) + basis_order(gamma - prefix))
            if accept is None or all(accept(order[:i], g) for i, g in enumerate(order)):
                yield ShellingCertificate(order, {})
            return
        placed: List[BasisElement] = []
        subs: Dict[BasisElement, ShellingCertificate] = {}

        def extend(union: Elements) -> Iterator[ShellingCertificate]:
            if len(placed) == len(gamma):
                yield ShellingCertificate(tuple(placed), dict(subs))
                return
            for g in self.candidates(gamma, prefix, placed, union):
                if not placed and g.degree != top:
                    continue
                if accept is not None and not accept(tuple(placed), g):
                    continue
                self.tick()
                ok, sub = self.sub_shelling(g, union, first=not placed)
                if not ok:
                    continue
                placed.append(g)
                if sub is not None:
                    subs[g] = sub
                yield from extend(union | self.omega(g))
                placed.pop()
                subs.pop(g, None)

        yield from extend(frozenset())

    def assemble(
        self,
        order: Sequence[BasisElement],
        candidates: Mapping[BasisElement, Optional[ShellingCertificate]],
    ) -> Optional[ShellingCertificate]:
        """Certificate for a fixed Γ-order, reusing *candidates* where they fit.

        A candidate sub-shelling is kept when it verifies against the prefix
        the new order demands; otherwise that one boundary is searched again.
        Condition 1 is not checked here.
        """
        subs: Dict[BasisElement, ShellingCertificate] = {}
        for g, intersection in zip(order, shelling_intersections(self.complex, order)):
            if g.degree == 0:
                continue
            prefix = _top_prefix(intersection, g.degree)
            candidate = candidates.get(g)
            if candidate is not None:
                try:
                    if _verify(self.complex, self.complex.bd(g), candidate, prefix, (g,)) is None:
                        subs[g] = candidate
                        continue
                except MalformedCertificate:
                    pass
                logger.warning("Re-deriving the boundary shelling of %s", g)
            sub = self.solve(self.complex.bd(g), prefix)
            if sub is None:
                return None
            subs[g] = sub
        return ShellingCertificate(tuple(order), subs)


def search_shelling(complex_: ChainComplex, budget: int | None = None) -> Optional[ShellingCertificate]:
    """A shelling certificate, or ``None`` when provably none exists.

    Raises
    ------
    SearchBudgetExceeded
        When the node budget runs out first.
    """
    search = ShellingSearch(complex_, budget)
    gamma = frozenset(maximal_elements(complex_))
    cert = search.solve(gamma)
    logger.info(
        "Shelling search: %s after %d nodes", "found" if cert else "none exists", search.nodes
    )
    return cert


def shelling_for_order(
    complex_: ChainComplex, order: Sequence[BasisElement], budget: int | None = None
) -> ShellingCertificate:
    """Certificate for a fixed Γ-order with searched boundary shellings.

    Boundaries that admit no shelling with the required prefix are left out,
    so :func:`verify_shelling` reports them as ``NoPrefixSubShelling``.
    """
    search = ShellingSearch(complex_, budget)
    subs: Dict[BasisElement, ShellingCertificate] = {}
    for g, intersection in zip(order, shelling_intersections(complex_, order)):
        if g.degree == 0 or g not in complex_:
            continue
        sub = search.solve(complex_.bd(g), _top_prefix(intersection, g.degree))
        if sub is not None:
            subs[g] = sub
    return ShellingCertificate(tuple(order), subs)


# ---------------------------------------------------------------------------
# Monotonization and skeletons
# ---------------------------------------------------------------------------


def _require_valid(complex_: ChainComplex, cert: ShellingCertificate) -> None:
    try:
        violation = verify_shelling(complex_, cert)
    except MalformedCertificate as exc:
        raise InvalidInput(str(exc)) from exc
    if violation is not None:
        raise InvalidInput(f"not a shelling: {violation.describe()}")


def monotonize_steps(
    complex_: ChainComplex, cert: ShellingCertificate, budget: int | None = None
) -> Iterator[ShellingCertificate]:
    """Yield the certificate after each adjacent swap until no failures remain.

    Each step swaps g_{i0} and g_{i0+1} for the smallest i0 with
    s(g_{i0}) < s(g_{i0+1}); the failure count drops by exactly one.
    """
    _require_valid(complex_, cert)
    search = ShellingSearch(complex_, budget)
    current = cert
    while True:
        order = list(current.gamma_order)
        i0 = next(
            (i for i in range(len(order) - 1) if order[i].degree < order[i + 1].degree), None
        )
        if i0 is None:
            return
        order[i0], order[i0 + 1] = order[i0 + 1], order[i0]
        swapped = search.assemble(order, current.sub_shellings)
        if swapped is None or verify_shelling(complex_, swapped) is not None:
            raise InvalidInput(f"swapping positions {i0 + 1} and {i0 + 2} broke the shelling")
        current = swapped
        yield current


def monotonize(
    complex_: ChainComplex, cert: ShellingCertificate, budget: int | None = None
) -> ShellingCertificate:
    """A monotonically descending shelling obtained from *cert* by adjacent swaps."""
    result = cert
    steps = 0
    for result in monotonize_steps(complex_, cert, budget):
        steps += 1
    logger.info("Monotonized shelling in %d swaps", steps)
    return result


def _skeleton_step(
    complex_: ChainComplex, cert: ShellingCertificate, search: ShellingSearch
) -> ShellingCertificate:
    """From a monotone shelling of C (order t ≥ 1) to one of sk_{t-1}(C)."""
    top = complex_.order
    lower = skeleton(complex_, top - 1)
    order: List[BasisElement] = []
    candidates: Dict[BasisElement, Optional[ShellingCertificate]] = {}
    seen: Set[BasisElement] = set()
    for e in cert.gamma_order:
        if e.degree != top:
            continue
        sub = cert.sub_shellings[e]
        for f in sub.gamma_order:
            if f not in seen:
                seen.add(f)
                order.append(f)
                candidates[f] = sub.sub_shellings.get(f)
    for g in cert.gamma_order:
        if g.degree < top:
            order.append(g)
            candidates[g] = cert.sub_shellings.get(g)
    lower_search = ShellingSearch(lower, search.budget)
    built = lower_search.assemble(order, candidates)
    if built is None or verify_shelling(lower, built) is not None:
        logger.warning("Segment construction failed for the %d-skeleton; searching", top - 1)
        built = lower_search.solve(frozenset(maximal_elements(lower)))
        if built is None:
            raise CertificateError(f"the {top - 1}-skeleton has no shelling")
    return built


def skeleton_shelling(
    complex_: ChainComplex, cert: ShellingCertificate, i: int, budget: int | None = None
) -> ShellingCertificate:
    """A shelling of sk_i(C) built from a monotone shelling of C.

    Ω_ν is laid out segment by segment: bd(e^{ν+1}_1) in its shelling order,
    then the new elements of bd(e^{ν+1}_2) in theirs, and so on, followed by
    the maximal elements of degree ν and below in Γ-order.
    """
    _require_valid(complex_, cert)
    if not is_monotone(cert):
        raise InvalidInput("skeleton shellings need a monotonically descending shelling")
    if not 0 <= i <= complex_.order:
        raise IndexOutOfRange(f"skeleton degree {i} outside 0..{complex_.order}")
    search = ShellingSearch(complex_, budget)
    current, current_complex = cert, complex_
    for top in range(complex_.order, i, -1):
        current = _skeleton_step(current_complex, current, search)
        current_complex = skeleton(complex_, top - 1)
    return current
