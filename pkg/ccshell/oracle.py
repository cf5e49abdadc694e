"""Independent oracles and random complexes for cross-checking.

Nothing here shares code with the searches it checks:
:func:`brute_shellings` enumerates every ordering and every nested ordering,
and :func:`dense_homology_oracle` reads homology off ranks and invariant
factors computed by sympy.  :func:`generate` produces seeded complexes and
:func:`fuzz` runs both sides over many of them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, permutations, product
from typing import FrozenSet, Iterator, List, Sequence, Tuple

import numpy as np
import pandas as pd
from sympy import GF, Matrix, Rational
from sympy import ZZ as SYMPY_ZZ
from sympy.matrices.normalforms import invariant_factors
from sympy.polys.matrices import DomainMatrix

from ccshell import config as cfg
from ccshell.complex import (
    BasisElement,
    ChainComplex,
    complex_from_matrices,
    from_simplicial,
    is_pure,
    skeleton,
)
from ccshell.cones import search_cone
from ccshell.errors import SearchBudgetExceeded, TooLarge
from ccshell.homology import FGModule, homology, is_acyclic
from ccshell.regularity import expected_totally_regular_homology, is_totally_regular, search_regular
from ccshell.rings import INTEGERS, PRIME_FIELD, ZZ, RingSpec
from ccshell.shelling import (
    ShellingCertificate,
    failures,
    is_monotone,
    monotonize_steps,
    search_shelling,
    skeleton_shelling,
    verify_shelling,
)

logger = logging.getLogger(__name__)

Elements = FrozenSet[BasisElement]


# ---------------------------------------------------------------------------
# Brute-force shellings
# ---------------------------------------------------------------------------


def _closure(complex_: ChainComplex, element: BasisElement) -> Elements:
    out = {element}
    frontier = [element]
    while frontier:
        e = frontier.pop()
        for f in complex_.bd(e):
            if f not in out:
                out.add(f)
                frontier.append(f)
    return frozenset(out)


def _generates_pure(complex_: ChainComplex, elements: Elements, order: int) -> bool:
    if order < 0:
        return not elements
    if not elements or max(e.degree for e in elements) != order:
        return False
    covered = set()
    for e in elements:
        covered |= complex_.bd(e)
    return all(e.degree == order or e in covered for e in elements)


def _orders(gamma: Elements, prefix: Elements) -> Iterator[Tuple[BasisElement, ...]]:
    rest = sorted(gamma - prefix, key=lambda e: e.key)
    for head in permutations(sorted(prefix, key=lambda e: e.key)):
        for tail in permutations(rest):
            yield head + tail


def _all_shellings(
    complex_: ChainComplex, gamma: Elements, prefix: Elements
) -> Iterator[ShellingCertificate]:
    top = max((e.degree for e in gamma), default=-1)
    for order in _orders(gamma, prefix):
        if top <= 0:
            yield ShellingCertificate(order, {})
            continue
        if order[0].degree != top:
            continue
        union: set = set()
        intersections = []
        for j, g in enumerate(order):
            omega = _closure(complex_, g)
            meet = frozenset(omega & union)
            if j > 0 and not _generates_pure(complex_, meet, g.degree - 1):
                break
            intersections.append(meet)
            union |= omega
        else:
            positive = [(g, meet) for g, meet in zip(order, intersections) if g.degree > 0]
            choices = [
                list(
                    _all_shellings(
                        complex_, complex_.bd(g), frozenset(e for e in meet if e.degree == g.degree - 1)
                    )
                )
                for g, meet in positive
            ]
            for combo in product(*choices):
                yield ShellingCertificate(order, {g: sub for (g, _), sub in zip(positive, combo)})


def _check_brute_size(complex_: ChainComplex) -> Elements:
    gamma = frozenset(e for e in complex_.elements() if not complex_.cofaces(e))
    total = sum(complex_.rank_profile())
    if len(gamma) > cfg.BRUTE_MAX_GAMMA or total > cfg.BRUTE_MAX_BASIS:
        raise TooLarge(
            f"brute force needs |Γ| <= {cfg.BRUTE_MAX_GAMMA} and at most "
            f"{cfg.BRUTE_MAX_BASIS} basis elements, got {len(gamma)} and {total}"
        )
    return gamma


def iter_brute_shellings(complex_: ChainComplex) -> Iterator[ShellingCertificate]:
    """Every shelling certificate, nested orderings included, lazily."""
    gamma = _check_brute_size(complex_)
    return _all_shellings(complex_, gamma, frozenset())


def brute_shellings(complex_: ChainComplex) -> List[ShellingCertificate]:
    """All shelling certificates of *complex_* by exhaustive enumeration.

    Raises
    ------
    TooLarge
        Above :data:`~ccshell.config.BRUTE_MAX_GAMMA` maximal elements or
        :data:`~ccshell.config.BRUTE_MAX_BASIS` basis elements.
    """
    return list(iter_brute_shellings(complex_))


def brute_shellable(complex_: ChainComplex) -> bool:
    return next(iter_brute_shellings(complex_), None) is not None


# ---------------------------------------------------------------------------
# Dense homology
# ---------------------------------------------------------------------------


def _sympy_matrix(rows: Sequence[Sequence]) -> Matrix:
    return Matrix([[Rational(x.numerator, x.denominator) if hasattr(x, "denominator") else x for x in row] for row in rows])


def _dense_rank(complex_: ChainComplex, degree: int) -> int:
    matrix = complex_.boundary_matrix(degree)
    if matrix.rows == 0 or matrix.cols == 0:
        return 0
    ring = complex_.ring
    if ring.kind == PRIME_FIELD:
        field_ = GF(ring.p)
        rows = [[field_(int(x)) for x in row] for row in matrix.to_lists()]
        return int(DomainMatrix(rows, (matrix.rows, matrix.cols), field_).rank())
    return int(_sympy_matrix(matrix.to_lists()).rank())


def _dense_torsion(complex_: ChainComplex, degree: int) -> Tuple[int, ...]:
    matrix = complex_.boundary_matrix(degree)
    if complex_.ring.kind != INTEGERS or matrix.rows == 0 or matrix.cols == 0:
        return ()
    factors = invariant_factors(Matrix(matrix.to_lists()), domain=SYMPY_ZZ)
    return tuple(sorted(abs(int(f)) for f in factors if abs(int(f)) > 1))


def dense_homology_oracle(complex_: ChainComplex) -> List[FGModule]:
    """H_0 … H_d from dense ranks and sympy invariant factors.

    rank H_ν = k_ν - rank ∂_ν - rank ∂_{ν+1}; the torsion of H_ν is that of
    coker ∂_{ν+1}, since ker ∂_ν is a direct summand of C_ν.
    """
    total = sum(complex_.rank_profile())
    if total > cfg.DENSE_ORACLE_MAX_BASIS:
        raise TooLarge(f"dense oracle handles at most {cfg.DENSE_ORACLE_MAX_BASIS} basis elements, got {total}")
    ranks = [_dense_rank(complex_, nu) for nu in range(complex_.order + 2)]
    out = []
    for nu, k in enumerate(complex_.rank_profile()):
        free = k - ranks[nu] - ranks[nu + 1]
        out.append(FGModule(free, _dense_torsion(complex_, nu + 1), complex_.ring))
    return out


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


class GeneratorSource(str, Enum):
    RANDOM_BOUNDARY = "RandomBoundary"
    RANDOM_SIMPLICIAL = "RandomSimplicial"
    SHIFTED_COMPLEX = "ShiftedComplex"


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    source: GeneratorSource = GeneratorSource.RANDOM_SIMPLICIAL
    max_order: int = 2
    max_cells: int = 4
    coefficient_range: Tuple[int, int] = cfg.GENERATOR_COEFFICIENT_RANGE
    ensure_pure: bool = False
    max_vertices: int = cfg.GENERATOR_MAX_VERTICES
    vertices: int | None = None
    ring: RingSpec = field(default=ZZ)


def _vertex_count(rng: np.random.Generator, config: GeneratorConfig, low: int) -> int:
    if config.vertices is not None:
        return config.vertices
    high = max(low, config.max_vertices)
    return int(rng.integers(low, high + 1))


def _random_facets(rng: np.random.Generator, config: GeneratorConfig) -> List[Tuple[int, ...]]:
    n = _vertex_count(rng, config, 2)
    count = int(rng.integers(1, config.max_cells + 1))
    facets = []
    for _ in range(count):
        size = int(rng.integers(1, min(config.max_order + 1, n) + 1))
        facets.append(tuple(sorted(int(v) + 1 for v in rng.choice(n, size=size, replace=False))))
    if config.ensure_pure:
        top = max(len(f) for f in facets)
        facets = [f for f in facets if len(f) == top]
    return facets


def _shifted_facets(rng: np.random.Generator, config: GeneratorConfig) -> List[Tuple[int, ...]]:
    n = _vertex_count(rng, config, config.max_order + 1)
    size = min(config.max_order + 1, n)
    candidates = list(combinations(range(1, n + 1), size))
    picks = rng.choice(len(candidates), size=int(rng.integers(1, 3)), replace=True)
    generators = [candidates[int(i)] for i in picks]
    # The shifted closure: every face dominated entrywise by a generator.
    return [t for t in candidates if any(all(a <= b for a, b in zip(t, g)) for g in generators)]


def _perturb(rng: np.random.Generator, config: GeneratorConfig, base: ChainComplex) -> ChainComplex:
    """Unimodular change of basis inside each degree.

    e'_j = e_j + q·e_i turns column j of ∂_ν into col_j + q·col_i and row i
    of ∂_{ν+1} into row_i - q·row_j, so ∂∘∂ = 0 is kept exactly.
    """
    mats = [base.boundary_matrix(nu).to_dense() for nu in range(1, base.order + 1)]
    low, high = config.coefficient_range
    choices = [q for q in range(low, high + 1) if q != 0] or [1]
    for nu in range(base.order + 1):
        k = len(base.basis(nu))
        if k < 2:
            continue
        for _ in range(cfg.GENERATOR_PERTURBATION_STEPS):
            i, j = (int(x) for x in rng.choice(k, size=2, replace=False))
            q = int(rng.choice(choices))
            if nu >= 1:
                mats[nu - 1][:, j] = mats[nu - 1][:, j] + q * mats[nu - 1][:, i]
            if nu < base.order:
                mats[nu][i, :] = mats[nu][i, :] - q * mats[nu][j, :]
    return complex_from_matrices([m.tolist() for m in mats], base.ring, k0=len(base.basis(0)))


def generate(config: GeneratorConfig) -> ChainComplex:
    """A seeded random complex; the same config always gives the same complex."""
    rng = np.random.default_rng(config.seed)
    source = GeneratorSource(config.source)
    if source is GeneratorSource.SHIFTED_COMPLEX:
        complex_ = from_simplicial(_shifted_facets(rng, config))
    elif source is GeneratorSource.RANDOM_SIMPLICIAL:
        complex_ = from_simplicial(_random_facets(rng, config))
    else:
        base = from_simplicial(_random_facets(rng, config))
        complex_ = base
        for attempt in range(10):
            candidate = _perturb(rng, config, base)
            if not config.ensure_pure or is_pure(candidate):
                complex_ = candidate
                break
            logger.debug("Perturbation %d lost purity; resampling", attempt)
    if config.ring != ZZ:
        complex_ = complex_.over(config.ring)
    logger.debug("Generated %s complex with ranks %s", source.value, complex_.rank_profile())
    return complex_


# ---------------------------------------------------------------------------
# Fuzzing
# ---------------------------------------------------------------------------


def _check_instance(complex_: ChainComplex, budget: int | None) -> List[Tuple[str, bool, str]]:
    results: List[Tuple[str, bool, str]] = []
    groups = homology(complex_)
    results.append(("homology", groups == dense_homology_oracle(complex_), ""))

    shelling = search_shelling(complex_, budget)
    try:
        brute = brute_shellable(complex_)
    except TooLarge:
        pass
    else:
        results.append(("shellable", (shelling is not None) == brute, ""))

    if shelling is not None:
        before = len(failures(shelling))
        ok = True
        for step in monotonize_steps(complex_, shelling, budget):
            after = len(failures(step))
            ok = ok and after == before - 1 and verify_shelling(complex_, step) is None
            before = after
            shelling = step
        results.append(("monotonize", ok and before == 0, ""))
        if is_monotone(shelling):
            ok = all(
                verify_shelling(skeleton(complex_, i), skeleton_shelling(complex_, shelling, i, budget)) is None
                for i in range(complex_.order)
            )
            results.append(("skeleton", ok, ""))

    cone = search_cone(complex_, budget)
    if cone is not None:
        results.append(("cone-acyclic", is_acyclic(complex_), ""))

    if shelling is not None:
        regular = search_regular(complex_, budget)
        if regular is not None and is_totally_regular(complex_, regular):
            predicted = expected_totally_regular_homology(complex_, regular)
            results.append(("totally-regular-homology", predicted == groups, str(predicted)))
    return results


def fuzz(count: int, seed: int = 0, budget: int | None = None) -> pd.DataFrame:
    """Run the oracle checks on *count* generated complexes.

    Returns one row per check with columns ``seed, source, check, ok, detail``.
    Instances whose searches exhaust the budget are recorded with check
    ``budget`` and ``ok`` True.
    """
    sources = list(GeneratorSource)
    rows = []
    for i in range(count):
        source = sources[i % len(sources)]
        config = GeneratorConfig(seed=seed + i, source=source, max_order=2, max_cells=3, max_vertices=5)
        complex_ = generate(config)
        try:
            checks = _check_instance(complex_, budget)
        except SearchBudgetExceeded as exc:
            checks = [("budget", True, str(exc))]
        for check, ok, detail in checks:
            rows.append(
                {"seed": seed + i, "source": source.value, "check": check, "ok": bool(ok), "detail": detail}
            )
    table = pd.DataFrame(rows, columns=["seed", "source", "check", "ok", "detail"])
    bad = int((~table["ok"]).sum()) if not table.empty else 0
    logger.info("Fuzzed %d instances: %d checks, %d disagreements", count, len(table), bad)
    return table
