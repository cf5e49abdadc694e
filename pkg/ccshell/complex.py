"""Finite chain complexes with a fixed ordered basis.

A :class:`ChainComplex` stores, for every degree ν, the ordered basis Ω_ν and
the boundary ∂_ν as a sparse matrix whose column j holds the coordinates of
∂_ν(e^ν_j).  Everything else in this module is combinatorics on top of that:
supports, boundary sets ``bd``, generated subcomplexes ``C_e``, skeletons,
purity and maximal elements.

Complexes are immutable.  Reordering a basis is never done in place; the
orderings used by classification, shelling and regularity live next to the
complex, not inside it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import (
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

from ccshell.errors import (
    BoundaryConditionViolated,
    ComplexError,
    DanglingReference,
    EmptyInput,
    EmptyTopDegree,
    IndexOutOfRange,
)
from ccshell.linalg import SparseIntMatrix
from ccshell.rings import ZZ, RingSpec, Scalar

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Basis elements, chains, subcomplex bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BasisElement:
    """The basis element e^ν_j.  Identity is ``(degree, index)``."""

    degree: int
    index: int
    label: Optional[str] = field(default=None, compare=False)

    def __str__(self) -> str:
        return self.label if self.label is not None else f"e{self.degree}_{self.index}"

    @property
    def key(self) -> Tuple[int, int]:
        return (self.degree, self.index)


def basis_order(elements: Iterable[BasisElement]) -> List[BasisElement]:
    """Sort by degree, then by position in Ω_ν."""
    return sorted(elements, key=lambda e: e.key)


def descending_order(elements: Iterable[BasisElement]) -> List[BasisElement]:
    """Sort by descending degree, then by position in Ω_ν."""
    return sorted(elements, key=lambda e: (-e.degree, e.index))


@dataclass(frozen=True)
class Chain:
    """A chain ``Σ a_i e^ν_i``; only nonzero coefficients are stored."""

    degree: int
    coefficients: Mapping[BasisElement, Scalar] = field(default_factory=dict)
    ring: RingSpec = ZZ

    def __post_init__(self) -> None:
        cleaned: Dict[BasisElement, Scalar] = {}
        for element, value in self.coefficients.items():
            if element.degree != self.degree:
                raise ComplexError(
                    f"{element} of degree {element.degree} in a degree-{self.degree} chain"
                )
            value = self.ring.normalize(value)
            if value != 0:
                cleaned[element] = value
        object.__setattr__(self, "coefficients", cleaned)

    def __getitem__(self, element: BasisElement) -> Scalar:
        """The coefficient ρ(e)."""
        return self.coefficients.get(element, self.ring.zero)

    def __add__(self, other: "Chain") -> "Chain":
        self._check_compatible(other)
        merged = dict(self.coefficients)
        for element, value in other.coefficients.items():
            merged[element] = merged.get(element, self.ring.zero) + value
        return Chain(self.degree, merged, self.ring)

    def __sub__(self, other: "Chain") -> "Chain":
        return self + other.scale(-1)

    def scale(self, factor: Scalar) -> "Chain":
        return Chain(
            self.degree, {e: v * factor for e, v in self.coefficients.items()}, self.ring
        )

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    def _check_compatible(self, other: "Chain") -> None:
        if other.degree != self.degree or other.ring != self.ring:
            raise ComplexError("chains of different degree or ring")

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        terms = []
        for element in basis_order(self.coefficients):
            value = self.coefficients[element]
            terms.append(str(element) if value == 1 else f"{value}*{element}")
        return " + ".join(terms).replace("+ -", "- ")


@dataclass(frozen=True)
class SubcomplexBasis:
    """A set of basis elements, downward closed under ``bd`` when built by
    :func:`generated_subcomplex` or :func:`closure`."""

    elements: FrozenSet[BasisElement] = frozenset()

    def __contains__(self, element: object) -> bool:
        return element in self.elements

    def __iter__(self) -> Iterator[BasisElement]:
        return iter(basis_order(self.elements))

    def __len__(self) -> int:
        return len(self.elements)

    def __or__(self, other: "SubcomplexBasis") -> "SubcomplexBasis":
        return SubcomplexBasis(self.elements | other.elements)

    def __and__(self, other: "SubcomplexBasis") -> "SubcomplexBasis":
        return SubcomplexBasis(self.elements & other.elements)

    def __sub__(self, other: "SubcomplexBasis") -> "SubcomplexBasis":
        return SubcomplexBasis(self.elements - other.elements)

    @property
    def top_degree(self) -> int:
        """Highest degree present, -1 for the empty set."""
        return max((e.degree for e in self.elements), default=-1)

    def at(self, degree: int) -> Tuple[BasisElement, ...]:
        return tuple(basis_order(e for e in self.elements if e.degree == degree))

    def is_downward_closed(self, complex_: "ChainComplex") -> bool:
        return all(complex_.bd(e) <= self.elements for e in self.elements)

    def is_pure_in(self, complex_: "ChainComplex") -> bool:
        """True iff the set generates a pure complex of order :attr:`top_degree`.

        The empty set counts as the pure complex of order -1.
        """
        top = self.top_degree
        covered = set()
        for e in self.elements:
            covered |= complex_.bd(e)
        return all(e.degree == top or e in covered for e in self.elements)


# ---------------------------------------------------------------------------
# Chain complexes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainComplex:
    """Finite chain complex of order ``d`` with fixed bases.

    ``bases[ν]`` is Ω_ν and ``boundaries[ν - 1]`` is ∂_ν, a
    ``k_{ν-1} x k_ν`` matrix.  Construction checks shapes, indices and
    ``∂_ν ∘ ∂_{ν+1} = 0``.
    """

    ring: RingSpec
    bases: Tuple[Tuple[BasisElement, ...], ...]
    boundaries: Tuple[SparseIntMatrix, ...]

    def __post_init__(self) -> None:
        if not self.bases or not self.bases[-1]:
            raise EmptyTopDegree("the top degree of a complex needs at least one basis element")
        for nu, basis in enumerate(self.bases):
            for j, element in enumerate(basis, start=1):
                if element.degree != nu or element.index != j:
                    raise ComplexError(f"basis element {element} misplaced at e{nu}_{j}")
        if len(self.boundaries) != self.order:
            raise ComplexError(
                f"order {self.order} complex needs {self.order} boundary matrices, "
                f"got {len(self.boundaries)}"
            )
        for nu, matrix in enumerate(self.boundaries, start=1):
            expected = (len(self.bases[nu - 1]), len(self.bases[nu]))
            if (matrix.rows, matrix.cols) != expected:
                raise ComplexError(
                    f"d_{nu} has shape {matrix.rows}x{matrix.cols}, expected "
                    f"{expected[0]}x{expected[1]}"
                )
            if matrix.ring != self.ring:
                raise ComplexError(f"d_{nu} is over {matrix.ring}, complex over {self.ring}")
        for nu in range(1, self.order):
            product = self.boundaries[nu - 1].matmul(self.boundaries[nu])
            if not product.is_zero:
                column = min(j for _, j in product.entries)
                raise BoundaryConditionViolated(nu, column + 1)

    # -- shape ------------------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.bases) - 1

    def rank_profile(self) -> Tuple[int, ...]:
        """``(k_0, …, k_d)``."""
        return tuple(len(b) for b in self.bases)

    def basis(self, degree: int) -> Tuple[BasisElement, ...]:
        if 0 <= degree <= self.order:
            return self.bases[degree]
        return ()

    def elements(self) -> Iterator[BasisElement]:
        for basis in self.bases:
            yield from basis

    def __contains__(self, element: object) -> bool:
        if not isinstance(element, BasisElement):
            return False
        return 1 <= element.index <= len(self.basis(element.degree))

    def element(self, degree: int, index: int) -> BasisElement:
        basis = self.basis(degree)
        if not 1 <= index <= len(basis):
            raise IndexOutOfRange(f"no basis element e{degree}_{index}")
        return basis[index - 1]

    def find(self, label: str, degree: int | None = None) -> BasisElement:
        """Look a basis element up by label (or by its ``e{ν}_{j}`` name)."""
        matches = [
            e for e in self.elements()
            if (degree is None or e.degree == degree) and label in (e.label, f"e{e.degree}_{e.index}")
        ]
        if not matches:
            raise DanglingReference(f"no basis element labelled {label!r}")
        labelled = [e for e in matches if e.label == label]
        if len(labelled) == 1:
            return labelled[0]
        if len(matches) > 1:
            raise DanglingReference(f"label {label!r} is ambiguous across degrees")
        return matches[0]

    def euler_characteristic(self) -> int:
        return sum((-1) ** nu * k for nu, k in enumerate(self.rank_profile()))

    # -- boundaries -------------------------------------------------------------

    def boundary_matrix(self, degree: int) -> SparseIntMatrix:
        """∂_degree; the zero map outside ``1 ≤ degree ≤ d``."""
        if 1 <= degree <= self.order:
            return self.boundaries[degree - 1]
        rows = len(self.basis(degree - 1))
        return SparseIntMatrix.zeros(rows, len(self.basis(degree)), self.ring)

    def boundary_of(self, element: BasisElement) -> Chain:
        """∂ e as a chain of degree ``deg(e) - 1``."""
        degree = element.degree
        if degree == 0:
            return Chain(-1, {}, self.ring)
        column = self.boundaries[degree - 1].column(element.index - 1)
        lower = self.bases[degree - 1]
        return Chain(degree - 1, {lower[i]: v for i, v in column.items()}, self.ring)

    def boundary(self, chain: Chain) -> Chain:
        result = Chain(chain.degree - 1, {}, self.ring)
        for element, value in chain.coefficients.items():
            result = result + self.boundary_of(element).scale(value)
        return result

    @cached_property
    def _bd_sets(self) -> Dict[BasisElement, FrozenSet[BasisElement]]:
        out: Dict[BasisElement, FrozenSet[BasisElement]] = {e: frozenset() for e in self.bases[0]}
        for nu in range(1, self.order + 1):
            matrix, lower = self.boundaries[nu - 1], self.bases[nu - 1]
            for element in self.bases[nu]:
                out[element] = frozenset(lower[i] for i in matrix.column(element.index - 1))
        return out

    @cached_property
    def _cofaces(self) -> Dict[BasisElement, FrozenSet[BasisElement]]:
        out: Dict[BasisElement, set] = {e: set() for e in self.elements()}
        for element, faces in self._bd_sets.items():
            for face in faces:
                out[face].add(element)
        return {e: frozenset(s) for e, s in out.items()}

    def bd(self, element: BasisElement) -> FrozenSet[BasisElement]:
        """bd(e): the support of ∂e."""
        return self._bd_sets[element]

    def cofaces(self, element: BasisElement) -> FrozenSet[BasisElement]:
        """All f with e ∈ bd(f)."""
        return self._cofaces[element]

    # -- coordinates ------------------------------------------------------------

    def chain_from_vector(self, degree: int, vector: Sequence[Scalar]) -> Chain:
        basis = self.basis(degree)
        return Chain(degree, {e: v for e, v in zip(basis, vector)}, self.ring)

    def vector_of(self, chain: Chain) -> Tuple[Scalar, ...]:
        return tuple(chain[e] for e in self.basis(chain.degree))

    def over(self, ring: RingSpec) -> "ChainComplex":
        """The same complex with its coefficients read in *ring*."""
        return ChainComplex(ring, self.bases, tuple(m.over(ring) for m in self.boundaries))


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def _make_bases(labels: Sequence[Sequence[Optional[str]]]) -> Tuple[Tuple[BasisElement, ...], ...]:
    return tuple(
        tuple(BasisElement(nu, j, label) for j, label in enumerate(degree_labels, start=1))
        for nu, degree_labels in enumerate(labels)
    )


def build_complex(
    ring: RingSpec,
    bases: Sequence[Sequence[Optional[str]]],
    boundary_entries: Iterable[Tuple[int, int, int, Scalar]],
) -> ChainComplex:
    """Build and validate a complex.

    Parameters
    ----------
    ring:
        Coefficient ring.
    bases:
        One list of (optional) labels per degree ``0 … d``.
    boundary_entries:
        ``(degree, col_index, row_index, scalar)`` with 1-based indices: the
        coefficient of e^{ν-1}_row in ∂_ν(e^ν_col).  Repeated positions add up.

    Raises
    ------
    EmptyTopDegree, DanglingReference, InvalidScalar, BoundaryConditionViolated
    """
    if not bases or not bases[-1]:
        raise EmptyTopDegree("the top degree of a complex needs at least one basis element")
    order = len(bases) - 1
    sizes = [len(b) for b in bases]
    entries: List[Dict[Tuple[int, int], Scalar]] = [{} for _ in range(order)]
    for degree, col, row, scalar in boundary_entries:
        if not 1 <= degree <= order:
            raise DanglingReference(f"boundary entry in degree {degree} of an order-{order} complex")
        if not 1 <= col <= sizes[degree]:
            raise DanglingReference(f"no basis element e{degree}_{col}")
        if not 1 <= row <= sizes[degree - 1]:
            raise DanglingReference(f"no basis element e{degree - 1}_{row}")
        key = (row - 1, col - 1)
        target = entries[degree - 1]
        target[key] = ring.add(target.get(key, ring.zero), ring.normalize(scalar))
    matrices = tuple(
        SparseIntMatrix(sizes[nu - 1], sizes[nu], entries[nu - 1], ring)
        for nu in range(1, order + 1)
    )
    complex_ = ChainComplex(ring, _make_bases(bases), matrices)
    logger.debug("Built complex of order %d with ranks %s", order, complex_.rank_profile())
    return complex_


def complex_from_matrices(
    matrices: Sequence[Sequence[Sequence[Scalar]]],
    ring: RingSpec = ZZ,
    k0: int | None = None,
    labels: Sequence[Sequence[Optional[str]]] | None = None,
) -> ChainComplex:
    """Build a complex from dense boundary matrices, ``matrices[ν-1]`` = ∂_ν.

    *k0* gives the number of degree-0 elements for an order-0 complex (or
    overrides an empty first matrix).
    """
    if not matrices:
        if not k0:
            raise EmptyInput("an order-0 complex needs k0 >= 1")
        sizes = [k0]
    else:
        sizes = [k0 if k0 is not None else len(matrices[0])]
        for matrix in matrices:
            sizes.append(len(matrix[0]) if matrix else 0)
    entries = [
        (nu, j + 1, i + 1, value)
        for nu, matrix in enumerate(matrices, start=1)
        for i, row in enumerate(matrix)
        for j, value in enumerate(row)
        if value != 0
    ]
    if labels is None:
        labels = [[None] * k for k in sizes]
    return build_complex(ring, labels, entries)


# ---------------------------------------------------------------------------
# Combinatorial structure
# ---------------------------------------------------------------------------


def support(chain: Chain) -> FrozenSet[BasisElement]:
    """supp(x): basis elements with nonzero coefficient."""
    return frozenset(chain.coefficients)


def boundary_support(complex_: ChainComplex, chain: Chain) -> FrozenSet[BasisElement]:
    """bd(x) = supp(∂x); empty for degree-0 chains."""
    if chain.degree <= 0:
        return frozenset()
    return support(complex_.boundary(chain))


def closure(complex_: ChainComplex, elements: Iterable[BasisElement]) -> SubcomplexBasis:
    """Downward closure of *elements* under ``bd``."""
    seen = set()
    stack = list(elements)
    while stack:
        element = stack.pop()
        if element in seen:
            continue
        seen.add(element)
        stack.extend(complex_.bd(element) - seen)
    return SubcomplexBasis(frozenset(seen))


def generated_subcomplex(complex_: ChainComplex, element: BasisElement) -> SubcomplexBasis:
    """Ω_e, the basis of the subcomplex C_e generated by *element*."""
    if element not in complex_:
        raise DanglingReference(f"{element} is not a basis element of this complex")
    return closure(complex_, [element])


def maximal_in(complex_: ChainComplex, elements: Iterable[BasisElement]) -> List[BasisElement]:
    """Elements of the set lying in no ``bd`` of another set member."""
    pool = set(elements)
    covered = set()
    for e in pool:
        covered |= complex_.bd(e)
    return descending_order(pool - covered)


def maximal_elements(complex_: ChainComplex) -> List[BasisElement]:
    """Γ, in descending degree then basis order."""
    return [e for e in descending_order(complex_.elements()) if not complex_.cofaces(e)]


def is_pure(complex_: ChainComplex) -> bool:
    top = complex_.order
    return all(e.degree == top for e in maximal_elements(complex_))


def skeleton(complex_: ChainComplex, i: int) -> ChainComplex:
    """sk_i(C): everything up to degree *i*."""
    if not 0 <= i <= complex_.order:
        raise IndexOutOfRange(f"skeleton degree {i} outside 0..{complex_.order}")
    if i == complex_.order:
        return complex_
    return ChainComplex(complex_.ring, complex_.bases[: i + 1], complex_.boundaries[:i])


def restrict(complex_: ChainComplex, sub: SubcomplexBasis) -> ChainComplex:
    """The subcomplex with basis *sub* as a standalone complex.

    Degrees are kept, indices renumbered in basis order, labels carried over.
    """
    if not sub.is_downward_closed(complex_):
        raise ComplexError("restrict needs a downward-closed basis set")
    order = sub.top_degree
    if order < 0:
        raise EmptyTopDegree("cannot restrict to the empty basis set")
    kept = [sub.at(nu) for nu in range(order + 1)]
    positions = [{e: i for i, e in enumerate(layer)} for layer in kept]
    entries = []
    for nu in range(1, order + 1):
        for col, element in enumerate(kept[nu], start=1):
            for face, value in complex_.boundary_of(element).coefficients.items():
                entries.append((nu, col, positions[nu - 1][face] + 1, value))
    labels = [[str(e) for e in layer] for layer in kept]
    return build_complex(complex_.ring, labels, entries)


def from_simplicial(facets: Iterable[Iterable[Hashable]]) -> ChainComplex:
    """Simplicial chain complex over ℤ of the complex generated by *facets*.

    Faces of each dimension are ordered lexicographically by their sorted
    vertex tuples and labelled ``{v0,v1,…}``; ∂[v_0…v_k] = Σ (-1)^i [… v̂_i …].
    """
    simplices = [tuple(sorted(set(f))) for f in facets]
    if not simplices or any(not s for s in simplices):
        raise EmptyInput("from_simplicial needs at least one nonempty facet")
    faces = set()
    for simplex in simplices:
        for size in range(1, len(simplex) + 1):
            faces.update(combinations(simplex, size))
    order = max(len(s) for s in simplices) - 1
    layers = [sorted(f for f in faces if len(f) == nu + 1) for nu in range(order + 1)]
    index = [{face: j for j, face in enumerate(layer, start=1)} for layer in layers]
    entries = []
    for nu in range(1, order + 1):
        for col, face in enumerate(layers[nu], start=1):
            for i in range(len(face)):
                sub_face = face[:i] + face[i + 1:]
                entries.append((nu, col, index[nu - 1][sub_face], (-1) ** i))
    labels = [["{" + ",".join(str(v) for v in face) + "}" for face in layer] for layer in layers]
    return build_complex(ZZ, labels, entries)
