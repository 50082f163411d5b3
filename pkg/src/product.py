"""
Cartesian products of digital images and exact existence decisions for the
product adjacency structures: normal, C-compatible, AP_u / AP_u*, G_{k*} and C_{k*}.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import combinations
from itertools import product as cartesian
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .image import DigitalImage, ImageLike, as_image
from .lattice import LatticeAdjacency, Point, box_pairs, check_parameters, lattice_adjacent, lattice_neighborhood

logger = logging.getLogger(__name__)

RELATED_NOT_ADJACENT = "related_not_adjacent"
ADJACENT_NOT_RELATED = "adjacent_not_related"


class ArityError(ValueError):
    """Raised when a product kind is requested for the wrong number of factors."""


class NoAdjacencyError(ValueError):
    """Raised when an operation needs a product adjacency that does not exist."""


class ProductKind(Enum):
    NORMAL = "normal"
    C_COMPATIBLE = "c_compatible"
    AP = "ap"

    @classmethod
    def parse(cls, value) -> 'ProductKind':
        if isinstance(value, cls):
            return value
        normalized = str(value).strip().lower().replace('-', '_')
        for kind in cls:
            if kind.value == normalized:
                return kind
        raise ValueError(f"Unknown product kind '{value}'. Choose from: {[k.value for k in cls]}")


@dataclass(frozen=True)
class ProductSpace:
    """Ordered product of v >= 2 digital images inside Z^{n_1 + ... + n_v}."""
    factors: Tuple[DigitalImage, ...]

    @property
    def v(self) -> int:
        return len(self.factors)

    @cached_property
    def block_bounds(self) -> Tuple[Tuple[int, int], ...]:
        bounds = []
        start = 0
        for factor in self.factors:
            bounds.append((start, start + factor.dim))
            start += factor.dim
        return tuple(bounds)

    @property
    def dim(self) -> int:
        return self.block_bounds[-1][1]

    @cached_property
    def points(self) -> Tuple[Point, ...]:
        # Factors are sorted, so the concatenated tuples come out in lexicographic order.
        return tuple(
            sum(components, ()) for components in cartesian(*(f.points for f in self.factors))
        )

    @cached_property
    def point_set(self) -> FrozenSet[Point]:
        return frozenset(self.points)

    def __contains__(self, p) -> bool:
        return tuple(p) in self.point_set

    def __len__(self) -> int:
        return len(self.points)

    def split(self, p: Point) -> Tuple[Point, ...]:
        """Factor components of a product point."""
        return tuple(p[start:end] for start, end in self.block_bounds)

    def moved_factors(self, p: Point, q: Point) -> Optional[int]:
        """
        Number of factors on which p and q differ, or None when some differing
        factor components are not adjacent in that factor.
        """
        moved = 0
        for factor, (start, end) in zip(self.factors, self.block_bounds):
            x, y = p[start:end], q[start:end]
            if x == y:
                continue
            if not lattice_adjacent(x, y, factor.t):
                return None
            moved += 1
        return moved

    def describe(self) -> str:
        return " x ".join(f"({len(f)} pts, k={f.k})" for f in self.factors) + f" in Z^{self.dim}"


def product(factors: Sequence[ImageLike]) -> ProductSpace:
    """
    Materialize the product of v >= 2 digital images.

    Raises:
        ArityError: If fewer than two factors are given
    """
    if len(factors) < 2:
        raise ArityError(f"A product needs at least two factors, got {len(factors)}")
    prod = ProductSpace(tuple(as_image(f) for f in factors))
    logger.debug(f"Built product {prod.describe()} with {len(prod)} points")
    return prod


@dataclass(frozen=True)
class PairRelation:
    """A symmetric irreflexive relation on a finite point set, stored as pairs (p, q) with p < q."""
    ground: FrozenSet[Point]
    pairs: FrozenSet[Tuple[Point, Point]]

    def __post_init__(self):
        normalized = set()
        for p, q in self.pairs:
            if p == q:
                raise ValueError(f"Relation must be irreflexive, got ({p}, {p})")
            if p not in self.ground or q not in self.ground:
                raise ValueError(f"Pair ({p}, {q}) leaves the ground set")
            normalized.add((p, q) if p < q else (q, p))
        object.__setattr__(self, 'ground', frozenset(self.ground))
        object.__setattr__(self, 'pairs', frozenset(normalized))

    @classmethod
    def from_pairs(cls, ground: Iterable[Point], pairs: Iterable[Tuple[Point, Point]]) -> 'PairRelation':
        return cls(frozenset(ground), frozenset(pairs))

    @cached_property
    def neighbor_map(self) -> Dict[Point, FrozenSet[Point]]:
        linked: Dict[Point, set] = {p: set() for p in self.ground}
        for p, q in self.pairs:
            linked[p].add(q)
            linked[q].add(p)
        return {p: frozenset(qs) for p, qs in linked.items()}

    def sorted_pairs(self) -> List[Tuple[Point, Point]]:
        return sorted(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'ground_size': len(self.ground),
            'pair_count': len(self.pairs),
            'pairs': [[list(p), list(q)] for p, q in self.sorted_pairs()]
        }


def normal_related(prod: ProductSpace, p: Point, q: Point) -> bool:
    """Clauses (1)-(3) of the normal adjacency on a binary product."""
    _require_binary(prod, ProductKind.NORMAL)
    moved = prod.moved_factors(p, q)
    return moved is not None and 1 <= moved <= 2


def c_compatible_related(prod: ProductSpace, p: Point, q: Point) -> bool:
    """One component fixed, the other adjacent in its factor."""
    _require_binary(prod, ProductKind.C_COMPATIBLE)
    return prod.moved_factors(p, q) == 1


def condition_related(prod: ProductSpace, p: Point, q: Point, u: int) -> bool:
    """Between 1 and u factor components differ, each by factor adjacency."""
    _check_u(prod, u)
    moved = prod.moved_factors(p, q)
    return moved is not None and 1 <= moved <= u


def _require_binary(prod: ProductSpace, kind: ProductKind) -> None:
    if prod.v != 2:
        raise ArityError(f"The {kind.value} adjacency is defined for two factors only, got v={prod.v}")


def _check_u(prod: ProductSpace, u: int) -> None:
    if u < 1 or u > prod.v:
        raise ValueError(f"Parameter u must lie in [1, {prod.v}], got u={u}")


def _effective_u(prod: ProductSpace, kind: ProductKind, u: Optional[int]) -> int:
    if kind is ProductKind.NORMAL:
        _require_binary(prod, kind)
        return 2
    if kind is ProductKind.C_COMPATIBLE:
        _require_binary(prod, kind)
        return 1
    if u is None:
        raise ValueError("The ap kind needs a value for u")
    _check_u(prod, u)
    return u


def condition_pairs(prod: ProductSpace, u: int) -> PairRelation:
    """
    Build the relation where 1 to u factor components move, each to a factor neighbor.

    Args:
        prod: Product space
        u: Maximum number of moving factors (1 <= u <= v)

    Returns:
        The relation on the product points
    """
    _check_u(prod, u)
    pairs = set()
    for p in prod.points:
        options = [
            [(x, 0)] + [(y, 1) for y in sorted(factor.neighbors(x))]
            for factor, x in zip(prod.factors, prod.split(p))
        ]
        for choice in cartesian(*options):
            moved = sum(flag for _, flag in choice)
            if 1 <= moved <= u:
                q = sum((component for component, _ in choice), ())
                if p < q:
                    pairs.add((p, q))
    logger.debug(f"Condition relation u={u} on {len(prod)} points has {len(pairs)} pairs")
    return PairRelation(prod.point_set, frozenset(pairs))


@dataclass(frozen=True)
class Witness:
    """A pair violating the adjacency iff for one t, with the failing direction."""
    t: int
    p: Point
    q: Point
    direction: str

    def to_dict(self) -> Dict[str, Any]:
        return {'p': list(self.p), 'q': list(self.q), 'direction': self.direction}


@dataclass
class ExistenceReport:
    """Admissible t values of one product kind and a witness for every rejected t."""
    kind: str
    u: Optional[int]
    n: int
    admissible_t: Tuple[int, ...]
    witnesses: Dict[int, Witness] = field(default_factory=dict)

    @property
    def exists(self) -> bool:
        return bool(self.admissible_t)

    @property
    def star_t(self) -> Optional[int]:
        return min(self.admissible_t) if self.admissible_t else None

    @property
    def admissible_k(self) -> List[int]:
        return [LatticeAdjacency(t, self.n).k for t in self.admissible_t]

    @property
    def star_k(self) -> Optional[int]:
        return LatticeAdjacency(self.star_t, self.n).k if self.star_t is not None else None

    @property
    def star_adjacency(self) -> Optional[LatticeAdjacency]:
        return LatticeAdjacency(self.star_t, self.n) if self.star_t is not None else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'u': self.u,
            'admissible_t': list(self.admissible_t),
            'admissible_k': self.admissible_k,
            'star_k': self.star_k,
            'witnesses': {str(t): w.to_dict() for t, w in sorted(self.witnesses.items())}
        }


def adjacency_existence(prod: ProductSpace, kind, u: Optional[int] = None) -> ExistenceReport:
    """
    Decide for every t in [1, N] whether k(t, N) satisfies the pairwise iff of the kind.

    Args:
        prod: Product space
        kind: ProductKind or its string value
        u: Number of moving factors for the ap kind

    Returns:
        ExistenceReport with admissible t values and one witness per rejected t

    Raises:
        ArityError: If normal or c_compatible is requested for v != 2
    """
    kind = ProductKind.parse(kind)
    u_eff = _effective_u(prod, kind, u)
    n = prod.dim
    witnesses: Dict[int, Witness] = {}

    for p, q, count in box_pairs(prod.points):
        moved = prod.moved_factors(p, q)
        related = moved is not None and 1 <= moved <= u_eff
        if related:
            failing, direction = range(1, count), RELATED_NOT_ADJACENT
        else:
            failing, direction = range(count, n + 1), ADJACENT_NOT_RELATED
        for t in failing:
            witnesses.setdefault(t, Witness(t, p, q, direction))
        if len(witnesses) == n:
            break

    admissible = tuple(t for t in range(1, n + 1) if t not in witnesses)
    report = ExistenceReport(
        kind=kind.value,
        u=u if kind is ProductKind.AP else None,
        n=n,
        admissible_t=admissible,
        witnesses=witnesses
    )
    logger.debug(f"{kind.value} existence on {prod.describe()}: admissible k {report.admissible_k}")
    return report


def _block_neighborhood(prod: ProductSpace, p: Point, u: int) -> FrozenSet[Point]:
    """Union over factor sets D, 1 <= |D| <= u, of the products of N_i on D and fixed components elsewhere."""
    components = prod.split(p)
    local = [factor.neighborhood(x) for factor, x in zip(prod.factors, components)]
    result = set()
    for size in range(1, u + 1):
        for chosen in combinations(range(prod.v), size):
            blocks = [local[i] if i in chosen else {components[i]} for i in range(prod.v)]
            result.update(sum(parts, ()) for parts in cartesian(*blocks))
    return frozenset(result)


def neighborhood_form_failures(prod: ProductSpace, kind, t: int, u: Optional[int] = None) -> List[Point]:
    """
    Product points where N_{k(t,N)}(p) inside the product differs from the factor-neighborhood form.

    The factor form is N_1 x N_2 for normal, the cross union for c_compatible and
    the union of blocks with 1 to u moving factors for ap.
    """
    kind = ProductKind.parse(kind)
    u_eff = _effective_u(prod, kind, u)
    ground = prod.point_set
    failures = []
    for p in prod.points:
        actual, _ = lattice_neighborhood(p, t, ground)
        if actual != _block_neighborhood(prod, p, u_eff):
            failures.append(p)
    return failures


def neighborhood_form_admissible(prod: ProductSpace, kind, u: Optional[int] = None) -> Tuple[int, ...]:
    """Admissible t values decided by the neighborhood equality instead of the pairwise iff."""
    return tuple(
        t for t in range(1, prod.dim + 1)
        if not neighborhood_form_failures(prod, kind, t, u)
    )


def lattice_relation(prod: ProductSpace, t: int) -> PairRelation:
    """The k(t, N)-adjacency restricted to the product points."""
    check_parameters(t, prod.dim)
    pairs = frozenset((p, q) for p, q, count in box_pairs(prod.points) if count <= t)
    return PairRelation(prod.point_set, pairs)


def ap_relation(prod: ProductSpace, u: int, t: Optional[int] = None) -> Tuple[PairRelation, LatticeAdjacency]:
    """
    The AP_u relation of the product: AP_u* by default, or the admissible k(t, N) given.

    Raises:
        NoAdjacencyError: If no AP_u adjacency exists or t is not admissible
    """
    report = adjacency_existence(prod, ProductKind.AP, u)
    if not report.exists:
        raise NoAdjacencyError(f"No AP_{u} adjacency exists on {prod.describe()}")
    if t is None:
        t = report.star_t
    elif t not in report.admissible_t:
        raise NoAdjacencyError(f"k({t},{prod.dim}) is not an AP_{u} adjacency; admissible t: {list(report.admissible_t)}")
    return lattice_relation(prod, t), LatticeAdjacency(t, prod.dim)


def g_star(x1: ImageLike, x2: ImageLike) -> Tuple[PairRelation, LatticeAdjacency]:
    """
    The G_{k*} relation on X1 x X2 and its label k* = k(max(t1, t2), n1 + n2).

    Pairs are those with one component equal and the other adjacent in its factor.
    """
    prod = product([x1, x2])
    relation = condition_pairs(prod, 1)
    k_star = LatticeAdjacency(max(f.t for f in prod.factors), prod.dim)
    return relation, k_star


@dataclass
class CStarResult:
    """Outcome of the C_{k*} decision on a binary product."""
    k_star: LatticeAdjacency
    report: ExistenceReport
    adjacency: Optional[LatticeAdjacency]
    diagnostic: str

    @property
    def exists(self) -> bool:
        return self.adjacency is not None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'exists': self.exists,
            'k_star': self.k_star.k,
            'c_star_k': self.adjacency.k if self.adjacency else None,
            'diagnostic': self.diagnostic,
            'c_compatible': self.report.to_dict()
        }


def c_star(x1: ImageLike, x2: ImageLike) -> CStarResult:
    """
    Decide whether the minimal C-compatible adjacency equals k(max(t1, t2), n1 + n2).

    Returns:
        CStarResult whose diagnostic records how the minimum compares with k*
    """
    prod = product([x1, x2])
    report = adjacency_existence(prod, ProductKind.C_COMPATIBLE)
    k_star = LatticeAdjacency(max(f.t for f in prod.factors), prod.dim)

    if not report.exists:
        return CStarResult(k_star, report, None, "no C-compatible adjacency exists")
    if report.star_t == k_star.t:
        diagnostic = f"minimal C-compatible adjacency equals k*={k_star.k}"
        return CStarResult(k_star, report, k_star, diagnostic)

    relation = "below" if report.star_t < k_star.t else "above"
    diagnostic = f"minimal C-compatible adjacency k={report.star_k} lies {relation} k*={k_star.k}"
    logger.warning(f"C_k* deviation on {prod.describe()}: {diagnostic}")
    return CStarResult(k_star, report, None, diagnostic)


def relation_neighborhood(rel: PairRelation, p: Point) -> Tuple[FrozenSet[Point], FrozenSet[Point]]:
    """
    Neighborhood (N, N*) of p in a pair relation.

    Raises:
        ValueError: If p is not in the ground set
    """
    p = tuple(p)
    if p not in rel.ground:
        raise ValueError(f"Point {p} is not in the relation's ground set")
    punctured = rel.neighbor_map[p]
    return punctured | {p}, punctured
