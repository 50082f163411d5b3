"""
Digital continuity checkers for lattice adjacencies and product relations.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

from .image import DigitalImage, ImageLike, as_image, image_from_dict, is_connected
from .lattice import (
    DimensionMismatchError, LatticeAdjacency, Point, box_pairs, lattice_adjacent,
    lattice_neighborhood, make_point
)
from .product import PairRelation

logger = logging.getLogger(__name__)

DEFAULT_MAX_SUBSET_SIZE = 8
DEFAULT_MAX_SUBSETS = 200000


class GroundMismatchError(ValueError):
    """Raised when a relation's ground set is not the map's domain."""


class SubsetBudgetError(ValueError):
    """Raised when connected-subset enumeration exceeds its budget."""


@dataclass
class DigitalMap:
    """A total function from a finite domain into Z^n, with the codomain adjacency."""
    table: Dict[Point, Point]
    codomain_adj: LatticeAdjacency

    def __post_init__(self):
        if not self.table:
            raise ValueError("A digital map needs a nonempty domain")
        table = {}
        for x, y in self.table.items():
            x, y = make_point(x), make_point(y)
            if len(y) != self.codomain_adj.n:
                raise DimensionMismatchError(f"Image point {y} of {x} is not in Z^{self.codomain_adj.n}")
            table[x] = y
        self.table = table

    @classmethod
    def from_function(
        cls,
        domain: Iterable[Point],
        func: Callable[[Point], Point],
        codomain_adj: LatticeAdjacency
    ) -> 'DigitalMap':
        return cls({tuple(x): tuple(func(tuple(x))) for x in domain}, codomain_adj)

    @property
    def domain(self) -> FrozenSet[Point]:
        return frozenset(self.table)

    def __call__(self, x: Point) -> Point:
        return self.table[tuple(x)]

    def image_points(self) -> FrozenSet[Point]:
        return frozenset(self.table.values())


@dataclass
class ContinuityReport:
    """Continuity verdict; a failing report carries (p, q, f(p), f(q))."""
    continuous: bool
    witness: Optional[Tuple[Point, Point, Point, Point]] = None
    checked_pairs: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'continuous': self.continuous,
            'witness': [list(p) for p in self.witness] if self.witness else None,
            'checked_pairs': self.checked_pairs
        }


def _check_pairs(f: DigitalMap, pairs: Iterable[Tuple[Point, Point]]) -> ContinuityReport:
    t = f.codomain_adj.t
    checked = 0
    for p, q in pairs:
        checked += 1
        fp, fq = f(p), f(q)
        if fp != fq and not lattice_adjacent(fp, fq, t):
            logger.debug(f"Continuity fails at {p}, {q} -> {fp}, {fq}")
            return ContinuityReport(False, (p, q, fp, fq), checked)
    return ContinuityReport(True, None, checked)


def _check_domain(f: DigitalMap, domain_adj: LatticeAdjacency) -> None:
    for x in f.domain:
        if len(x) != domain_adj.n:
            raise DimensionMismatchError(f"Domain point {x} is not in Z^{domain_adj.n}")


def is_continuous_lattice(f: DigitalMap, domain_adj: LatticeAdjacency) -> ContinuityReport:
    """
    (k0, k1)-continuity by the pair form: adjacent points map to equal or adjacent points.

    Args:
        f: Map to check
        domain_adj: Adjacency of the domain

    Returns:
        ContinuityReport with the first failing pair in canonical order
    """
    _check_domain(f, domain_adj)
    pairs = (
        (p, q) for p, q, count in box_pairs(sorted(f.domain)) if count <= domain_adj.t
    )
    return _check_pairs(f, pairs)


def is_continuous_neighborhood(f: DigitalMap, domain_adj: LatticeAdjacency) -> ContinuityReport:
    """(k0, k1)-continuity by the neighborhood form f(N(x)) within N(f(x))."""
    _check_domain(f, domain_adj)
    domain = f.domain
    checked = 0
    for x in sorted(domain):
        around, _ = lattice_neighborhood(x, domain_adj.t, domain)
        target, _ = lattice_neighborhood(f(x), f.codomain_adj.t)
        for y in sorted(around):
            checked += 1
            if f(y) not in target:
                return ContinuityReport(False, (x, y, f(x), f(y)), checked)
    return ContinuityReport(True, None, checked)


def is_continuous_relation(
    f: DigitalMap,
    rel: PairRelation,
    anchor: Optional[Point] = None
) -> ContinuityReport:
    """
    Continuity from a relation-equipped domain into a lattice codomain.

    Args:
        f: Map whose domain is the relation's ground set
        rel: Domain relation (G_{k*}, C_{k*}, AP_u or AP_u*)
        anchor: Optional point whose related points are checked first, largest first

    Returns:
        ContinuityReport; an empty relation is vacuously continuous

    Raises:
        GroundMismatchError: If the relation's ground set is not the map's domain
    """
    if rel.ground != f.domain:
        raise GroundMismatchError(
            f"Relation ground ({len(rel.ground)} points) differs from the map domain ({len(f.domain)} points)"
        )

    def ordered_pairs() -> Iterator[Tuple[Point, Point]]:
        anchored = set()
        if anchor is not None:
            center = tuple(anchor)
            for q in sorted(rel.neighbor_map.get(center, ()), reverse=True):
                anchored.add((center, q) if center < q else (q, center))
                yield center, q
        for pair in rel.sorted_pairs():
            if pair not in anchored:
                yield pair

    return _check_pairs(f, ordered_pairs())


def connected_subsets(graph_image: DigitalImage, max_size: int, max_subsets: int) -> Iterator[FrozenSet[Point]]:
    """
    Enumerate connected subsets of an image with at most max_size points.

    Raises:
        SubsetBudgetError: When more than max_subsets subsets would be produced
    """
    adjacency = graph_image.adjacency
    seen = set()
    frontier = [frozenset([p]) for p in graph_image.points]
    produced = 0
    while frontier:
        grown = []
        for subset in frontier:
            if subset in seen:
                continue
            seen.add(subset)
            produced += 1
            if produced > max_subsets:
                raise SubsetBudgetError(f"More than {max_subsets} connected subsets; lower the subset size")
            yield subset
            if len(subset) < max_size:
                border = set().union(*(adjacency[p] for p in subset)) - subset
                grown.extend(subset | {q} for q in border)
        frontier = grown


def connected_image_check(
    f: DigitalMap,
    domain_adj: LatticeAdjacency,
    max_subset_size: int = DEFAULT_MAX_SUBSET_SIZE,
    max_subsets: int = DEFAULT_MAX_SUBSETS
) -> bool:
    """
    Check that every connected domain subset of bounded size has a connected image.

    Args:
        f: Map to check
        domain_adj: Adjacency of the domain
        max_subset_size: Largest subset size enumerated
        max_subsets: Budget on the number of subsets

    Returns:
        True iff all enumerated connected subsets map to connected sets
    """
    if max_subset_size < 1:
        raise ValueError(f"Subset size must be positive, got {max_subset_size}")
    _check_domain(f, domain_adj)
    domain_image = DigitalImage(tuple(f.domain), domain_adj)
    for subset in connected_subsets(domain_image, max_subset_size, max_subsets):
        mapped = DigitalImage(tuple(f(p) for p in subset), f.codomain_adj)
        if not is_connected(mapped):
            logger.debug(f"Connected subset {sorted(subset)} has disconnected image {mapped.points}")
            return False
    return True


def compose(g: DigitalMap, f: DigitalMap) -> DigitalMap:
    """
    The composite g after f.

    Raises:
        GroundMismatchError: If some value of f is outside the domain of g
    """
    missing = f.image_points() - g.domain
    if missing:
        raise GroundMismatchError(f"Values of the inner map leave the outer domain: {sorted(missing)[:3]}")
    return DigitalMap({x: g(y) for x, y in f.table.items()}, g.codomain_adj)


@dataclass
class MapSpec:
    """A decoded map file."""
    map: DigitalMap
    codomain_image: DigitalImage
    domain_image: Optional[ImageLike] = None
    domain_factors: List[ImageLike] = field(default_factory=list)


def map_from_dict(data: Dict[str, Any]) -> MapSpec:
    """
    Decode {"domain_image", "codomain_image", "pairs"}; relation-domain maps carry
    "domain_factors" instead of (or next to) "domain_image".
    """
    if not isinstance(data, dict):
        raise ValueError("A map must be a JSON object")
    if 'codomain_image' not in data or 'pairs' not in data:
        raise ValueError("Map is missing required field: codomain_image or pairs")
    if not isinstance(data['pairs'], list):
        raise ValueError("Map pairs must be a list of [p, f(p)] entries")
    if 'domain_image' not in data and 'domain_factors' not in data:
        raise ValueError("Map needs a domain_image or domain_factors")

    codomain = as_image(image_from_dict(data['codomain_image']))
    table = {}
    for entry in data['pairs']:
        if not isinstance(entry, list) or len(entry) != 2:
            raise ValueError(f"Map pair must be [p, f(p)], got {entry}")
        x, y = make_point(entry[0]), make_point(entry[1])
        if x in table:
            raise ValueError(f"Point {list(x)} is mapped twice")
        table[x] = y
    digital_map = DigitalMap(table, codomain.adj)

    domain_image = image_from_dict(data['domain_image']) if 'domain_image' in data else None
    factors = [image_from_dict(item) for item in data.get('domain_factors', [])]
    if domain_image is not None and set(as_image(domain_image).points) != digital_map.domain:
        raise ValueError("Map pairs do not cover exactly the domain image")
    return MapSpec(digital_map, codomain, domain_image, factors)
