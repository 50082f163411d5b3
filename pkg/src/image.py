"""
Finite digital images (X, k): connectivity, k-paths, simple closed k-curves and
the built-in curve library.
"""

import json
import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product as cartesian
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .lattice import (
    DimensionMismatchError, LatticeAdjacency, Point, box_pairs, lattice_adjacent, make_point
)

logger = logging.getLogger(__name__)

FIXTURES_DIR = Path(__file__).parent.parent / 'fixtures'

MIN_CURVE_LENGTH = 4


class CurveValidationError(ValueError):
    """Raised when a point sequence is not a simple closed k-curve."""

    def __init__(self, message: str, index_pair: Optional[Tuple[int, int]] = None):
        super().__init__(message)
        self.index_pair = index_pair


@dataclass(frozen=True)
class DigitalImage:
    """A finite point set of Z^n with one k(t, n)-adjacency; points are kept sorted and unique."""
    points: Tuple[Point, ...]
    adj: LatticeAdjacency

    def __post_init__(self):
        if not self.points:
            raise ValueError("A digital image needs at least one point")
        canonical = tuple(sorted(set(make_point(p) for p in self.points)))
        for p in canonical:
            if len(p) != self.adj.n:
                raise DimensionMismatchError(f"Point {p} is not in Z^{self.adj.n}")
        object.__setattr__(self, 'points', canonical)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]], t: int) -> 'DigitalImage':
        points = [make_point(p) for p in points]
        if not points:
            raise ValueError("A digital image needs at least one point")
        return cls(tuple(points), LatticeAdjacency(t, len(points[0])))

    @property
    def dim(self) -> int:
        return self.adj.n

    @property
    def t(self) -> int:
        return self.adj.t

    @property
    def k(self) -> int:
        return self.adj.k

    @cached_property
    def point_set(self) -> FrozenSet[Point]:
        return frozenset(self.points)

    def __contains__(self, p) -> bool:
        return tuple(p) in self.point_set

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @cached_property
    def adjacency(self) -> Dict[Point, FrozenSet[Point]]:
        """Map from each point to its adjacent points inside the image."""
        linked: Dict[Point, set] = {p: set() for p in self.points}
        for p, q, count in box_pairs(self.points):
            if count <= self.adj.t:
                linked[p].add(q)
                linked[q].add(p)
        return {p: frozenset(qs) for p, qs in linked.items()}

    @cached_property
    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.points)
        for p in self.points:
            graph.add_edges_from((p, q) for q in sorted(self.adjacency[p]) if p < q)
        return graph

    def neighbors(self, p: Point) -> FrozenSet[Point]:
        """N*_k(p) inside the image."""
        p = tuple(p)
        if p not in self.point_set:
            raise ValueError(f"Point {p} is not in the image")
        return self.adjacency[p]

    def neighborhood(self, p: Point) -> FrozenSet[Point]:
        """N_k(p) inside the image."""
        return self.neighbors(p) | {tuple(p)}


@dataclass(frozen=True)
class SimpleClosedCurve:
    """A simple closed k-curve: seq[i] and seq[j] are adjacent iff i = j +- 1 (mod l)."""
    seq: Tuple[Point, ...]
    adj: LatticeAdjacency

    @property
    def l(self) -> int:
        return len(self.seq)

    @cached_property
    def image(self) -> DigitalImage:
        return DigitalImage(self.seq, self.adj)

    def rotate(self, shift: int) -> Tuple[Point, ...]:
        shift %= self.l
        return self.seq[shift:] + self.seq[:shift]

    def reversed(self) -> Tuple[Point, ...]:
        return tuple(reversed(self.seq))


ImageLike = Union[DigitalImage, SimpleClosedCurve]


def as_image(obj: ImageLike) -> DigitalImage:
    """Underlying digital image of an image or a curve."""
    return obj.image if isinstance(obj, SimpleClosedCurve) else obj


def validate_curve(seq: Sequence[Sequence[int]], t: int) -> SimpleClosedCurve:
    """
    Validate a point sequence as a simple closed k(t, n)-curve.

    Args:
        seq: Ordered points s_0, ..., s_{l-1}
        t: Adjacency parameter

    Returns:
        The validated curve

    Raises:
        CurveValidationError: On the first violating index pair (i, j), i < j,
            either a chord or a non-adjacent consecutive pair
    """
    points = tuple(make_point(p) for p in seq)
    l = len(points)
    if l < MIN_CURVE_LENGTH:
        raise CurveValidationError(f"A simple closed curve needs at least {MIN_CURVE_LENGTH} points, got {l}")
    n = len(points[0])
    for p in points:
        if len(p) != n:
            raise DimensionMismatchError(f"Curve point {p} is not in Z^{n}")
    adj = LatticeAdjacency(t, n)

    for i in range(l):
        for j in range(i + 1, l):
            if points[i] == points[j]:
                raise CurveValidationError(f"Points {i} and {j} coincide: {points[i]}", (i, j))
            consecutive = (j - i) % l in (1, l - 1)
            adjacent = lattice_adjacent(points[i], points[j], t)
            if consecutive and not adjacent:
                raise CurveValidationError(
                    f"Consecutive points {i} and {j} are not {adj.k}-adjacent: {points[i]}, {points[j]}", (i, j))
            if adjacent and not consecutive:
                raise CurveValidationError(
                    f"Chord between points {i} and {j}: {points[i]}, {points[j]} are {adj.k}-adjacent", (i, j))

    logger.debug(f"Validated SC_{adj.k}^{{{n},{l}}}")
    return SimpleClosedCurve(points, adj)


def is_connected(image: ImageLike) -> bool:
    """True iff the adjacency graph of the image is connected; a singleton is connected."""
    return nx.is_connected(as_image(image).graph)


def k_path(image: ImageLike, x: Point, y: Point) -> Optional[Tuple[Point, ...]]:
    """
    Shortest k-path from x to y inside the image.

    Returns:
        The point sequence from x to y, (x,) when x == y, or None if y is unreachable

    Raises:
        ValueError: If x or y is not in the image
    """
    image = as_image(image)
    x, y = tuple(x), tuple(y)
    for p in (x, y):
        if p not in image:
            raise ValueError(f"Point {p} is not in the image")
    if x == y:
        return (x,)
    try:
        return tuple(nx.shortest_path(image.graph, x, y))
    except nx.NetworkXNoPath:
        return None


def msc18() -> SimpleClosedCurve:
    """The minimal six-point simple closed 18-curve of Z^3."""
    return validate_curve(
        [(0, 0, 0), (1, -1, 0), (1, -1, 1), (2, 0, 1), (1, 1, 1), (1, 1, 0)],
        t=2
    )


def window_image(n: int, t: int, radius: int) -> DigitalImage:
    """The window [-radius, radius]^n of Z^n with the k(t, n)-adjacency."""
    if radius < 0:
        raise ValueError(f"Window radius must be non-negative, got {radius}")
    axis = range(-radius, radius + 1)
    return DigitalImage(tuple(cartesian(axis, repeat=n)), LatticeAdjacency(t, n))


def image_from_dict(data: Dict[str, Any]) -> ImageLike:
    """
    Decode the JSON image format {"dim": n, "t": t, "points": [...], "ordered": bool}.

    Ordered inputs are validated as simple closed curves.
    """
    if not isinstance(data, dict):
        raise ValueError("An image must be a JSON object")
    for field in ('dim', 't', 'points'):
        if field not in data:
            raise ValueError(f"Image is missing required field: {field}")
    dim, t = data['dim'], data['t']
    if not isinstance(dim, int) or not isinstance(t, int) or isinstance(dim, bool) or isinstance(t, bool):
        raise ValueError(f"Image dim and t must be integers, got dim={dim!r}, t={t!r}")
    if not isinstance(data['points'], list):
        raise ValueError("Image points must be a list of coordinate lists")
    points = [make_point(p) for p in data['points']]
    for p in points:
        if len(p) != dim:
            raise DimensionMismatchError(f"Point {list(p)} does not match dim={dim}")
    if data.get('ordered', False):
        return validate_curve(points, t)
    return DigitalImage(tuple(points), LatticeAdjacency(t, dim))


def image_to_dict(image: ImageLike) -> Dict[str, Any]:
    if isinstance(image, SimpleClosedCurve):
        return {
            'dim': image.adj.n, 't': image.adj.t,
            'points': [list(p) for p in image.seq], 'ordered': True
        }
    return {'dim': image.adj.n, 't': image.adj.t, 'points': [list(p) for p in image.points]}


def list_builtin_curves() -> List[str]:
    """Names of the fixture images shipped in the fixtures directory."""
    return sorted(path.stem for path in FIXTURES_DIR.glob('*.json'))


def builtin_curve(name: str) -> ImageLike:
    """
    Load a fixture image by name, validating curves on the way in.

    Raises:
        ValueError: If no fixture has that name
    """
    path = FIXTURES_DIR / f'{name}.json'
    if not path.exists():
        raise ValueError(f"Fixture '{name}' not found. Available: {list_builtin_curves()}")
    with open(path, 'r', encoding='utf-8') as f:
        return image_from_dict(json.load(f))
