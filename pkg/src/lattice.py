"""
Integer-lattice arithmetic: the k(t, n)-adjacency family, pairwise adjacency
tests and lattice neighborhoods.
"""

import logging
from collections.abc import Sequence as SequenceABC
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as cartesian
from typing import Collection, FrozenSet, Iterator, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

Point = Tuple[int, ...]


class DimensionMismatchError(ValueError):
    """Raised when points of different dimensions are compared."""


def make_point(coords: Sequence[int]) -> Point:
    """Build a point from a coordinate sequence, rejecting empty or non-integer input."""
    if isinstance(coords, (str, bytes)) or not isinstance(coords, SequenceABC):
        raise ValueError(f"A point must be a list of integers, got {coords!r}")
    if len(coords) < 1:
        raise ValueError("A point needs at least one coordinate")
    point = tuple(coords)
    for c in point:
        if isinstance(c, bool) or not isinstance(c, int):
            raise ValueError(f"Coordinates must be integers, got {c!r} in {list(coords)}")
    return point


@lru_cache(maxsize=None)
def binomial(n: int, i: int) -> int:
    """C(n, i) by the Pascal recurrence."""
    if i < 0 or i > n:
        return 0
    if i == 0 or i == n:
        return 1
    return binomial(n - 1, i - 1) + binomial(n - 1, i)


def check_parameters(t: int, n: int) -> None:
    """Reject n < 1 and t outside [1, n]."""
    if n < 1:
        raise ValueError(f"Ambient dimension must be positive, got n={n}")
    if t < 1 or t > n:
        raise ValueError(f"Parameter t must lie in [1, {n}], got t={t}")


def k_value(t: int, n: int) -> int:
    """
    Number of lattice neighbors of a point of Z^n under the k(t, n)-adjacency.

    Args:
        t: Maximum number of coordinates allowed to differ (1 <= t <= n)
        n: Ambient dimension

    Returns:
        Sum over i in [1, t] of 2^i * C(n, i)

    Raises:
        ValueError: If the parameters are out of range
    """
    check_parameters(t, n)
    return sum((2 ** i) * binomial(n, i) for i in range(1, t + 1))


@dataclass(frozen=True)
class LatticeAdjacency:
    """The (t, n) pair defining a k(t, n)-adjacency of Z^n."""
    t: int
    n: int

    def __post_init__(self):
        check_parameters(self.t, self.n)

    @property
    def k(self) -> int:
        return k_value(self.t, self.n)

    def adjacent(self, p: Point, q: Point) -> bool:
        if len(p) != self.n:
            raise DimensionMismatchError(f"Point {p} is not in Z^{self.n}")
        return lattice_adjacent(p, q, self.t)

    def to_dict(self) -> dict:
        return {'t': self.t, 'n': self.n, 'k': self.k}

    def __str__(self) -> str:
        return f"k({self.t},{self.n})={self.k}"


def difference_profile(p: Point, q: Point) -> Tuple[int, int]:
    """
    Largest absolute coordinate difference and number of differing coordinates.

    Raises:
        DimensionMismatchError: If p and q have different dimensions
    """
    if len(p) != len(q):
        raise DimensionMismatchError(f"Cannot compare {p} (dim {len(p)}) with {q} (dim {len(q)})")
    spread = 0
    count = 0
    for a, b in zip(p, q):
        d = abs(a - b)
        if d:
            count += 1
            if d > spread:
                spread = d
    return spread, count


def lattice_adjacent(p: Point, q: Point, t: int) -> bool:
    """
    Check k(t, n)-adjacency of two lattice points.

    Args:
        p: First point
        q: Second point
        t: Adjacency parameter

    Returns:
        True iff p != q, every coordinate differs by at most 1 and at most t coordinates differ
    """
    spread, count = difference_profile(p, q)
    check_parameters(t, len(p))
    return spread == 1 and count <= t


@lru_cache(maxsize=None)
def offset_vectors(n: int, t: int) -> Tuple[Point, ...]:
    """All nonzero offsets in {-1, 0, 1}^n with at most t nonzero entries, sorted."""
    check_parameters(t, n)
    offsets = [
        offset for offset in cartesian((-1, 0, 1), repeat=n)
        if 0 < sum(1 for c in offset if c) <= t
    ]
    return tuple(offsets)


def lattice_neighborhood(
    p: Point,
    t: int,
    ground: Optional[Collection[Point]] = None
) -> Tuple[FrozenSet[Point], FrozenSet[Point]]:
    """
    Neighborhood of p in a finite ground set or in the full lattice.

    Args:
        p: Center point
        t: Adjacency parameter
        ground: Finite point set containing p, or None for the full lattice Z^n

    Returns:
        Tuple (N, N*) where N* holds the adjacent points and N = N* plus p

    Raises:
        DimensionMismatchError: If a ground point has another dimension than p
    """
    n = len(p)
    if ground is None:
        punctured = frozenset(
            tuple(a + b for a, b in zip(p, offset)) for offset in offset_vectors(n, t)
        )
    else:
        for q in ground:
            if len(q) != n:
                raise DimensionMismatchError(f"Ground point {q} is not in Z^{n}")
        if p not in ground:
            raise ValueError(f"Point {p} is not in the ground set")
        punctured = frozenset(q for q in ground if lattice_adjacent(p, q, t))
    return punctured | {p}, punctured


def box_pairs(points: Sequence[Point]) -> Iterator[Tuple[Point, Point, int]]:
    """
    Enumerate pairs p < q of a sorted point list whose coordinates all differ by at most 1.

    Pairs come in canonical order (p ascending, then q ascending). Only these pairs
    can be lattice-adjacent under any k(t, n)-adjacency.

    Args:
        points: Lexicographically sorted, duplicate-free points of one dimension

    Yields:
        Tuples (p, q, count) where count is the number of differing coordinates
    """
    if not points:
        return
    n = len(points[0])
    point_set = frozenset(points)
    scan_offsets = (3 ** n - 1) // 2 < len(points)
    offsets = [offset for offset in offset_vectors(n, n) if offset > (0,) * n] if scan_offsets else []
    logger.debug(f"Enumerating box pairs of {len(points)} points in Z^{n} "
                 f"({'offsets' if scan_offsets else 'point scan'})")

    for index, p in enumerate(points):
        if scan_offsets:
            for offset in offsets:
                q = tuple(a + b for a, b in zip(p, offset))
                if q in point_set:
                    yield p, q, sum(1 for c in offset if c)
        else:
            for q in points[index + 1:]:
                spread, count = difference_profile(p, q)
                if spread == 1:
                    yield p, q, count
