"""
Finite group structures on digital images and certification of DT-k-groups,
AP_1-k-groups and AP_1*-k-groups, with windowed checks for (Z^n, k, +).
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Optional, Sequence, Tuple

from .continuity import ContinuityReport, DigitalMap, is_continuous_lattice, is_continuous_relation
from .image import DigitalImage, ImageLike, SimpleClosedCurve, as_image, window_image
from .lattice import LatticeAdjacency, Point, make_point
from .product import (
    NoAdjacencyError, PairRelation, ProductKind, ProductSpace, adjacency_existence, c_star,
    condition_pairs, g_star, lattice_relation, product
)

logger = logging.getLogger(__name__)

DT_GROUP = "dt_group"
AP1_GROUP = "ap1_group"
AP1_STAR_GROUP = "ap1_star_group"
AP2_PROBE = "ap2_probe"

NO_AP1_ADJACENCY = "no AP_1 adjacency"


class CarrierMismatchError(ValueError):
    """Raised when a group's carrier is not the image's point set."""


class GroupTableError(ValueError):
    """Raised for malformed or invalid group tables."""


class GroupPreconditionError(ValueError):
    """Raised when a group check is run on inputs that do not meet its preconditions."""


@dataclass(frozen=True)
class GroupTable:
    """A finite operation on a point list given as an index table."""
    carrier: Tuple[Point, ...]
    op: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_table(cls, carrier: Sequence[Sequence[int]], table: Sequence[Sequence[int]]) -> 'GroupTable':
        """
        Build a table, checking only its shape.

        Raises:
            GroupTableError: If the table is not m x m for m carrier points
        """
        points = tuple(make_point(p) for p in carrier)
        m = len(points)
        if m < 1:
            raise GroupTableError("A group needs at least one element")
        if len(set(points)) != m:
            raise GroupTableError("Carrier points must be distinct")
        if len(table) != m or any(len(row) != m for row in table):
            raise GroupTableError(f"Table must be {m} x {m}")
        for row in table:
            for entry in row:
                if isinstance(entry, bool) or not isinstance(entry, int):
                    raise GroupTableError(f"Table entries must be integer indices, got {entry!r}")
        return cls(points, tuple(tuple(row) for row in table))

    @property
    def order(self) -> int:
        return len(self.carrier)

    @cached_property
    def index(self) -> Dict[Point, int]:
        return {p: i for i, p in enumerate(self.carrier)}

    @cached_property
    def identity_index(self) -> Optional[int]:
        for e in range(self.order):
            if all(self.op[e][a] == a and self.op[a][e] == a for a in range(self.order)):
                return e
        return None

    @cached_property
    def inverse(self) -> Optional[Tuple[int, ...]]:
        e = self.identity_index
        if e is None:
            return None
        inverses = []
        for a in range(self.order):
            match = next((b for b in range(self.order) if self.op[a][b] == e and self.op[b][a] == e), None)
            if match is None:
                return None
            inverses.append(match)
        return tuple(inverses)

    @property
    def identity(self) -> Point:
        return self.carrier[self.identity_index]

    def multiply(self, p: Point, q: Point) -> Point:
        return self.carrier[self.op[self.index[tuple(p)]][self.index[tuple(q)]]]

    def invert(self, p: Point) -> Point:
        return self.carrier[self.inverse[self.index[tuple(p)]]]

    def is_abelian(self) -> bool:
        return all(
            self.op[a][b] == self.op[b][a]
            for a in range(self.order) for b in range(a + 1, self.order)
        )


@dataclass
class GroupCheck:
    """Group axiom check; axiom names the first violated axiom."""
    valid: bool
    axiom: Optional[str] = None
    detail: Optional[str] = None

    def __bool__(self) -> bool:
        return self.valid


def verify_group(g: GroupTable) -> GroupCheck:
    """
    Check closure, associativity, a two-sided identity and two-sided inverses, in that order.

    Returns:
        GroupCheck with the first violated axiom and the offending indices
    """
    m = g.order
    for a in range(m):
        for b in range(m):
            if not 0 <= g.op[a][b] < m:
                return GroupCheck(False, 'closure', f"op({a},{b}) = {g.op[a][b]} is outside [0, {m})")

    for a in range(m):
        for b in range(m):
            ab = g.op[a][b]
            for c in range(m):
                if g.op[ab][c] != g.op[a][g.op[b][c]]:
                    return GroupCheck(False, 'associativity', f"({a}*{b})*{c} != {a}*({b}*{c})")

    if g.identity_index is None:
        return GroupCheck(False, 'identity', "no two-sided identity")
    if g.inverse is None:
        e = g.identity_index
        missing = next(a for a in range(m) if not any(g.op[a][b] == e == g.op[b][a] for b in range(m)))
        return GroupCheck(False, 'inverse', f"element {missing} has no two-sided inverse")
    return GroupCheck(True)


def cyclic_group(curve: SimpleClosedCurve) -> GroupTable:
    """Z/l on the points of a simple closed curve, s_i * s_j = s_{i+j mod l}."""
    l = curve.l
    table = [[(i + j) % l for j in range(l)] for i in range(l)]
    return GroupTable(curve.seq, tuple(tuple(row) for row in table))


def direct_product_group(g1: GroupTable, g2: GroupTable) -> GroupTable:
    """Componentwise group on the concatenated carriers, element (a, b) at index a * m2 + b."""
    m2 = g2.order
    carrier = tuple(p + q for p in g1.carrier for q in g2.carrier)
    table = []
    for a1 in range(g1.order):
        for b1 in range(m2):
            table.append(tuple(
                g1.op[a1][a2] * m2 + g2.op[b1][b2]
                for a2 in range(g1.order) for b2 in range(m2)
            ))
    return GroupTable(carrier, tuple(table))


def multiplication_map(g: GroupTable, square: ProductSpace, codomain_adj: LatticeAdjacency) -> DigitalMap:
    """(x, y) -> x * y on the product X x X."""
    return DigitalMap.from_function(
        square.points, lambda p: g.multiply(*square.split(p)), codomain_adj
    )


def inverse_map(g: GroupTable, adj: LatticeAdjacency) -> DigitalMap:
    return DigitalMap.from_function(g.carrier, g.invert, adj)


def window_addition(window: DigitalImage) -> Tuple[ProductSpace, DigitalMap]:
    """
    Coordinatewise addition on W x W; sums may leave the window.

    Returns:
        The product W x W and the addition map into Z^n with the window's adjacency
    """
    square = product([window, window])
    addition = DigitalMap.from_function(
        square.points,
        lambda p: tuple(a + b for a, b in zip(*square.split(p))),
        window.adj
    )
    return square, addition


@dataclass
class GroupVerdict:
    """Pass/fail verdict of a group structure check."""
    structure: str
    holds: bool
    adjacency_used: str
    multiplication: Optional[ContinuityReport] = None
    inverse: Optional[ContinuityReport] = None
    reason: Optional[str] = None
    per_t: Dict[int, bool] = field(default_factory=dict)
    abelian: Optional[bool] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'structure': self.structure,
            'holds': self.holds,
            'adjacency_used': self.adjacency_used,
            'reason': self.reason,
            'multiplication': self.multiplication.to_dict() if self.multiplication else None,
            'inverse': self.inverse.to_dict() if self.inverse else None,
            'per_t': {str(t): ok for t, ok in sorted(self.per_t.items())},
            'abelian': self.abelian
        }


def _check_carrier(image: DigitalImage, g: GroupTable) -> None:
    if set(g.carrier) != image.point_set:
        raise CarrierMismatchError(
            f"Group carrier ({g.order} points) is not the image point set ({len(image)} points)"
        )
    check = verify_group(g)
    if not check:
        raise GroupTableError(f"Not a group: {check.axiom} fails, {check.detail}")


def _relation_verdict(
    structure: str,
    g: GroupTable,
    image: DigitalImage,
    square: ProductSpace,
    relation: PairRelation,
    adjacency_used: str,
    anchor: Optional[Point] = None
) -> GroupVerdict:
    multiplication = is_continuous_relation(multiplication_map(g, square, image.adj), relation, anchor)
    inverse = is_continuous_lattice(inverse_map(g, image.adj), image.adj)
    holds = multiplication.continuous and inverse.continuous
    logger.debug(f"{structure} on {len(image)} points with {adjacency_used}: holds={holds}")
    return GroupVerdict(structure, holds, adjacency_used, multiplication, inverse, abelian=g.is_abelian())


def check_dt_group(x: ImageLike, g: GroupTable, use_c_star: bool = False) -> GroupVerdict:
    """
    DT-k-group check: (G_{k*}, k)-continuous multiplication and k-continuous inversion.

    Args:
        x: Digital image carrying the group
        g: Group table on the image points
        use_c_star: Use the C_{k*} pair set in place of G_{k*}

    Returns:
        GroupVerdict; with use_c_star and no C_{k*}, holds is False

    Raises:
        CarrierMismatchError: If the carrier is not the image's point set
    """
    image = as_image(x)
    _check_carrier(image, g)
    square = product([image, image])
    relation, k_star = g_star(image, image)
    adjacency_used = f"G_k* with k*={k_star.k}"

    if use_c_star:
        decision = c_star(image, image)
        if not decision.exists:
            return GroupVerdict(DT_GROUP, False, "no C_k* adjacency", reason=decision.diagnostic,
                                abelian=g.is_abelian())
        relation = lattice_relation(square, decision.adjacency.t)
        adjacency_used = f"C_k* with k*={k_star.k}"

    return _relation_verdict(DT_GROUP, g, image, square, relation, adjacency_used)


def check_ap1_group(x: ImageLike, g: GroupTable, star: bool = False) -> GroupVerdict:
    """
    AP_1-k-group (or AP_1*-k-group with star) check.

    Without star every admissible AP_1 adjacency is tried; the verdict holds when
    one of them gives a continuous multiplication and per_t lists each outcome.
    """
    image = as_image(x)
    _check_carrier(image, g)
    structure = AP1_STAR_GROUP if star else AP1_GROUP
    square = product([image, image])
    report = adjacency_existence(square, ProductKind.AP, 1)
    if not report.exists:
        return GroupVerdict(structure, False, NO_AP1_ADJACENCY, reason=NO_AP1_ADJACENCY, abelian=g.is_abelian())

    mult_map = multiplication_map(g, square, image.adj)
    inverse = is_continuous_lattice(inverse_map(g, image.adj), image.adj)
    candidates = [report.star_t] if star else list(report.admissible_t)
    per_t = {}
    reports = {}
    for t in candidates:
        reports[t] = is_continuous_relation(mult_map, lattice_relation(square, t))
        per_t[t] = reports[t].continuous

    passing = [t for t in candidates if per_t[t]]
    chosen = passing[0] if passing else candidates[0]
    used = LatticeAdjacency(chosen, square.dim)
    label = "AP_1*" if chosen == report.star_t else "AP_1"
    holds = bool(passing) and inverse.continuous
    return GroupVerdict(
        structure, holds, f"{label} = {used}",
        multiplication=reports[chosen], inverse=inverse, per_t=per_t, abelian=g.is_abelian()
    )


def _window_verdict(window: DigitalImage, u: int, structure: str) -> GroupVerdict:
    square, addition = window_addition(window)
    relation = condition_pairs(square, u)
    zero = (0,) * window.dim
    multiplication = is_continuous_relation(addition, relation, anchor=zero + zero)
    negation = DigitalMap.from_function(window.points, lambda p: tuple(-c for c in p), window.adj)
    inverse = is_continuous_lattice(negation, window.adj)
    holds = multiplication.continuous and inverse.continuous
    return GroupVerdict(
        structure, holds, f"AP_{u} condition relation on the window, codomain {window.adj}",
        multiplication, inverse, abelian=True
    )


def ap2_probe(x: ImageLike, g: Optional[GroupTable] = None) -> GroupVerdict:
    """
    Check (AP_2, k)-continuity of a multiplication.

    With a group table the AP_2* adjacency of X x X is used and the witness search
    starts at the identity pair. Without one, x is a window and the operation is addition
    under the u=2 condition relation.

    Raises:
        NoAdjacencyError: If X x X has no AP_2 adjacency
    """
    image = as_image(x)
    if g is None:
        return _window_verdict(image, 2, AP2_PROBE)

    _check_carrier(image, g)
    square = product([image, image])
    report = adjacency_existence(square, ProductKind.AP, 2)
    if not report.exists:
        raise NoAdjacencyError(f"No AP_2 adjacency exists on {square.describe()}")
    relation = lattice_relation(square, report.star_t)
    e = g.identity
    return _relation_verdict(AP2_PROBE, g, image, square, relation,
                             f"AP_2* = {report.star_adjacency}", anchor=e + e)


def window_group_check(n: int, t: int, radius: int, u: int) -> GroupVerdict:
    """
    Check (Z^n, k(t, n), +) on the window [-radius, radius]^n.

    Args:
        n: Dimension
        t: Adjacency parameter of Z^n
        radius: Window radius (>= 1)
        u: 1 for the AP_1 structure, 2 for the AP_2 probe

    Returns:
        GroupVerdict; codomain adjacency is evaluated on the full lattice
    """
    if radius < 1:
        raise ValueError(f"Window radius must be at least 1, got {radius}")
    if u not in (1, 2):
        raise ValueError(f"Parameter u must be 1 or 2, got {u}")
    window = window_image(n, t, radius)
    logger.info(f"Window check on [-{radius},{radius}]^{n} with {window.adj}, u={u}")
    return _window_verdict(window, u, AP1_GROUP if u == 1 else AP2_PROBE)


def product_group_probe(x1: ImageLike, g1: GroupTable, x2: ImageLike, g2: GroupTable) -> GroupVerdict:
    """
    Check the direct-product group on X1 x X2 as an AP_1*-group.

    The domain relation is the AP_1*(k1, k2, k1, k2) adjacency of (X1 x X2)^2 and the
    codomain adjacency is AP_1*(k1, k2) on X1 x X2.

    Raises:
        GroupPreconditionError: If either input is not an AP_1*-group
    """
    image1, image2 = as_image(x1), as_image(x2)
    for image, g in ((image1, g1), (image2, g2)):
        verdict = check_ap1_group(image, g, star=True)
        if not verdict.holds:
            raise GroupPreconditionError(
                f"Input on {len(image)} points is not an AP_1*-group: {verdict.reason or verdict.adjacency_used}"
            )

    group = direct_product_group(g1, g2)
    pair = product([image1, image2])
    square = product([image1, image2, image1, image2])
    report = adjacency_existence(square, ProductKind.AP, 1)
    ks = f"{image1.k},{image2.k},{image1.k},{image2.k}"
    if not report.exists:
        reason = f"no AP_1({ks}) adjacency"
        logger.info(f"Direct product probe fails: {reason}")
        return GroupVerdict(AP1_STAR_GROUP, False, reason, reason=reason, abelian=group.is_abelian())

    # AP_1 on (X1 x X2)^2 restricts to AP_1 on X1 x X2
    codomain_adj = adjacency_existence(pair, ProductKind.AP, 1).star_adjacency
    carrier_image = DigitalImage(pair.points, codomain_adj)
    relation = lattice_relation(square, report.star_t)
    multiplication = is_continuous_relation(
        DigitalMap.from_function(
            square.points,
            lambda p: group.multiply(p[:pair.dim], p[pair.dim:]),
            codomain_adj
        ),
        relation
    )
    inverse = is_continuous_lattice(inverse_map(group, codomain_adj), carrier_image.adj)
    holds = multiplication.continuous and inverse.continuous
    return GroupVerdict(
        AP1_STAR_GROUP, holds, f"AP_1*({ks}) = {report.star_adjacency}, codomain {codomain_adj}",
        multiplication, inverse, abelian=group.is_abelian()
    )


def group_from_dict(data: Dict[str, Any], x: ImageLike) -> GroupTable:
    """
    Decode {"cyclic": true} (curves only) or {"carrier": [...], "table": [[...]]}.
    """
    if data.get('cyclic'):
        if not isinstance(x, SimpleClosedCurve):
            raise GroupTableError("The cyclic shorthand needs an ordered curve image")
        return cyclic_group(x)
    if 'carrier' not in data or 'table' not in data:
        raise GroupTableError("Group file needs either \"cyclic\": true or carrier and table")
    return GroupTable.from_table(data['carrier'], data['table'])


def trivial_group(point: Point) -> GroupTable:
    """The one-element group on a single point."""
    return GroupTable((tuple(point),), ((0,),))
