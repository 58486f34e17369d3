"""Well-separated pair decomposition over a fair-split tree.

The tree splits each cell's bounding box through the middle of its longest
side. Pairs are found with the usual recursion: a pair of nodes is emitted
when their bounding balls are ``s``-separated, otherwise the node with the
larger ball is split. Every unordered pair of distinct points ends up in
exactly one emitted pair.

Bounding balls are centred on the bounding-box centre with radius equal to
half its diagonal. Two nodes are ``s``-separated when the gap between their
balls is at least ``s`` times the larger radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .instance import Point


@dataclass
class Node:
    ids: tuple[int, ...]
    box: tuple[float, float, float, float]
    left: "Node | None" = None
    right: "Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def center(self) -> Point:
        x0, y0, x1, y1 = self.box
        return ((x0 + x1) / 2, (y0 + y1) / 2)

    @property
    def radius(self) -> float:
        x0, y0, x1, y1 = self.box
        return math.hypot(x1 - x0, y1 - y0) / 2


@dataclass(frozen=True)
class WellSeparatedPair:
    A: tuple[int, ...]
    B: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.A) + len(self.B)


@dataclass
class PairDecomposition:
    tree: Node | None
    pairs: list[WellSeparatedPair]
    s: float
    points: dict[int, Point] = field(default_factory=dict)


def bounding_box(points: Iterable[Point]) -> tuple[float, float, float, float]:
    xs, ys = zip(*points)
    return (min(xs), min(ys), max(xs), max(ys))


def ball(points: Sequence[Point]) -> tuple[Point, float]:
    x0, y0, x1, y1 = bounding_box(points)
    return ((x0 + x1) / 2, (y0 + y1) / 2), math.hypot(x1 - x0, y1 - y0) / 2


def separated(ca: Point, ra: float, cb: Point, rb: float, s: float) -> bool:
    gap = math.hypot(ca[0] - cb[0], ca[1] - cb[1]) - ra - rb
    return gap >= s * max(ra, rb)


def build_tree(points: dict[int, Point]) -> Node | None:
    if not points:
        return None

    def build(ids: list[int]) -> Node:
        box = bounding_box(points[i] for i in ids)
        node = Node(tuple(sorted(ids)), box)
        if len(ids) == 1:
            return node
        x0, y0, x1, y1 = box
        axis = 0 if x1 - x0 >= y1 - y0 else 1
        lo, hi = (x0, x1) if axis == 0 else (y0, y1)
        if hi > lo:
            mid = (lo + hi) / 2
            left = [i for i in ids if points[i][axis] < mid]
            right = [i for i in ids if points[i][axis] >= mid]
        else:
            # coincident points: split the lexicographic order in half
            order = sorted(ids, key=lambda i: (points[i][0], points[i][1], i))
            half = len(order) // 2
            left, right = order[:half], order[half:]
        node.left = build(left)
        node.right = build(right)
        return node

    return build(sorted(points))


def build_wspd(points: dict[int, Point] | Sequence[Point], s: float) -> PairDecomposition:
    """Decompose ``points`` (a mapping id -> point, or a list indexed from 0)."""
    if s < 1:
        raise ValueError(f"separation factor must be at least 1, got {s}")
    if not isinstance(points, dict):
        points = {i: tuple(p) for i, p in enumerate(points)}
    tree = build_tree(points)
    pairs: list[WellSeparatedPair] = []
    if tree is None or tree.is_leaf:
        return PairDecomposition(tree, pairs, s, dict(points))

    stack: list[tuple[Node, Node]] = []
    internal = [tree]
    # visit internal nodes in preorder, resolving each node's own pair fully
    while internal:
        node = internal.pop()
        stack.append((node.left, node.right))
        while stack:
            u, v = stack.pop()
            if separated(u.center, u.radius, v.center, v.radius, s):
                pairs.append(WellSeparatedPair(u.ids, v.ids))
            elif u.radius >= v.radius:
                stack.append((u.right, v))
                stack.append((u.left, v))
            else:
                stack.append((u, v.right))
                stack.append((u, v.left))
        for child in (node.right, node.left):
            if not child.is_leaf:
                internal.append(child)

    pairs.sort(key=lambda p: -p.size)
    return PairDecomposition(tree, pairs, s, dict(points))


@dataclass(frozen=True)
class FleetAssignment:
    subsets: tuple[frozenset[int], ...]


def assign_fleet(decomp: PairDecomposition, unassigned: Iterable[int], m: int) -> FleetAssignment:
    """Hand the largest pairs to vehicles two at a time.

    Vehicles ``2k - 1`` and ``2k`` receive ``A_k`` and ``B_k``; their sites
    are removed from the subsets of earlier vehicles. An unpaired last
    vehicle takes ``A_k`` alone.
    """
    if m < 1:
        raise ValueError("m must be positive")
    pool = set(unassigned)
    subsets: list[set[int]] = [set() for _ in range(m)]
    for k, pair in enumerate(decomp.pairs[: (m + 1) // 2]):
        a = set(pair.A) & pool
        b = set(pair.B) & pool
        taken = a | b if 2 * k + 1 < m else a
        for j in range(2 * k):
            subsets[j] -= taken
        subsets[2 * k] = a
        if 2 * k + 1 < m:
            subsets[2 * k + 1] = b
    return FleetAssignment(tuple(frozenset(s) for s in subsets))


def spanner_length_factor(m: int) -> float:
    if m < 1:
        raise ValueError("m must be positive")
    return 1 + 1 / (1 + math.sqrt(m))
