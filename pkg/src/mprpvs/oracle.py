"""Exhaustive exact solvers for tiny instances.

``solve_exact`` enumerates every visiting order reachable within windows and
capacity for every subset of sites, then combines single-vehicle optima
over disjoint site sets. For a fixed order the best timing has a closed
form (see :func:`mprpvs.solution.interpolate_schedule`): feasible timings
lie between the earliest and latest schedules and the collected quantity is
linear between them, so the optimum is ``min(Q, R(latest))`` whenever the
earliest schedule fits. That makes the oracle exact in continuous time,
which dominates any grid-restricted search.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .instance import TOL, Instance, Point, distance
from .segment import SegmentProblem, seq_cost
from .solution import Route, Solution, schedule_route
from .subset_sum import DEFAULT_SCALE, scale_up


class OracleCapError(ValueError):
    """The instance is larger than the oracle is allowed to enumerate."""


@dataclass(frozen=True)
class OracleConfig:
    grid: int = 4
    max_sites: int = 8
    max_vehicles: int = 2

    def __post_init__(self) -> None:
        if self.grid < 1:
            raise ValueError("grid must be at least 1")


def single_vehicle_table(instance: Instance) -> dict[int, tuple[float, tuple[int, ...]]]:
    """Best profit and order for each exactly-visited site set (bitmask over instance order)."""
    sites = instance.sites
    n = len(sites)
    depot = instance.depot
    Q = instance.Q
    pts = [s.point for s in sites]
    d = [[distance(a, b) for b in pts] for a in pts]
    home = [distance(depot, p) for p in pts]
    supply = [lambda t, s=s: instance.supply(s, t) for s in sites]
    win = [(float(s.e), float(s.l)) for s in sites]

    best: dict[int, tuple[float, tuple[int, ...]]] = {0: (0.0, ())}

    def record(seq: list[int], mask: int, cost: float) -> None:
        total_cost = cost + home[seq[-1]]
        late = win[seq[-1]][1]
        r_late = supply[seq[-1]](late)
        for a, b in zip(reversed(seq[:-1]), reversed(seq[1:])):
            late = min(win[a][1], late - d[a][b])
            r_late += supply[a](late)
        value = min(Q, r_late) - total_cost
        cur = best.get(mask)
        if cur is None or value > cur[0] + 1e-12:
            best[mask] = (value, tuple(sites[i].id for i in seq))

    def dfs(seq: list[int], mask: int, early: list[float], r_early: float, cost: float) -> None:
        last = seq[-1]
        record(seq, mask, cost)
        for j in range(n):
            if mask >> j & 1:
                continue
            t = max(early[-1] + d[last][j], win[j][0])
            if t > win[j][1] + TOL:
                continue
            r = r_early + supply[j](min(t, win[j][1]))
            if r > Q + TOL:
                continue
            seq.append(j)
            early.append(t)
            dfs(seq, mask | 1 << j, early, r, cost + d[last][j])
            seq.pop()
            early.pop()

    for j in range(n):
        t = max(home[j], win[j][0])
        if t > win[j][1] + TOL:
            continue
        r = supply[j](min(t, win[j][1]))
        if r > Q + TOL:
            continue
        dfs([j], 1 << j, [t], r, home[j])
    return best


def solve_exact(instance: Instance, config: OracleConfig = OracleConfig()) -> Solution:
    """Profit-optimal solution by exhaustive search."""
    n, m = instance.n, instance.m
    if n > config.max_sites:
        raise OracleCapError(f"max_sites={config.max_sites} exceeded (n={n})")
    if m > config.max_vehicles and n > 0:
        raise OracleCapError(f"max_vehicles={config.max_vehicles} exceeded (m={m})")
    table = single_vehicle_table(instance)
    full = (1 << n) - 1
    NEG = -math.inf
    g = [NEG] * (full + 1)
    for mask, (value, _) in table.items():
        g[mask] = value

    # layer[k][mask]: best total using k vehicles on sites within mask
    choice: list[list[int]] = []
    prev = [0.0] * (full + 1)
    for _ in range(min(m, max(n, 1))):
        cur = [NEG] * (full + 1)
        pick = [0] * (full + 1)
        for mask in range(full + 1):
            sub = mask
            while True:
                if g[sub] > NEG:
                    v = g[sub] + prev[mask ^ sub]
                    if v > cur[mask] + 1e-12:
                        cur[mask], pick[mask] = v, sub
                if sub == 0:
                    break
                sub = (sub - 1) & mask
        choice.append(pick)
        prev = cur

    routes = []
    mask = full
    for k in range(len(choice) - 1, -1, -1):
        sub = choice[k][mask]
        routes.append(table[sub][1])
        mask ^= sub
    routes.reverse()
    out = []
    for k in range(1, m + 1):
        order = routes[k - 1] if k - 1 < len(routes) else ()
        route = schedule_route(order, instance, k) if order else Route(k)
        out.append(route)
    return Solution(tuple(out))


def solve_exact_tsp(points: Sequence[Point], depot: Point = (0.0, 0.0), max_points: int = 10) -> float:
    """Shortest closed tour from ``depot`` through all ``points`` (Held-Karp)."""
    n = len(points)
    if n > max_points:
        raise OracleCapError(f"max_points={max_points} exceeded (n={n})")
    if n == 0:
        return 0.0
    d = [[distance(a, b) for b in points] for a in points]
    dp = {(1 << j, j): distance(depot, points[j]) for j in range(n)}
    for size in range(2, n + 1):
        for combo in itertools.combinations(range(n), size):
            mask = sum(1 << j for j in combo)
            for j in combo:
                rest = mask ^ (1 << j)
                dp[(mask, j)] = min(dp[(rest, i)] + d[i][j] for i in combo if i != j)
    full = (1 << n) - 1
    return min(dp[(full, j)] + distance(points[j], depot) for j in range(n))


# ---- fixed-supply segments ----

def enumerate_segment(problem: SegmentProblem, scale: int = DEFAULT_SCALE) -> Iterator[tuple]:
    """Every feasible copy sequence (one copy per site), with declared load checked in fixed point."""
    copies = problem.copies
    cap = int(math.floor(problem.Q * scale + 1e-9))
    qint = [scale_up(c.q_fixed, scale) for c in copies]

    def extend(seq, sites, t, point, load):
        yield tuple(seq)
        for j, c in enumerate(copies):
            if c.site in sites or load + qint[j] > cap:
                continue
            arr = max(t + distance(point, c.point), c.start)
            if arr > c.end + TOL:
                continue
            seq.append(c)
            sites.add(c.site)
            yield from extend(seq, sites, arr, c.point, load + qint[j])
            seq.pop()
            sites.discard(c.site)

    yield from extend([], set(), 0.0, problem.depot, 0)


def best_segment_profit(problem: SegmentProblem, scale: int = DEFAULT_SCALE) -> tuple[float, tuple]:
    best = (0.0, ())
    for seq in enumerate_segment(problem, scale):
        p = sum(c.q_fixed for c in seq) - seq_cost(seq, problem.depot)
        if p > best[0] + 1e-12:
            best = (p, seq)
    return best


def best_segment_reward(problem: SegmentProblem, scale: int = DEFAULT_SCALE) -> int:
    """Largest declared load (fixed point) over all feasible sequences."""
    return max(sum(scale_up(c.q_fixed, scale) for c in seq) for seq in enumerate_segment(problem, scale))
