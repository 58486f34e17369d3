"""Multi-vehicle pipeline: decompose, reduce, solve segments, merge, repeat.

Each iteration works on the pool of sites not yet visited:

1. split the pool with a WSPD (separation ``sqrt(m)``) into per-vehicle subsets;
2. reduce each subset to fixed supply (skipped in MPRP mode);
3. solve each segment and lift it back to the original sites;
4. drop duplicate visits, keeping the vehicle that collects most;
5. move single sites between routes whenever total profit rises;
6. remove visited sites from the pool.

Vehicles keep one route across iterations; later segment routes are merged
into it by profitable insertion. The loop ends when the pool is empty or an
iteration visits no new site.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .discretizer import LEFT_ENDPOINT, SiteCopy, lift_route, reduce
from .instance import Instance, distance
from .segment import SegmentProblem, SolverPolicy, reduced_profit, solve_segment
from .solution import Route, Solution, profit, route_profit, schedule_route
from .subset_sum import best_subset, scale_down
from .wspd import assign_fleet, build_wspd

GAIN_TOL = 1e-9


@dataclass(frozen=True)
class PipelineConfig:
    epsilon: float = 0.5
    policy: SolverPolicy = field(default_factory=SolverPolicy)
    mprp_mode: bool = False
    subset_sum_pruning: bool = False
    max_iterations: int = 50
    fixed_point_reassign: bool = False
    quantity_rule: str = LEFT_ENDPOINT

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    unassigned_before: tuple[int, ...]
    subsets: tuple[tuple[int, ...], ...]
    segment_profits: tuple[float, ...]
    deduplicated: tuple[int, ...]
    reassigned: tuple[tuple[int, int | None, int], ...]
    profit_before: float
    profit_after: float
    newly_visited: tuple[int, ...]


@dataclass
class IterationTrace:
    records: list[IterationRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def prune_copies(copies: Sequence[SiteCopy], Q: int, depot, scale: int) -> list[SiteCopy]:
    """Keep the copies of an optimal subset-sum witness against capacity ``Q``.

    Items are ordered by declared quantity (largest first), then depot
    distance, so the lexicographically smallest witness favours them.
    """
    order = sorted(copies, key=lambda c: (-c.q_fixed, distance(depot, c.point), c.key))
    values = [max(1, scale_down(c.q_fixed, scale)) for c in order]
    result = best_subset(values, Q * scale)
    return sorted((order[j] for j in result.chosen), key=lambda c: c.key)


def segment_copies(instance: Instance, subset: Iterable[int], config: PipelineConfig) -> list[SiteCopy]:
    ids = sorted(subset)
    if config.mprp_mode:
        # fixed supply: one node per site, spanning the whole window
        return [
            SiteCopy(j, s.id, 0, s.point, float(s.e), float(s.l), instance.supply(s, s.l))
            for j, s in enumerate(instance.site(i) for i in ids)
        ]
    reduced = reduce(instance, config.epsilon, ids, config.quantity_rule)
    copies = list(reduced.copies)
    if config.subset_sum_pruning and copies:
        copies = prune_copies(copies, instance.Q, instance.depot, config.policy.scale)
    return copies


def solve_vehicle_segment(
    instance: Instance, subset: Iterable[int], vehicle_id: int, config: PipelineConfig
) -> tuple[Route, float]:
    """Steps 2 and 3 for one vehicle: a route over original sites and its reduced profit."""
    copies = segment_copies(instance, subset, config)
    if not copies:
        return Route(vehicle_id), 0.0
    problem = SegmentProblem(tuple(copies), instance.depot, instance.Q, instance.T)
    reduced_route = solve_segment(problem, config.policy, vehicle_id)
    seg_profit = reduced_profit(reduced_route, problem)
    lifted = lift_route(reduced_route, copies, instance)
    # the lifted order stays feasible on the full windows, which only widens timing
    retimed = schedule_route(lifted.site_ids, instance, vehicle_id)
    return (retimed if retimed is not None else lifted), seg_profit


# ---- route surgery ----

def _order_value(order: Sequence[int], instance: Instance) -> float | None:
    if not order:
        return 0.0
    route = schedule_route(order, instance)
    return None if route is None else route_profit(route, instance)


def best_insertion(
    order: Sequence[int], site_id: int, instance: Instance, base: float | None = None
) -> tuple[float, list[int]] | None:
    """Most profitable position for ``site_id`` in ``order``; ``None`` if nowhere feasible."""
    site = instance.site(site_id)
    if base is None:
        base = _order_value(order, instance) or 0.0
    pts = [instance.depot] + [instance.site(i).point for i in order] + [instance.depot]
    best = None
    for pos in range(len(order) + 1):
        detour = distance(pts[pos], site.point) + distance(site.point, pts[pos + 1]) - distance(pts[pos], pts[pos + 1])
        # inserting can add at most q_max of reward
        if best is not None and base + site.q_max - detour <= best[0] + GAIN_TOL:
            continue
        cand = list(order[:pos]) + [site_id] + list(order[pos:])
        value = _order_value(cand, instance)
        if value is not None and (best is None or value > best[0] + GAIN_TOL):
            best = (value, cand)
    return best


def dedup_sites(routes: Sequence[Route], instance: Instance | None = None) -> tuple[list[Route], list[int]]:
    """Keep each contested site only on the route collecting the most from it.

    Ties go to the lower vehicle id. Losing routes are re-timed when an
    instance is given.
    """
    best: dict[int, tuple[float, int]] = {}
    for r in routes:
        for v in r.visits:
            key = (v.q_collected, -r.vehicle_id)
            if v.site_id not in best or key > best[v.site_id]:
                best[v.site_id] = key
    counts: dict[int, int] = {}
    for r in routes:
        for v in r.visits:
            counts[v.site_id] = counts.get(v.site_id, 0) + 1
    contested = sorted(i for i, c in counts.items() if c > 1)
    if not contested:
        return list(routes), []
    out = []
    for r in routes:
        keep = [v for v in r.visits if counts[v.site_id] == 1 or -best[v.site_id][1] == r.vehicle_id]
        # a route may list a site twice; keep its first occurrence only
        seen, unique = set(), []
        for v in keep:
            if v.site_id not in seen:
                seen.add(v.site_id)
                unique.append(v)
        if len(unique) == len(r.visits):
            out.append(r)
        elif instance is not None:
            retimed = schedule_route([v.site_id for v in unique], instance, r.vehicle_id)
            out.append(retimed if retimed is not None else Route(r.vehicle_id, tuple(unique)))
        else:
            out.append(Route(r.vehicle_id, tuple(unique)))
    return out, contested


def reassign_sites(
    solution: Solution, instance: Instance, fixed_point: bool = False
) -> tuple[Solution, list[tuple[int, int | None, int]]]:
    """Greedy sweep moving single sites to other routes when total profit strictly rises.

    Sites are taken in ascending id, target vehicles in ascending id; a site
    not on any route counts as moving from nowhere. Returns the new solution
    and the applied moves ``(site, from_vehicle, to_vehicle)``.
    """
    orders = {r.vehicle_id: list(r.site_ids) for r in solution.routes}
    values = {k: _order_value(o, instance) or 0.0 for k, o in orders.items()}
    where = {i: k for k, o in orders.items() for i in o}
    moves: list[tuple[int, int | None, int]] = []
    vehicles = sorted(orders)
    while True:
        moved = False
        for sid in sorted(instance.site_ids):
            site = instance.site(sid)
            for k in vehicles:
                src = where.get(sid)
                if src == k:
                    continue
                if src is not None:
                    src_order = [i for i in orders[src] if i != sid]
                    src_value = _order_value(src_order, instance)
                    src_gain = src_value - values[src]
                else:
                    src_order, src_value, src_gain = None, None, 0.0
                if site.q_max + src_gain <= GAIN_TOL:
                    continue
                ins = best_insertion(orders[k], sid, instance, values[k])
                if ins is None:
                    continue
                gain = ins[0] - values[k] + src_gain
                if gain > GAIN_TOL:
                    orders[k] = ins[1]
                    values[k] = ins[0]
                    if src is not None:
                        orders[src] = src_order
                        values[src] = src_value
                    where[sid] = k
                    moves.append((sid, src, k))
                    moved = True
        if not (fixed_point and moved):
            break
    routes = []
    for r in solution.routes:
        order = orders[r.vehicle_id]
        if order == list(r.site_ids):
            routes.append(r)
        else:
            routes.append(schedule_route(order, instance, r.vehicle_id))
    return Solution(tuple(routes)), moves


def merge_route(current: Route, new: Route, instance: Instance) -> Route:
    """Fold a fresh segment route into a vehicle's standing route."""
    if not new.visits:
        return current
    if not current.visits:
        return new if route_profit(new, instance) > GAIN_TOL else current
    order = list(current.site_ids)
    value = _order_value(order, instance)
    for sid in new.site_ids:
        if sid in order:
            continue
        ins = best_insertion(order, sid, instance, value)
        if ins is not None and ins[0] > value + GAIN_TOL:
            value, order = ins
    if order == list(current.site_ids):
        return current
    return schedule_route(order, instance, current.vehicle_id)


# ---- driver ----

def decompose(instance: Instance, pool: Iterable[int]) -> list[frozenset[int]]:
    ids = sorted(pool)
    m = instance.m
    if len(ids) < 2:
        return [frozenset(ids)] + [frozenset()] * (m - 1)
    decomp = build_wspd({i: instance.site(i).point for i in ids}, math.sqrt(m))
    return list(assign_fleet(decomp, ids, m).subsets)


def solve(instance: Instance, config: PipelineConfig = PipelineConfig()) -> tuple[Solution, IterationTrace]:
    m = instance.m
    routes = [Route(k) for k in range(1, m + 1)]
    pool = set(instance.site_ids)
    trace = IterationTrace()
    for it in range(1, config.max_iterations + 1):
        before_pool = tuple(sorted(pool))
        visited_before = {i for r in routes for i in r.site_ids}
        subsets = decompose(instance, pool) if pool else [frozenset()] * m

        segs = [solve_vehicle_segment(instance, subsets[k], k + 1, config) for k in range(m)]
        routes = [merge_route(routes[k], segs[k][0], instance) for k in range(m)]
        profit_before = profit(Solution(tuple(routes)), instance)

        routes, contested = dedup_sites(routes, instance)
        solution, moves = reassign_sites(Solution(tuple(routes)), instance, config.fixed_point_reassign)
        routes = list(solution.routes)

        visited = solution.visited()
        new = tuple(sorted(visited - visited_before))
        pool -= visited
        trace.records.append(
            IterationRecord(
                iteration=it,
                unassigned_before=before_pool,
                subsets=tuple(tuple(sorted(s)) for s in subsets),
                segment_profits=tuple(p for _, p in segs),
                deduplicated=tuple(contested),
                reassigned=tuple(moves),
                profit_before=profit_before,
                profit_after=profit(solution, instance),
                newly_visited=new,
            )
        )
        if not pool or not new:
            break
    return Solution(tuple(routes)), trace
