"""Variable-supply to fixed-supply reduction for a single vehicle.

Each site window ``[e, l]`` is cut into ``N`` intervals whose right
endpoints sit at ``e + (l - e) / (1 + eps) ** j``. Within any interval but
the first, the supply at the right endpoint is exactly ``1 + eps`` times the
supply at the left endpoint. One copy of the site is created per interval
with that interval as its window and the left-endpoint supply as its fixed
quantity, so a copy's declared quantity is always collectible and never
short of the realized one by more than a factor ``1 + eps``.

Lifting maps a route over copies back to the sites: for each site only the
latest interval visited survives, and visit times are pushed as late as the
route allows without exceeding capacity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .instance import TOL, Instance, Point, Site, distance
from .solution import Route, Visit, interpolate_schedule

LEFT_ENDPOINT = "left-endpoint"
LINEAR_MIDPOINT = "linear-midpoint"


@dataclass(frozen=True)
class SiteCopy:
    key: int
    site: int
    tau: int
    point: Point
    start: float
    end: float
    q_fixed: float

    @property
    def label(self) -> tuple[int, int]:
        return (self.site, self.tau)


@dataclass(frozen=True)
class ReducedInstance:
    copies: tuple[SiteCopy, ...]
    depot: Point
    Q: int
    T: int
    epsilon: float
    N: int
    alpha: float

    def copy(self, key: int) -> SiteCopy:
        c = self.copies[key]
        if c.key != key:  # only if someone rebuilt copies out of order
            c = next(x for x in self.copies if x.key == key)
        return c

    def distance(self, a: int, b: int) -> float:
        ca, cb = self.copy(a), self.copy(b)
        if ca.site == cb.site:
            return 0.0
        return distance(ca.point, cb.point)


def interval_count(alpha: float, epsilon: float) -> int:
    """Smallest ``N`` with ``(1 + epsilon) ** (N - 1) >= alpha``."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    n = 1
    # relative slack keeps exact powers (alpha = (1 + eps) ** k) from rounding up
    while (1 + epsilon) ** (n - 1) < alpha * (1 - 1e-12):
        n += 1
    return n


def intervals(site: Site, epsilon: float, N: int) -> list[tuple[float, float]]:
    width = site.l - site.e
    bounds = [site.e + width / (1 + epsilon) ** (N - j) for j in range(1, N)]
    edges = [float(site.e)] + bounds + [float(site.l)]
    return [(edges[j], edges[j + 1]) for j in range(N)]


def reduce(
    instance: Instance,
    epsilon: float,
    site_ids: Iterable[int] | None = None,
    quantity_rule: str = LEFT_ENDPOINT,
) -> ReducedInstance:
    """Build the fixed-supply instance of copies ``(i, tau)``.

    Copies whose declared quantity is zero (the first interval under linear
    supply) are left out, since they could only add travel.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    N = interval_count(instance.alpha, epsilon)
    ids = instance.site_ids if site_ids is None else list(site_ids)
    copies: list[SiteCopy] = []
    for i in ids:
        site = instance.site(i)
        for tau, (a, b) in enumerate(intervals(site, epsilon, N), start=1):
            if quantity_rule == LEFT_ENDPOINT:
                q = instance.supply(site, a)
            elif quantity_rule == LINEAR_MIDPOINT:
                q = site.q_max * (tau - 0.5) / max(N - 1, 1)
            else:
                raise ValueError(f"unknown quantity rule {quantity_rule!r}")
            if q <= TOL:
                continue
            copies.append(SiteCopy(len(copies), site.id, tau, site.point, a, b, q))
    return ReducedInstance(tuple(copies), instance.depot, instance.Q, instance.T, epsilon, N, instance.alpha)


class LiftError(ValueError):
    """The route handed to :func:`lift_route` is not feasible on its reduced instance."""


def check_reduced_route(route: Route, copies: dict[int, SiteCopy], depot: Point, Q: float) -> list[str]:
    problems = []
    prev, prev_t, load = depot, 0.0, 0.0
    for v in route.visits:
        c = copies.get(v.site_id)
        if c is None:
            problems.append(f"unknown copy {v.site_id}")
            continue
        if v.t < c.start - TOL or v.t > c.end + TOL:
            problems.append(f"copy {c.label} visited at {v.t:g} outside [{c.start:g}, {c.end:g}]")
        if v.t - prev_t < distance(prev, c.point) - TOL:
            problems.append(f"copy {c.label} reached too early")
        load += c.q_fixed
        prev, prev_t = c.point, v.t
    if load > Q + TOL:
        problems.append(f"declared load {load:g} exceeds Q={Q}")
    return problems


def kept_copies(route: Route, copies: dict[int, SiteCopy]) -> list[SiteCopy]:
    """Copies left after keeping only the latest interval per site, in route order."""
    chosen = [copies[v.site_id] for v in route.visits]
    latest: dict[int, int] = {}
    for c in chosen:
        latest[c.site] = max(latest.get(c.site, 0), c.tau)
    kept, done = [], set()
    for c in chosen:
        if c.tau == latest[c.site] and c.site not in done:
            kept.append(c)
            done.add(c.site)
    return kept


def lift_route(
    reduced_route: Route,
    reduced: ReducedInstance | Sequence[SiteCopy],
    instance: Instance,
) -> Route:
    """Map a feasible route over copies to a feasible route over sites.

    Realized quantities can exceed the declared ones by up to a factor
    ``1 + eps``; if that breaks capacity even at the earliest timing, the
    visit with the smallest declared quantity is dropped until it fits.
    """
    pool = reduced.copies if isinstance(reduced, ReducedInstance) else reduced
    copies = {c.key: c for c in pool}
    problems = check_reduced_route(reduced_route, copies, instance.depot, instance.Q)
    if problems:
        raise LiftError("; ".join(problems))

    kept = kept_copies(reduced_route, copies)
    while kept:
        sites = [instance.site(c.site) for c in kept]
        times = interpolate_schedule(
            instance.depot,
            [c.point for c in kept],
            [(c.start, c.end) for c in kept],
            lambda j, t: instance.supply(sites[j], t),
            instance.Q,
        )
        if times is not None:
            visits = tuple(Visit(s.id, t, instance.supply(s, t)) for s, t in zip(sites, times))
            return Route(reduced_route.vehicle_id, visits)
        drop = min(range(len(kept)), key=lambda j: (kept[j].q_fixed, -j))
        kept = kept[:drop] + kept[drop + 1:]
    return Route(reduced_route.vehicle_id)


def declared_reward(reduced_route: Route, reduced: ReducedInstance | Sequence[SiteCopy], lifted: Route) -> float:
    """Declared quantity of the copies that survive in ``lifted``."""
    pool = reduced.copies if isinstance(reduced, ReducedInstance) else reduced
    copies = {c.key: c for c in pool}
    survivors = {v.site_id for v in lifted.visits}
    return sum(c.q_fixed for c in kept_copies(reduced_route, copies) if c.site in survivors)


def reduced_to_dict(reduced: ReducedInstance, m: int = 1) -> dict:
    return {
        "depot": list(reduced.depot),
        "m": m,
        "Q": reduced.Q,
        "T": reduced.T,
        "alpha": reduced.alpha,
        "epsilon": reduced.epsilon,
        "N": reduced.N,
        "sites": [
            {
                "id": c.key,
                "label": [c.site, c.tau],
                "x": c.point[0],
                "y": c.point[1],
                "e": c.start,
                "l": c.end,
                "q": c.q_fixed,
            }
            for c in reduced.copies
        ],
    }
