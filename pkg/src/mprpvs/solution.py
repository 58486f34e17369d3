"""Routes, solutions, profit scoring and constraint checking.

A route is an ordered list of visits; the depot start and end are implicit
and only show up in the cost. Each visit stores the collection time and the
quantity collected, which lets the same types describe reduced-instance
routes (declared quantities) and routes on the original instance (realized
quantities).

Constraint numbers in :class:`ConstraintViolation` follow the formulation:
2 route structure, 3 capacity, 4 time window, 5 travel time,
6 production, 7 one vehicle per site.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .instance import TOL, Instance, Point, distance

PRODUCTION_TOL = 1e-6


@dataclass(frozen=True)
class Visit:
    site_id: int
    t: float
    q_collected: float


@dataclass(frozen=True)
class Route:
    vehicle_id: int
    visits: tuple[Visit, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "visits", tuple(self.visits))

    @property
    def site_ids(self) -> list[int]:
        return [v.site_id for v in self.visits]

    @property
    def reward(self) -> float:
        return sum(v.q_collected for v in self.visits)

    def __len__(self) -> int:
        return len(self.visits)


@dataclass(frozen=True)
class Solution:
    routes: tuple[Route, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "routes", tuple(self.routes))

    @classmethod
    def empty(cls, m: int) -> "Solution":
        return cls(tuple(Route(k) for k in range(1, m + 1)))

    def visited(self) -> set[int]:
        return {v.site_id for r in self.routes for v in r.visits}

    def route_of(self, vehicle_id: int) -> Route:
        for r in self.routes:
            if r.vehicle_id == vehicle_id:
                return r
        raise KeyError(f"no route for vehicle {vehicle_id}")


@dataclass(frozen=True)
class ConstraintViolation:
    constraint: int
    vehicle: int | None
    site: int | None
    message: str


def path_cost(depot: Point, points: Sequence[Point]) -> float:
    if not points:
        return 0.0
    total = distance(depot, points[0]) + distance(points[-1], depot)
    for a, b in zip(points, points[1:]):
        total += distance(a, b)
    return total


def route_cost(route: Route, instance: Instance) -> float:
    """Depot to first visit, between visits, last visit back to the depot."""
    return path_cost(instance.depot, [instance.site(v.site_id).point for v in route.visits])


def route_profit(route: Route, instance: Instance) -> float:
    return route.reward - route_cost(route, instance)


def profit(solution: Solution, instance: Instance) -> float:
    return sum(route_profit(r, instance) for r in solution.routes)


def collected(solution: Solution) -> float:
    return sum(r.reward for r in solution.routes)


def check_feasibility(solution: Solution, instance: Instance) -> list[ConstraintViolation]:
    out: list[ConstraintViolation] = []
    seen_vehicles: set[int] = set()
    owner: dict[int, int] = {}
    for route in solution.routes:
        k = route.vehicle_id
        if not 1 <= k <= instance.m:
            out.append(ConstraintViolation(2, k, None, f"vehicle id {k} outside 1..{instance.m}"))
        if k in seen_vehicles:
            out.append(ConstraintViolation(2, k, None, f"vehicle {k} has more than one route"))
        seen_vehicles.add(k)

        prev_point = instance.depot
        prev_t = 0.0
        load = 0.0
        for visit in route.visits:
            i = visit.site_id
            if not instance.has_site(i):
                out.append(ConstraintViolation(2, k, i, f"unknown site {i}"))
                continue
            site = instance.site(i)
            if i in owner:
                out.append(
                    ConstraintViolation(7, k, i, f"site {i} already visited by vehicle {owner[i]}")
                )
            else:
                owner[i] = k
            if visit.t < site.e - TOL or visit.t > site.l + TOL:
                out.append(
                    ConstraintViolation(4, k, i, f"visit at t={visit.t:g} outside [{site.e}, {site.l}]")
                )
            d = distance(prev_point, site.point)
            if visit.t - prev_t < d - TOL:
                out.append(
                    ConstraintViolation(5, k, i, f"arrival needs {d:g} but only {visit.t - prev_t:g} elapsed")
                )
            expected = instance.supply(site, max(visit.t, 0.0))
            if visit.q_collected < 0 or abs(visit.q_collected - expected) > PRODUCTION_TOL:
                out.append(
                    ConstraintViolation(
                        6, k, i, f"collected {visit.q_collected:g} but supply at t={visit.t:g} is {expected:g}"
                    )
                )
            load += visit.q_collected
            prev_point, prev_t = site.point, visit.t
        if load > instance.Q + TOL:
            out.append(ConstraintViolation(3, k, None, f"load {load:g} exceeds Q={instance.Q}"))
    return out


# ---- timing ----

def interpolate_schedule(
    depot: Point,
    points: Sequence[Point],
    windows: Sequence[tuple[float, float]],
    quantity: Callable[[int, float], float],
    Q: float,
) -> list[float] | None:
    """Best visit times for a fixed visiting order.

    Feasible timings form a lattice between the earliest schedule ``E``
    (forward pass) and the latest schedule ``L`` (backward pass). Collected
    quantity is linear along ``E + lam * (L - E)``, so the largest load not
    exceeding ``Q`` is reached at a closed-form ``lam``. Returns ``None``
    when a window is missed or even ``E`` overloads the vehicle.
    """
    k = len(points)
    if k == 0:
        return []
    early = [0.0] * k
    prev, t = depot, 0.0
    for j in range(k):
        t = max(t + distance(prev, points[j]), windows[j][0])
        if t > windows[j][1] + TOL:
            return None
        t = min(t, windows[j][1])
        early[j] = t
        prev = points[j]
    late = [0.0] * k
    late[-1] = windows[-1][1]
    for j in range(k - 2, -1, -1):
        late[j] = min(windows[j][1], late[j + 1] - distance(points[j], points[j + 1]))
    r_early = sum(quantity(j, early[j]) for j in range(k))
    if r_early > Q + TOL:
        return None
    r_late = sum(quantity(j, late[j]) for j in range(k))
    if r_late <= Q:
        lam = 1.0
    else:
        lam = min(max((Q - r_early) / (r_late - r_early), 0.0), 1.0)
    times = []
    for j in range(k):
        t = early[j] + lam * (late[j] - early[j])
        times.append(min(max(t, windows[j][0]), windows[j][1]))
    return times


def schedule_route(order: Sequence[int], instance: Instance, vehicle_id: int = 1) -> Route | None:
    """Time a visiting order on the original instance for maximum collection.

    Returns ``None`` if the order cannot be served within windows and capacity.
    """
    sites = [instance.site(i) for i in order]
    times = interpolate_schedule(
        instance.depot,
        [s.point for s in sites],
        [(float(s.e), float(s.l)) for s in sites],
        lambda j, t: instance.supply(sites[j], t),
        instance.Q,
    )
    if times is None:
        return None
    return Route(
        vehicle_id,
        tuple(Visit(s.id, t, instance.supply(s, t)) for s, t in zip(sites, times)),
    )


def order_profit(order: Sequence[int], instance: Instance) -> float | None:
    route = schedule_route(order, instance)
    if route is None:
        return None
    return route_profit(route, instance)


# ---- JSON ----

def solution_to_dict(solution: Solution, instance: Instance | None = None) -> dict:
    data: dict = {
        "routes": [
            {
                "vehicle": r.vehicle_id,
                "visits": [{"site": v.site_id, "t": v.t, "q": v.q_collected} for v in r.visits],
            }
            for r in solution.routes
        ]
    }
    if instance is not None:
        data["meta"] = {
            "profit": profit(solution, instance),
            "violations": [
                {"constraint": v.constraint, "vehicle": v.vehicle, "site": v.site, "message": v.message}
                for v in check_feasibility(solution, instance)
            ],
        }
    return data


def solution_from_dict(data: dict) -> Solution:
    return Solution(
        tuple(
            Route(
                int(r["vehicle"]),
                tuple(Visit(int(v["site"]), float(v["t"]), float(v["q"])) for v in r["visits"]),
            )
            for r in data["routes"]
        )
    )
