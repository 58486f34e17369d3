"""Single-vehicle reward maximization on a fixed-supply instance.

Declared quantities do not depend on the visit time, so for a given order
the earliest schedule is always the best one and the solvers work with
earliest arrival times only. Each original site may be visited through at
most one of its copies.

Two solvers sit behind :func:`maximize_reward`:

* ``exact``: label-setting DP over (visited sites, last copy, load) with
  Pareto sets of (arrival time, cost). Optimal reward, ties broken by lower
  cost and then by site order.
* ``heuristic``: ratio-greedy insertion with O(1) window checks, followed by
  window-respecting 2-opt, repeated until nothing changes.

:func:`shortcut_pass` then drops any visit whose detour costs more than it
collects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .discretizer import LiftError, SiteCopy, check_reduced_route
from .instance import TOL, Point, distance
from .solution import Route, Visit, path_cost
from .subset_sum import DEFAULT_SCALE, scale_up

EXACT = "exact"
HEURISTIC = "heuristic"
AUTO = "auto"


@dataclass(frozen=True)
class SolverPolicy:
    mode: str = AUTO
    exact_limit: int = 12
    # the exact DP is exact in continuous time; the grid is only consumed by
    # callers that discretize time (the CLI forwards it to the oracle)
    time_grid: int = 4
    scale: int = DEFAULT_SCALE

    def __post_init__(self) -> None:
        if self.mode not in (EXACT, HEURISTIC, AUTO):
            raise ValueError(f"unknown segment mode {self.mode!r}")
        if self.exact_limit < 1:
            raise ValueError("exact_limit must be at least 1")
        if self.time_grid < 1:
            raise ValueError("time_grid must be at least 1")


@dataclass(frozen=True)
class SegmentProblem:
    copies: tuple[SiteCopy, ...]
    depot: Point
    Q: float
    T: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "copies", tuple(sorted(self.copies, key=lambda c: c.key)))

    def lookup(self) -> dict[int, SiteCopy]:
        return {c.key: c for c in self.copies}


def earliest_times(seq: Sequence[SiteCopy], depot: Point) -> list[float] | None:
    times, prev, t = [], depot, 0.0
    for c in seq:
        t = max(t + distance(prev, c.point), c.start)
        if t > c.end + TOL:
            return None
        times.append(t)
        prev = c.point
    return times


def seq_cost(seq: Sequence[SiteCopy], depot: Point) -> float:
    return path_cost(depot, [c.point for c in seq])


def seq_profit(seq: Sequence[SiteCopy], depot: Point) -> float:
    return sum(c.q_fixed for c in seq) - seq_cost(seq, depot)


def to_route(seq: Sequence[SiteCopy], depot: Point, vehicle_id: int = 1) -> Route:
    times = earliest_times(seq, depot)
    if times is None:
        raise LiftError("sequence misses a window")
    return Route(vehicle_id, tuple(Visit(c.key, min(t, c.end), c.q_fixed) for c, t in zip(seq, times)))


def reduced_profit(route: Route, problem: SegmentProblem) -> float:
    copies = problem.lookup()
    return seq_profit([copies[v.site_id] for v in route.visits], problem.depot)


def maximize_reward(problem: SegmentProblem, policy: SolverPolicy = SolverPolicy(), vehicle_id: int = 1) -> Route:
    mode = policy.mode
    if mode == AUTO:
        mode = EXACT if len(problem.copies) <= policy.exact_limit else HEURISTIC
    if mode == EXACT:
        seq = _exact(problem, policy.scale)
    else:
        seq = _heuristic(problem)
    return to_route(seq, problem.depot, vehicle_id)


def _exact(problem: SegmentProblem, scale: int) -> list[SiteCopy]:
    copies = problem.copies
    depot = problem.depot
    groups = sorted({c.site for c in copies})
    bit = {g: 1 << j for j, g in enumerate(groups)}
    cap = int(math.floor(problem.Q * scale + 1e-9))
    qint = [scale_up(c.q_fixed, scale) for c in copies]
    k = len(copies)
    dist = [[distance(a.point, b.point) for b in copies] for a in copies]
    home = [distance(depot, c.point) for c in copies]

    # label: (time, cost, seq) where seq is a tuple of copy indices
    layer: dict[tuple[int, int, int], list[tuple[float, float, tuple[int, ...]]]] = {}
    for j, c in enumerate(copies):
        t = max(home[j], c.start)
        if t <= c.end + TOL and qint[j] <= cap:
            _add_label(layer, (bit[c.site], j, qint[j]), (t, home[j], (j,)))

    best_key = (0, 0.0, ())
    best_seq: tuple[int, ...] = ()
    while layer:
        nxt: dict[tuple[int, int, int], list[tuple[float, float, tuple[int, ...]]]] = {}
        for (mask, last, load), labels in layer.items():
            for t, cost, seq in labels:
                total = cost + home[last]
                key = (-load, total, tuple(copies[i].site for i in seq))
                if key < best_key:
                    best_key, best_seq = key, seq
                for j, c in enumerate(copies):
                    if mask & bit[c.site] or load + qint[j] > cap:
                        continue
                    arr = max(t + dist[last][j], c.start)
                    if arr > c.end + TOL:
                        continue
                    _add_label(nxt, (mask | bit[c.site], j, load + qint[j]), (arr, cost + dist[last][j], seq + (j,)))
        layer = nxt
    return [copies[i] for i in best_seq]


def _add_label(table, key, label) -> None:
    t, c, seq = label
    labels = table.get(key)
    if labels is None:
        table[key] = [label]
        return
    for t2, c2, seq2 in labels:
        if t2 <= t + 1e-12 and c2 <= c + 1e-12:
            return
    labels[:] = [lb for lb in labels if not (t <= lb[0] + 1e-12 and c <= lb[1] + 1e-12)]
    labels.append(label)


def _latest(seq: Sequence[SiteCopy], times: Sequence[float]) -> list[float]:
    """Latest feasible start at each stop given everything after it."""
    late = [0.0] * len(seq)
    if seq:
        late[-1] = seq[-1].end
        for j in range(len(seq) - 2, -1, -1):
            late[j] = min(seq[j].end, late[j + 1] - distance(seq[j].point, seq[j + 1].point))
    return late


def _heuristic(problem: SegmentProblem) -> list[SiteCopy]:
    depot = problem.depot
    seq: list[SiteCopy] = []
    load = 0.0
    used: set[int] = set()
    for _ in range(4 * len(problem.copies) + 4):
        changed = False
        while True:
            times = earliest_times(seq, depot)
            late = _latest(seq, times)
            best = None
            for c in problem.copies:
                if c.site in used or load + c.q_fixed > problem.Q + TOL:
                    continue
                for pos in range(len(seq) + 1):
                    prev = depot if pos == 0 else seq[pos - 1].point
                    t_prev = 0.0 if pos == 0 else times[pos - 1]
                    arr = max(t_prev + distance(prev, c.point), c.start)
                    if arr > c.end + TOL:
                        continue
                    nxt = depot if pos == len(seq) else seq[pos].point
                    if pos < len(seq):
                        t_next = max(arr + distance(c.point, nxt), seq[pos].start)
                        if t_next > late[pos] + TOL:
                            continue
                    delta = distance(prev, c.point) + distance(c.point, nxt) - distance(prev, nxt)
                    key = (-c.q_fixed / (delta + 1e-9), delta, c.site, c.key, pos)
                    if best is None or key < best[0]:
                        best = (key, c, pos)
            if best is None:
                break
            _, c, pos = best
            seq.insert(pos, c)
            used.add(c.site)
            load += c.q_fixed
            changed = True
        if _two_opt(seq, depot):
            changed = True
        if not changed:
            break
    return seq


def _two_opt(seq: list[SiteCopy], depot: Point) -> bool:
    improved_any = False
    improved = True
    while improved:
        improved = False
        cost = seq_cost(seq, depot)
        for i in range(len(seq) - 1):
            for j in range(i + 1, len(seq)):
                cand = seq[:i] + seq[i : j + 1][::-1] + seq[j + 1 :]
                c2 = seq_cost(cand, depot)
                if c2 < cost - 1e-9 and earliest_times(cand, depot) is not None:
                    seq[:] = cand
                    cost = c2
                    improved = improved_any = True
    return improved_any


def shortcut_pass(route: Route, problem: SegmentProblem) -> Route:
    """Replace arc pairs ``(a, b), (b, c)`` by ``(a, c)`` while profit strictly rises.

    Skipping a stop never delays later arrivals under the triangle
    inequality, so windows stay satisfied.
    """
    copies = problem.lookup()
    problems = check_reduced_route(route, copies, problem.depot, problem.Q)
    if problems:
        raise LiftError("; ".join(problems))
    seq = [copies[v.site_id] for v in route.visits]
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(seq):
            prev = problem.depot if i == 0 else seq[i - 1].point
            nxt = problem.depot if i == len(seq) - 1 else seq[i + 1].point
            c = seq[i]
            detour = distance(prev, c.point) + distance(c.point, nxt) - distance(prev, nxt)
            if detour > c.q_fixed + 1e-12:
                cand = seq[:i] + seq[i + 1 :]
                if earliest_times(cand, problem.depot) is not None:
                    seq = cand
                    changed = True
                    continue
            i += 1
    return to_route(seq, problem.depot, route.vehicle_id)


def solve_segment(problem: SegmentProblem, policy: SolverPolicy = SolverPolicy(), vehicle_id: int = 1) -> Route:
    return shortcut_pass(maximize_reward(problem, policy, vehicle_id), problem)


def profit_lower_bound_factor(T: int) -> float:
    if T < 2:
        raise ValueError(f"horizon must be at least 2, got {T}")
    return 1 / (8 * math.log(2) * math.log2(T))
