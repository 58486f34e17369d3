import random

import pytest

from mprpvs.discretizer import (
    LINEAR_MIDPOINT,
    LiftError,
    declared_reward,
    interval_count,
    intervals,
    lift_route,
    reduce,
    reduced_to_dict,
)
from mprpvs.instance import Site
from mprpvs.segment import SegmentProblem, SolverPolicy, solve_segment
from mprpvs.solution import Route, Solution, Visit, check_feasibility

from conftest import make_instance


def test_interval_count():
    assert interval_count(4, 1) == 3
    assert interval_count(2, 1) == 2
    assert interval_count(1.5, 0.25) == 3
    with pytest.raises(ValueError):
        interval_count(2, 0)


def test_intervals_example():
    site = Site(1, 0, 0, 1.0, 0, 8)
    assert intervals(site, 1.0, 3) == [(0.0, 2.0), (2.0, 4.0), (4.0, 8.0)]


def test_left_endpoint_quantities():
    inst = make_instance([(0, 0, 1.0, 0, 8)], alpha=4.0)
    red = reduce(inst, 1.0)
    assert red.N == 3
    assert {c.tau: c.q_fixed for c in red.copies} == {2: 2.0, 3: 4.0}


def test_copy_count_and_colocation():
    inst = make_instance([(1, 2, 1.0, 0, 8), (3, 1, 2.0, 2, 6), (0, 5, 1.5, 1, 4)], alpha=2.0)
    for eps in (0.25, 0.5, 1.0):
        red = reduce(inst, eps)
        # the first interval of each site carries zero supply and is omitted
        assert len(red.copies) == (red.N - 1) * inst.n
        for c in red.copies:
            for d in red.copies:
                if c.site == d.site:
                    assert red.distance(c.key, d.key) == 0


@pytest.mark.parametrize("eps", [0.25, 0.5, 1.0])
def test_interval_geometry(eps):
    site = Site(1, 0, 0, 3.0, 2, 9)
    N = interval_count(3.0, eps)
    ivs = intervals(site, eps, N)
    assert ivs[0][0] == site.e and ivs[-1][1] == site.l
    for (a, b), (c, _) in zip(ivs, ivs[1:]):
        assert abs(b - c) <= 1e-12
    for a, b in ivs[1:]:
        assert (b - site.e) == pytest.approx((1 + eps) * (a - site.e), rel=1e-12)


def test_linear_midpoint_rule_available():
    inst = make_instance([(0, 0, 1.0, 0, 8)], alpha=4.0)
    red = reduce(inst, 1.0, quantity_rule=LINEAR_MIDPOINT)
    assert all(c.q_fixed > 0 for c in red.copies)
    with pytest.raises(ValueError):
        reduce(inst, 1.0, quantity_rule="nope")


def test_lift_keeps_latest_interval():
    inst = make_instance([(1, 0, 1.0, 0, 8)], alpha=4.0)
    red = reduce(inst, 1.0)
    k2, k3 = (c.key for c in sorted(red.copies, key=lambda c: c.tau))
    reduced = Route(1, [Visit(k2, 2.0, 2.0), Visit(k3, 4.0, 4.0)])
    lifted = lift_route(reduced, red, inst)
    assert lifted.site_ids == [1]
    assert 4.0 <= lifted.visits[0].t <= 8.0
    assert lifted.visits[0].t == pytest.approx(8.0)
    assert check_feasibility(Solution((lifted,)), inst) == []


def test_lift_empty_route():
    inst = make_instance([(1, 0, 1.0, 0, 8)], alpha=4.0)
    assert lift_route(Route(1), reduce(inst, 1.0), inst) == Route(1)


def test_lift_single_copy_reward_lower_bound():
    inst = make_instance([(1, 0, 1.0, 0, 8)], alpha=4.0, Q=3)
    red = reduce(inst, 1.0)
    c = next(c for c in red.copies if c.tau == 2)
    lifted = lift_route(Route(1, [Visit(c.key, 2.5, c.q_fixed)]), red, inst)
    assert c.start <= lifted.visits[0].t <= c.end
    assert lifted.reward >= c.q_fixed


def test_lift_rejects_infeasible_route():
    inst = make_instance([(5, 0, 1.0, 0, 8)], alpha=4.0)
    red = reduce(inst, 1.0)
    c = red.copies[0]
    with pytest.raises(LiftError):
        lift_route(Route(1, [Visit(c.key, c.start, c.q_fixed)]), red, inst)


@pytest.mark.parametrize("eps", [0.25, 0.5, 1.0])
def test_two_sided_reward_bound_random(eps):
    rng = random.Random(17)
    for _ in range(20):
        specs = []
        for _ in range(rng.randint(1, 5)):
            e = rng.randint(0, 6)
            l = rng.randint(e + 1, 8)
            specs.append((rng.uniform(0, 3), rng.uniform(0, 3), rng.randint(10, 20) / (l - e), e, l))
        inst = make_instance(specs, depot=(1.5, 1.5), alpha=2.0, Q=rng.randint(10, 60))
        red = reduce(inst, eps)
        problem = SegmentProblem(red.copies, inst.depot, inst.Q, inst.T)
        reduced = solve_segment(problem, SolverPolicy(mode="exact"))
        lifted = lift_route(reduced, red, inst)
        declared = declared_reward(reduced, red, lifted)
        assert declared <= lifted.reward + 1e-9
        assert lifted.reward <= (1 + eps) * declared + 1e-9
        assert check_feasibility(Solution((lifted,)), inst) == []


def test_reduced_to_dict_labels():
    inst = make_instance([(0, 0, 1.0, 0, 8)], alpha=4.0)
    data = reduced_to_dict(reduce(inst, 1.0))
    assert [s["label"] for s in data["sites"]] == [[1, 2], [1, 3]]
