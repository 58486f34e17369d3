import pytest

from mprpvs.instance import Site
from mprpvs.solution import (
    Route,
    Solution,
    Visit,
    check_feasibility,
    interpolate_schedule,
    order_profit,
    profit,
    route_cost,
    schedule_route,
    solution_from_dict,
    solution_to_dict,
)

from conftest import make_instance


def test_route_cost_examples():
    inst = make_instance([(3, 4, 1, 0, 8), (1, 0, 1, 0, 8), (2, 0, 1, 0, 8)])
    assert route_cost(Route(1), inst) == 0
    assert route_cost(Route(1, [Visit(1, 5, 0)]), inst) == pytest.approx(10)
    assert route_cost(Route(1, [Visit(2, 1, 0), Visit(3, 2, 0)]), inst) == pytest.approx(4)


def test_profit_examples():
    inst = make_instance([(2, 0, 10, 0, 1), (0.5, 0, 1, 0, 8)], m=2)
    assert profit(Solution.empty(2), inst) == 0
    one = Route(1, [Visit(1, 1, 10)])
    assert profit(Solution((one,)), inst) == pytest.approx(6)
    loss = Route(2, [Visit(2, 0.5, 0)])
    assert profit(Solution((one, loss)), inst) == pytest.approx(5)
    assert profit(Solution((loss, one)), inst) == pytest.approx(5)


def _inst():
    return make_instance([(1, 0, 2, 1, 5), (2, 0, 2, 2, 6), (0, 3, 1, 3, 8)], m=2, Q=100)


def test_feasible_solution_has_no_violations():
    inst = _inst()
    sol = Solution((Route(1, [Visit(1, 2, 2), Visit(2, 3, 2)]), Route(2, [Visit(3, 4, 1)])))
    assert check_feasibility(sol, inst) == []


def test_duplicate_site_is_constraint_7():
    inst = _inst()
    sol = Solution((Route(1, [Visit(3, 4, 1)]), Route(2, [Visit(3, 5, 2)])))
    out = check_feasibility(sol, inst)
    assert [(v.constraint, v.site) for v in out] == [(7, 3)]


def test_early_visit_is_constraint_4():
    inst = make_instance([(0.5, 0, 2, 2, 5)])
    sol = Solution((Route(1, [Visit(1, 1.5, 0)]),))
    assert [v.constraint for v in check_feasibility(sol, inst)] == [4]


def test_capacity_travel_and_production():
    inst = make_instance([(1, 0, 2, 1, 5), (2, 0, 2, 2, 6)], Q=3)
    over = Solution((Route(1, [Visit(1, 3, 4)]),))
    assert 3 in {v.constraint for v in check_feasibility(over, inst)}
    fast = Solution((Route(1, [Visit(1, 1.0, 0), Visit(2, 1.5, 0)]),))
    assert {v.constraint for v in check_feasibility(fast, inst)} >= {4, 5}
    wrong_q = Solution((Route(1, [Visit(1, 2, 1.0)]),))
    assert [v.constraint for v in check_feasibility(wrong_q, inst)] == [6]


def test_unknown_site_and_vehicle():
    inst = _inst()
    out = check_feasibility(Solution((Route(3, [Visit(9, 1, 0)]),)), inst)
    assert {v.constraint for v in out} == {2}


def test_profit_bounded_by_total_supply():
    inst = _inst()
    route = schedule_route([1, 2], inst)
    assert profit(Solution((route,)), inst) <= sum(s.q_max for s in inst.sites)


def test_schedule_route_latest_when_capacity_loose():
    inst = make_instance([(3, 4, 2, 0, 5)], Q=100)
    route = schedule_route([1], inst)
    assert route.visits[0].t == pytest.approx(5)
    assert route.reward == pytest.approx(10)


def test_schedule_route_capped_by_capacity():
    inst = make_instance([(1, 0, 2, 0, 5)], Q=4)
    route = schedule_route([1], inst)
    assert route.reward == pytest.approx(4)
    assert check_feasibility(Solution((route,)), inst) == []


def test_schedule_route_infeasible_order():
    inst = make_instance([(5, 0, 1, 0, 1)])
    assert schedule_route([1], inst) is None
    assert order_profit([1], inst) is None


def test_interpolate_schedule_rejects_earliest_overload():
    times = interpolate_schedule((0, 0), [(1, 0)], [(2.0, 4.0)], lambda j, t: 10.0 * (t - 2), 1.0)
    assert times == pytest.approx([2.1])
    assert interpolate_schedule((0, 0), [(1, 0)], [(2.0, 4.0)], lambda j, t: 5 + t, 1.0) is None


def test_solution_dict_roundtrip():
    inst = _inst()
    sol = Solution((schedule_route([1, 2], inst, 1), Route(2)))
    data = solution_to_dict(sol, inst)
    assert data["meta"]["violations"] == []
    assert solution_from_dict(data) == sol
