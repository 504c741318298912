import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mtsrkit.errors import EnergyModelError
from mtsrkit.model import (
    OrderClass,
    TripPlan,
    build_qn_model,
    build_routing,
    build_trip_plan,
    charging_service_moments,
    order_classes,
    workstation_probabilities,
    workstation_service_moments,
)
from mtsrkit.travel import TravelTimeTable


def make_classes():
    # reference order mix: 1..5 lines with probabilities .1/.2/.3/.2/.2
    lam = 2.0 / 60.0
    probs = [0.1, 0.2, 0.3, 0.2, 0.2]
    return order_classes([(k + 1, lam * p) for k, p in enumerate(probs)])


def flat_travel(classes, plans, n_w, retrieve=100.0, store=80.0):
    return TravelTimeTable(
        retrieve=tuple(
            tuple(tuple(retrieve for _ in range(n_w)) for _ in range(p.trips))
            for p in plans
        ),
        store=tuple(
            tuple(tuple(store for _ in range(n_w)) for _ in range(p.trips))
            for p in plans
        ),
        dwell_to_charge=30.0,
        charge_to_dwell=30.0,
        policy="random",
    )


def test_trip_plan_split_cases():
    c = OrderClass(lines=5, arrival_rate=1.0, probability=1.0)
    plan = build_trip_plan(c, 4)
    assert plan.trips == 2
    assert plan.totes_per_trip == (4, 1)

    c = OrderClass(lines=4, arrival_rate=1.0, probability=1.0)
    assert build_trip_plan(c, 4).totes_per_trip == (4,)

    c = OrderClass(lines=3, arrival_rate=1.0, probability=1.0)
    assert build_trip_plan(c, 1).totes_per_trip == (1, 1, 1)


@settings(max_examples=50, deadline=None)
@given(lines=st.integers(1, 40), c=st.integers(1, 8))
def test_trip_plan_conserves_lines(lines, c):
    plan = build_trip_plan(OrderClass(lines, 1.0, 1.0), c)
    assert sum(plan.totes_per_trip) == lines
    assert all(n == c for n in plan.totes_per_trip[:-1])
    assert 1 <= plan.totes_per_trip[-1] <= c


def test_trip_plan_invariant_enforced():
    with pytest.raises(ValueError):
        TripPlan(trips=2, totes_per_trip=(2, 1), buffer_positions=4)


def test_workstation_moments_reference_values():
    m = workstation_service_moments(5.0, 8.0, 4)
    assert m.mean == pytest.approx(26.0)
    assert m.scv == pytest.approx(9.0 / 2028.0)  # 0.0044379...

    m = workstation_service_moments(6.0, 6.0, 1)
    assert m.mean == 6.0
    assert m.scv == 0.0

    m = workstation_service_moments(5.0, 8.0, 1)
    assert m.mean == pytest.approx(6.5)
    assert m.scv == pytest.approx(9.0 / 507.0)  # 0.017751...


def test_workstation_moments_match_monte_carlo():
    rng = np.random.default_rng(123)
    for nc in (1, 4):
        draws = rng.uniform(5.0, 8.0, size=(200_000, nc)).sum(axis=1)
        m = workstation_service_moments(5.0, 8.0, nc)
        assert m.mean == pytest.approx(draws.mean(), rel=2e-3)
        assert m.scv == pytest.approx(draws.var() / draws.mean() ** 2, rel=2e-2)


def test_workstation_moments_scv_decays_like_one_over_nc():
    base = workstation_service_moments(5.0, 8.0, 1).scv
    for nc in range(1, 6):
        assert workstation_service_moments(5.0, 8.0, nc).scv == pytest.approx(base / nc)


def test_workstation_moments_reject_bad_interval():
    with pytest.raises(ValueError):
        workstation_service_moments(8.0, 5.0, 1)


def test_charging_moments():
    m = charging_service_moments(1800.0, 1800.0)
    assert m.mean == 1800.0 and m.scv == 0.0

    m = charging_service_moments(1500.0, 2100.0)
    assert m.mean == pytest.approx(1800.0)
    assert m.scv == pytest.approx(360000.0 / (3 * 12_960_000.0))

    rng = np.random.default_rng(99)
    draws = rng.uniform(1500.0, 2100.0, size=300_000)
    assert m.scv == pytest.approx(draws.var() / draws.mean() ** 2, rel=2e-2)

    k = 3.0
    scaled = charging_service_moments(1500.0 * k, 2100.0 * k)
    assert scaled.mean == pytest.approx(1800.0 * k)
    assert scaled.scv == pytest.approx(m.scv)

    with pytest.raises(ValueError):
        charging_service_moments(2100.0, 1500.0)


def test_order_classes_normalize():
    classes = make_classes()
    assert sum(c.probability for c in classes) == pytest.approx(1.0, abs=1e-12)
    assert [c.probability for c in classes] == pytest.approx([0.1, 0.2, 0.3, 0.2, 0.2])


def test_routing_next_trip_probabilities():
    classes = make_classes()
    plans = [build_trip_plan(c, 4) for c in classes]
    travel = flat_travel(classes, plans, 3)
    routing = build_routing(classes, plans, travel, (20.0, 0.5), [1, 1, 1])
    # 5-line class: two trips
    assert routing.p_next[4] == (1.0, 0.0)
    assert routing.p_charge[4][0] == 0.0
    assert routing.p_charge[4][1] > 0.0


def test_routing_hand_computed_charge_probability():
    classes = order_classes([(1, 1.0)])
    plans = [build_trip_plan(classes[0], 1)]
    # single trip, ATT = retrieve + store = 288 s = 4.8 min -> DB = 2.4%
    travel = flat_travel(classes, plans, 1, retrieve=160.0, store=128.0)
    routing = build_routing(classes, plans, travel, (20.0, 0.5), [1])
    assert routing.battery_per_order == pytest.approx(2.4)
    assert routing.p_charge[0][0] == pytest.approx(0.03)
    assert routing.p_idle[0][0] == pytest.approx(0.97)


def test_routing_zero_depletion_disables_charging():
    classes = make_classes()
    plans = [build_trip_plan(c, 4) for c in classes]
    travel = flat_travel(classes, plans, 3)
    routing = build_routing(classes, plans, travel, (20.0, 0.0), [1, 1, 1])
    assert routing.battery_per_order == 0.0
    assert all(p[-1] == 0.0 for p in routing.p_charge)
    model = build_qn_model(
        classes, plans, routing, travel, (5.0, 8.0), (1500.0, 2100.0), 20, 4, [1, 1, 1]
    )
    assert model.v_charge == 0.0
    assert all("charge" not in s.name and s.name != "charger" for s in model.stations)


def test_routing_infeasible_energy_model():
    classes = order_classes([(1, 1.0)])
    plans = [build_trip_plan(classes[0], 1)]
    travel = flat_travel(classes, plans, 1, retrieve=90_000.0, store=90_000.0)
    with pytest.raises(EnergyModelError):
        build_routing(classes, plans, travel, (20.0, 3.0), [1])


@settings(max_examples=30, deadline=None)
@given(
    th_c=st.floats(0.0, 80.0),
    dr=st.floats(0.0, 1.0),
    c=st.integers(1, 6),
)
def test_routing_branches_sum_to_one(th_c, dr, c):
    classes = make_classes()
    plans = [build_trip_plan(cls, c) for cls in classes]
    travel = flat_travel(classes, plans, 3)
    routing = build_routing(classes, plans, travel, (th_c, dr), [1, 1, 1])
    for o in range(len(classes)):
        for t in range(plans[o].trips):
            total = routing.p_next[o][t] + routing.p_charge[o][t] + routing.p_idle[o][t]
            assert abs(total - 1.0) < 1e-12
            assert 0.0 <= routing.p_charge[o][t] <= 1.0
            assert 0.0 <= routing.p_idle[o][t] <= 1.0


def test_workstation_probabilities_proportional_to_workers():
    assert workstation_probabilities([2, 1, 1]) == (0.5, 0.25, 0.25)
    with pytest.raises(ValueError):
        workstation_probabilities([0, 1])


def test_qn_model_reference_visit_ratios():
    classes = make_classes()
    plans = [build_trip_plan(c, 4) for c in classes]
    travel = flat_travel(classes, plans, 3)
    routing = build_routing(classes, plans, travel, (20.0, 0.5), [1, 1, 1])
    model = build_qn_model(
        classes, plans, routing, travel, (5.0, 8.0), (1500.0, 2100.0), 20, 4, [1, 1, 1]
    )
    # per-station visit = sum over (class, trip) of P_o / 3
    e_nt = sum(c.probability * p.trips for c, p in zip(classes, plans))
    for i in range(3):
        ws = model.station(f"ws_{i}")
        assert ws.visit == pytest.approx(e_nt / 3.0)
        assert ws.kind == "queue" and ws.servers == 1
    # sync normalization: class probabilities sum to 1
    assert sum(c.probability for c in model.classes) == pytest.approx(1.0)
    # uniform final-trip charge probability p implies charge visit ratio p
    p = routing.p_charge[0][plans[0].trips - 1]
    assert model.v_charge == pytest.approx(p)


def test_qn_model_mean_totes_per_order():
    classes = make_classes()
    plans = [build_trip_plan(c, 4) for c in classes]
    mean_totes = sum(
        c.probability * sum(p.totes_per_trip) for c, p in zip(classes, plans)
    )
    assert mean_totes == pytest.approx(3.2)


def test_qn_model_aggregate_service_mean():
    classes = make_classes()
    plans = [build_trip_plan(c, 4) for c in classes]
    travel = flat_travel(classes, plans, 3)
    routing = build_routing(classes, plans, travel, (20.0, 0.5), [1, 1, 1])
    model = build_qn_model(
        classes, plans, routing, travel, (5.0, 8.0), (1500.0, 2100.0), 20, 4, [1, 1, 1]
    )
    # visit-weighted workstation mean: E[totes]/E[trips] * 6.5 s
    e_nt = sum(c.probability * p.trips for c, p in zip(classes, plans))
    expected = 3.2 / e_nt * 6.5
    assert model.station("ws_0").service_mean == pytest.approx(expected)
