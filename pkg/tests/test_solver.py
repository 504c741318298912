import numpy as np
import pytest

from mtsrkit.errors import StabilityError
from mtsrkit.model import (
    QnModel,
    ServiceMoments,
    Station,
    build_qn_model,
    build_routing,
    build_trip_plan,
    order_classes,
)
from mtsrkit.mva import approximate_mva, exact_mva, schweitzer_mva
from mtsrkit.solver import (
    ThroughputCurve,
    assemble_metrics,
    mva_throughput_curve,
    solve,
    solve_step2,
    solve_step3,
)
from mtsrkit.travel import TravelTimeTable
from oracles import birth_death_waiting, closed_network_ctmc, soqn_ctmc


def test_exact_mva_two_station_hand_case():
    stations = [
        Station("q", "queue", 1, 1.0, 1.0, 1.0),
        Station("d", "delay", 0, 1.0, 1.0, 0.0),
    ]
    sol = exact_mva(stations, 2)
    assert sol.x_curve == pytest.approx([0.5, 0.8], abs=1e-12)


def test_exact_mva_population_one_has_no_queueing():
    stations = [
        Station("q1", "queue", 1, 1.0, 2.0, 1.0),
        Station("q2", "queue", 2, 0.5, 3.0, 1.0),
        Station("d", "delay", 0, 1.0, 4.0, 0.0),
    ]
    sol = exact_mva(stations, 1)
    demand = 1.0 * 2.0 + 0.5 * 3.0 + 1.0 * 4.0
    assert sol.throughput == pytest.approx(1.0 / demand, abs=1e-12)


@pytest.mark.parametrize("population", [1, 2, 3, 4, 5])
def test_exact_mva_matches_ctmc_single_servers(population):
    visits = [1.0, 0.7, 0.4]
    means = [1.0, 1.8, 0.9]
    stations = [
        Station("a", "queue", 1, visits[0], means[0], 1.0),
        Station("b", "queue", 1, visits[1], means[1], 1.0),
        Station("c", "delay", 0, visits[2], means[2], 0.0),
    ]
    x_ctmc, q_ctmc, _ = closed_network_ctmc(
        visits, means, [1, 1, population], population
    )
    sol = exact_mva(stations, population)
    assert sol.throughput == pytest.approx(x_ctmc, abs=1e-9)
    assert sol.queue["a"] == pytest.approx(q_ctmc[0], abs=1e-9)
    assert sol.queue["b"] == pytest.approx(q_ctmc[1], abs=1e-9)


def test_exact_mva_matches_ctmc_multi_server():
    visits = [1.0, 0.6]
    means = [2.0, 3.0]
    stations = [
        Station("m", "queue", 2, visits[0], means[0], 1.0),
        Station("s", "queue", 1, visits[1], means[1], 1.0),
    ]
    for population in (2, 3, 4):
        x_ctmc, q_ctmc, _ = closed_network_ctmc(visits, means, [2, 1], population)
        sol = exact_mva(stations, population)
        assert sol.throughput == pytest.approx(x_ctmc, abs=1e-9)
        assert sol.queue["m"] == pytest.approx(q_ctmc[0], abs=1e-9)
        # marginal occupancy distribution sums to one
        assert sum(sol.marginals["m"]) == pytest.approx(1.0, abs=1e-9)


def test_exact_mva_marginals_match_ctmc():
    visits = [1.0, 1.0]
    means = [1.0, 2.5]
    stations = [
        Station("m", "queue", 2, visits[0], means[0], 1.0),
        Station("d", "delay", 0, visits[1], means[1], 0.0),
    ]
    population = 4
    x_ctmc, q_ctmc, pi = closed_network_ctmc(visits, means, [2, population], population)
    sol = exact_mva(stations, population)
    from oracles import _compositions

    states = list(_compositions(population, 2))
    marg = np.zeros(population + 1)
    for s, p in zip(states, pi):
        marg[s[0]] += p
    assert np.allclose(sol.marginals["m"], marg, atol=1e-9)


def test_approximations_close_to_exact_on_product_form():
    visits = [1.0, 0.7, 0.4]
    means = [1.0, 1.8, 0.9]
    stations = [
        Station("a", "queue", 1, visits[0], means[0], 1.0),
        Station("b", "queue", 1, visits[1], means[1], 1.0),
        Station("c", "delay", 0, visits[2], means[2], 0.0),
    ]
    for population in (2, 5):
        exact = exact_mva(stations, population).throughput
        assert schweitzer_mva(stations, population).throughput == pytest.approx(exact, rel=0.02)
        assert approximate_mva(stations, population).throughput == pytest.approx(exact, rel=0.005)


def test_approximate_mode_curve_close_to_exact():
    from toys import DEEP_TOY, make_soqn_toy

    model, _, _ = make_soqn_toy(lam=0.01, n_robots=6, **DEEP_TOY)
    exact_curve = mva_throughput_curve(model, "exact")
    approx_curve = mva_throughput_curve(model, "approximate")
    assert np.allclose(approx_curve.th_at, exact_curve.th_at, rtol=0.02)


# --- toy semi-open network fixtures -----------------------------------------

from toys import DEEP_TOY, SHALLOW_TOY, make_soqn_toy


def test_step2_all_robots_idle_at_vanishing_load():
    model, routing, travel = make_soqn_toy(lam=1e-7, n_robots=3, **DEEP_TOY)
    curve = mva_throughput_curve(model)
    step2 = solve_step2(model, curve)
    assert step2.nr_sync == pytest.approx(3.0, abs=1e-3)


def test_step2_nr_sync_and_marginals_match_ctmc():
    # idle-robot count and workstation occupancy distribution, deep network
    n_robots = 2
    model0, _, _ = make_soqn_toy(lam=1e-9, n_robots=n_robots, **DEEP_TOY)
    lam = 0.6 * mva_throughput_curve(model0).max_throughput
    model, routing, travel = make_soqn_toy(lam=lam, n_robots=n_robots, **DEEP_TOY)
    curve = mva_throughput_curve(model)
    step2 = solve_step2(model, curve)

    oracle = soqn_ctmc(
        lam, DEEP_TOY["class_probs"], DEEP_TOY["retrieve"], DEEP_TOY["ws_mean"],
        DEEP_TOY["store"], n_robots, a_max=150,
    )
    assert oracle["truncation_mass"] < 1e-10
    assert step2.nr_sync == pytest.approx(oracle["nr_sync"], rel=0.03)
    for ours, ctmc in zip(step2.pn_w[0], oracle["ws_marginal"]):
        assert abs(ours - ctmc) < 0.03


@pytest.mark.parametrize("n_robots,load", [(2, 0.6), (3, 0.7)])
def test_solver_matches_soqn_ctmc(n_robots, load):
    model0, _, _ = make_soqn_toy(lam=1e-9, n_robots=n_robots, **SHALLOW_TOY)
    lam = load * mva_throughput_curve(model0).max_throughput
    model, routing, travel = make_soqn_toy(lam=lam, n_robots=n_robots, **SHALLOW_TOY)
    result = solve(model, routing, travel)
    assert result.stable

    oracle = soqn_ctmc(
        lam, SHALLOW_TOY["class_probs"], SHALLOW_TOY["retrieve"],
        SHALLOW_TOY["ws_mean"], SHALLOW_TOY["store"], n_robots, a_max=150,
    )
    assert oracle["truncation_mass"] < 1e-10
    assert result.nr_sync == pytest.approx(oracle["nr_sync"], rel=0.03)
    assert result.no_sync == pytest.approx(oracle["no_sync"], rel=0.03)
    assert result.tht == pytest.approx(oracle["tht"], rel=0.03)


def test_rho_r_definition_identity():
    model, routing, travel = make_soqn_toy(lam=0.01, n_robots=3, **DEEP_TOY)
    result = solve(model, routing, travel)
    assert result.rho_r == pytest.approx((1 - result.nr_sync / 3) * 100.0, abs=1e-9)


def test_step3_mm1_closed_form():
    curve = ThroughputCurve(th_at=np.array([1.0]))
    no_sync = solve_step3(curve, 0.5, 1)
    assert no_sync == pytest.approx(0.25 / 0.5, abs=1e-9)  # rho^2/(1-rho)


def test_step3_zero_arrivals():
    curve = ThroughputCurve(th_at=np.array([1.0, 1.5]))
    assert solve_step3(curve, 0.0, 2) == 0.0


def test_step3_matches_direct_chain_solve():
    curve = ThroughputCurve(th_at=np.array([0.5, 0.8]))
    ours = solve_step3(curve, 0.4, 2)
    oracle = birth_death_waiting(0.4, [0.5, 0.8], 2)
    assert ours == pytest.approx(oracle, rel=1e-8)


def test_step3_rejects_unstable():
    curve = ThroughputCurve(th_at=np.array([1.0]))
    with pytest.raises(StabilityError):
        solve_step3(curve, 1.2, 1)


def test_solve_unstable_marker():
    model, routing, travel = make_soqn_toy(lam=10.0, n_robots=2, **DEEP_TOY)
    result = solve(model, routing, travel)
    assert not result.stable
    assert result.tht is None
    assert result.throughput_max < 10.0


def test_throughput_curve_nondecreasing_and_positive():
    model, _, _ = make_soqn_toy(lam=0.01, n_robots=6, **DEEP_TOY)
    curve = mva_throughput_curve(model)
    assert np.all(curve.th_at > 0)
    assert np.all(np.diff(curve.th_at) >= -1e-12)


def test_marginal_distributions_sum_to_one():
    model, routing, travel = make_soqn_toy(lam=0.012, n_robots=4, **DEEP_TOY)
    result = solve(model, routing, travel)
    for pn in result.pn_w:
        assert sum(pn) == pytest.approx(1.0, abs=1e-9)
    assert sum(result.pn_c) == pytest.approx(1.0, abs=1e-9)


# --- reference-mix metric identities ----------------------------------------


def reference_model(n_robots, lam_per_min=2.0, c=4, workers=(1, 1, 1), chargers=4):
    lam = lam_per_min / 60.0
    probs = [0.1, 0.2, 0.3, 0.2, 0.2]
    classes = order_classes([(k + 1, lam * p) for k, p in enumerate(probs)])
    plans = [build_trip_plan(cls, c) for cls in classes]
    retrieve = tuple(
        tuple(tuple(30.0 + 25.0 * nc for _ in workers) for nc in p.totes_per_trip)
        for p in plans
    )
    store = tuple(
        tuple(tuple(30.0 + 25.0 * (nc - 1) + 5.0 * nc for _ in workers) for nc in p.totes_per_trip)
        for p in plans
    )
    travel = TravelTimeTable(
        retrieve=retrieve,
        store=store,
        dwell_to_charge=40.0,
        charge_to_dwell=40.0,
        policy="random",
    )
    routing = build_routing(classes, plans, travel, (20.0, 0.5), list(workers))
    model = build_qn_model(
        classes, plans, routing, travel, (5.0, 8.0), (1500.0, 2100.0),
        n_robots, chargers, list(workers),
    )
    return model, routing, travel


def test_reference_worker_utilization_is_flow_conserving():
    # lam * E[totes/order] * E[handling] / total workers = 23.11%
    model, routing, travel = reference_model(20)
    result = solve(model, routing, travel)
    assert result.stable
    assert result.rho_w == pytest.approx(100.0 * (2.0 / 60.0) * 3.2 * 6.5 / 3.0, abs=0.05)
    assert result.rho_w == pytest.approx(23.1, abs=0.05)


def test_rho_w_invariant_to_robot_count():
    values = []
    for n_r in (16, 20, 24):
        model, routing, travel = reference_model(n_r)
        values.append(solve(model, routing, travel).rho_w)
    assert max(values) - min(values) < 0.05


def test_more_robots_never_hurt():
    prev_tht = np.inf
    prev_rho = 100.0
    for n_r in (14, 18, 22, 26):
        model, routing, travel = reference_model(n_r)
        res = solve(model, routing, travel)
        assert res.tht <= prev_tht + 1e-9
        assert res.rho_r <= prev_rho + 1e-9
        prev_tht, prev_rho = res.tht, res.rho_r


def test_tht_zero_wait_identity():
    # huge robot fleet, tiny load: waits vanish and THT is pure travel+service
    model, routing, travel = reference_model(60, lam_per_min=0.05)
    res = solve(model, routing, travel)
    expected = 0.0
    for o, cls in enumerate(model.classes):
        per_class = 0.0
        for t in range(model.plans[o].trips):
            per_class += (
                travel.retrieve[o][t][0]
                + model.workstation_moments[o][t].mean
                + travel.store[o][t][0]
            )
        expected += cls.probability * per_class
    assert res.tht == pytest.approx(expected, rel=1e-3)


def test_charger_littles_law_consistency():
    model, routing, travel = reference_model(20)
    res = solve(model, routing, travel)
    lam = model.arrival_rate
    flow = 100.0 * lam * model.v_charge * model.charge_moments.mean / model.n_chargers
    assert res.rho_c == pytest.approx(flow, rel=0.01)
