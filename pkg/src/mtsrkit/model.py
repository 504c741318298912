"""Queueing-network assembly for the multi-tote warehouse.

Order classes (by line count) are mapped to trip plans bounded by the robot's
tote buffer, stations get per-class service moments, and routing collapses to
normalized visit ratios with the synchronization node's ratio fixed at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EnergyModelError
from .layout import DistanceMatrix
from .travel import KinematicsConfig, TravelTimeTable

PROB_TOL = 1e-9


@dataclass(frozen=True)
class OrderClass:
    """One order class: all orders with the same number of lines."""

    lines: int
    arrival_rate: float  # orders/s
    probability: float

    def __post_init__(self):
        if self.lines < 1:
            raise ValueError("order class needs >= 1 line")
        if self.arrival_rate < 0:
            raise ValueError("arrival rate must be nonnegative")
        if not 0 <= self.probability <= 1:
            raise ValueError("class probability must lie in [0,1]")


def order_classes(lines_and_rates) -> tuple:
    """Build classes with probabilities proportional to per-class rates."""
    total = sum(rate for _, rate in lines_and_rates)
    if total <= 0:
        raise ValueError("total arrival rate must be positive")
    return tuple(
        OrderClass(lines=lines, arrival_rate=rate, probability=rate / total)
        for lines, rate in lines_and_rates
    )


def order_classes_from_mix(lines_and_probs, total_rate_per_s: float) -> tuple:
    """Build classes from an explicit probability mix; the total rate may be
    zero (used by capacity planning when probing the no-load corner)."""
    total_p = sum(p for _, p in lines_and_probs)
    if abs(total_p - 1.0) > PROB_TOL:
        raise ValueError("class probabilities must sum to 1")
    if total_rate_per_s < 0:
        raise ValueError("total rate must be nonnegative")
    return tuple(
        OrderClass(lines=lines, arrival_rate=total_rate_per_s * p, probability=p)
        for lines, p in lines_and_probs
    )


@dataclass(frozen=True)
class TripPlan:
    """Trips needed for one order class given C buffer positions."""

    trips: int
    totes_per_trip: tuple
    buffer_positions: int

    def __post_init__(self):
        if self.trips != len(self.totes_per_trip):
            raise ValueError("trip count mismatch")
        for k, nc in enumerate(self.totes_per_trip):
            full = self.buffer_positions if k < self.trips - 1 else None
            if full is not None and nc != full:
                raise ValueError("all trips but the last must use the full buffer")
            if not 1 <= nc <= self.buffer_positions:
                raise ValueError("totes per trip must lie in [1, C]")


def build_trip_plan(order: OrderClass, buffer_positions: int) -> TripPlan:
    """Greedy plan: fill the buffer every trip, remainder on the last trip."""
    if buffer_positions < 1:
        raise ValueError("buffer positions must be >= 1")
    trips = math.ceil(order.lines / buffer_positions)
    totes = [buffer_positions] * (trips - 1)
    totes.append(order.lines - (trips - 1) * buffer_positions)
    return TripPlan(trips=trips, totes_per_trip=tuple(totes), buffer_positions=buffer_positions)


@dataclass(frozen=True)
class ServiceMoments:
    mean: float
    scv: float  # squared coefficient of variation

    def __post_init__(self):
        if self.mean <= 0:
            raise ValueError("service mean must be positive")
        if self.scv < 0:
            raise ValueError("scv must be nonnegative")


def workstation_service_moments(a: float, b: float, nc: int) -> ServiceMoments:
    """Moments of the total handling time for nc totes, each uniform on [a, b]."""
    if not 0 <= a <= b:
        raise ValueError("need 0 <= a <= b for the handling-time distribution")
    if nc < 1:
        raise ValueError("tote count must be >= 1")
    mean = nc * (a + b) / 2.0
    scv = ((b - a) ** 2) / (3.0 * (a + b) ** 2) / nc
    return ServiceMoments(mean=mean, scv=scv)


def charging_service_moments(c: float, d: float) -> ServiceMoments:
    """Moments of a uniform charging duration on [c, d] seconds."""
    if not 0 < c <= d:
        raise ValueError("need 0 < c <= d for the charging-time distribution")
    return ServiceMoments(mean=(c + d) / 2.0, scv=((d - c) ** 2) / (3.0 * (c + d) ** 2))


def workstation_probabilities(workers) -> tuple:
    """Workstation choice probabilities, proportional to worker counts."""
    total = sum(workers)
    if total <= 0 or any(w < 1 for w in workers):
        raise ValueError("every workstation needs >= 1 worker")
    return tuple(w / total for w in workers)


@dataclass(frozen=True)
class RoutingTable:
    """Post-trip branch probabilities and the energy model behind them."""

    p_w: tuple
    p_next: tuple  # [o][t]
    p_charge: tuple  # [o][t], nonzero only on the final trip
    p_idle: tuple  # [o][t]
    battery_per_order: float  # mean depletion %, order-averaged
    avg_trip_travel: tuple  # [o][t] seconds, workstation-averaged
    charge_threshold: float  # %
    depletion_rate: float  # %/min while moving


def build_routing(classes, plans, travel: TravelTimeTable, energy, workers) -> RoutingTable:
    """Branch probabilities from the travel table and the linear battery model.

    energy: (charge_threshold_pct, depletion_pct_per_min). Depletion accrues
    over the average per-trip travel time; a robot charges after its final
    trip with probability battery_per_order / (100 - threshold), the
    reciprocal of the mean number of orders one charge supports.
    """
    th_c, dr = energy
    if not 0 <= th_c < 100:
        raise ValueError("charge threshold must lie in [0, 100)")
    if dr < 0:
        raise ValueError("depletion rate must be nonnegative")
    p_w = workstation_probabilities(workers)
    att = []
    for o, plan in enumerate(plans):
        row = []
        for t in range(plan.trips):
            row.append(
                sum(
                    p_w[i] * (travel.retrieve[o][t][i] + travel.store[o][t][i])
                    for i in range(len(p_w))
                )
            )
        att.append(tuple(row))
    db = sum(
        cls.probability * sum(dr * trip_att / 60.0 for trip_att in att[o])
        for o, cls in enumerate(classes)
    )
    p_charge_final = db / (100.0 - th_c)
    if p_charge_final > 1.0:
        raise EnergyModelError(
            f"average per-order depletion {db:.2f}% exceeds the usable budget "
            f"{100.0 - th_c:.2f}%"
        )
    p_next, p_charge, p_idle = [], [], []
    for plan in plans:
        nt = plan.trips
        p_next.append(tuple(1.0 if t < nt - 1 else 0.0 for t in range(nt)))
        p_charge.append(tuple(p_charge_final if t == nt - 1 else 0.0 for t in range(nt)))
        p_idle.append(
            tuple(
                1.0 - p_next[-1][t] - p_charge[-1][t]
                for t in range(nt)
            )
        )
    return RoutingTable(
        p_w=p_w,
        p_next=tuple(p_next),
        p_charge=tuple(p_charge),
        p_idle=tuple(p_idle),
        battery_per_order=db,
        avg_trip_travel=tuple(att),
        charge_threshold=th_c,
        depletion_rate=dr,
    )


@dataclass(frozen=True)
class Station:
    """One service center with visit-weighted aggregate service moments."""

    name: str
    kind: str  # "delay" (infinite server) or "queue" (FCFS multi-server)
    servers: int
    visit: float
    service_mean: float
    service_scv: float

    @property
    def demand(self) -> float:
        return self.visit * self.service_mean


def _aggregate(components):
    """Visit-weighted first two moments -> (visit, mean, scv).

    components: iterable of (visit, mean, scv).
    """
    v_total = sum(v for v, _, _ in components)
    if v_total <= 0:
        return 0.0, 0.0, 0.0
    mean = sum(v * m for v, m, _ in components) / v_total
    m2 = sum(v * m * m * (1.0 + s) for v, m, s in components) / v_total
    scv = max(0.0, m2 / (mean * mean) - 1.0)
    return v_total, mean, scv


@dataclass(frozen=True)
class QnModel:
    """Closed-network view of the warehouse for a fixed robot population."""

    stations: tuple
    n_robots: int
    arrival_rate: float  # orders/s, all classes
    v_charge: float
    classes: tuple
    plans: tuple
    workstation_moments: tuple  # [o][t] ServiceMoments at the chosen workstation
    charge_moments: ServiceMoments
    n_chargers: int
    workers: tuple

    def station(self, name: str) -> Station:
        for s in self.stations:
            if s.name == name:
                return s
        raise KeyError(name)


@dataclass(frozen=True)
class SystemSpec:
    """Physical description of one scenario, shared by the analytical solver
    and the discrete-event simulator."""

    dist: DistanceMatrix
    kin: KinematicsConfig
    classes: tuple
    plans: tuple
    workers: tuple
    n_chargers: int
    n_robots: int
    handling: tuple  # (a, b) per-tote workstation seconds
    charging: tuple  # (c, d) charging seconds
    energy: tuple  # (threshold %, depletion %/min)
    policy: str
    storage_policy: str

    @property
    def p_w(self) -> tuple:
        return workstation_probabilities(self.workers)

    @property
    def arrival_rate(self) -> float:
        return sum(c.arrival_rate for c in self.classes)


def build_qn_model(
    classes,
    plans,
    routing: RoutingTable,
    travel: TravelTimeTable,
    handling,
    charging,
    n_robots: int,
    n_chargers: int,
    workers,
) -> QnModel:
    """Stations and normalized visit ratios for the robot token network.

    handling: (a, b) per-tote workstation seconds; charging: (c, d) seconds.
    Visit ratios are normalized to one synchronization-node visit per order:
    every trip of class o visits workstation i's retrieval/service/storage
    stations with ratio P_o * P_w[i]; the charging loop is visited with the
    order-averaged final-trip charging probability.
    """
    if abs(sum(c.probability for c in classes) - 1.0) > PROB_TOL:
        raise ValueError("class probabilities must sum to 1")
    if len(plans) != len(classes):
        raise ValueError("plans and classes must align")
    a, b = handling
    c, d = charging
    n_w = len(workers)
    p_w = routing.p_w
    if len(p_w) != n_w:
        raise ValueError("routing table covers a different workstation count")

    ws_moments = tuple(
        tuple(workstation_service_moments(a, b, nc) for nc in plan.totes_per_trip)
        for plan in plans
    )
    charge_m = charging_service_moments(c, d)

    stations = []
    for i in range(n_w):
        retrieve, serve, store = [], [], []
        for o, (cls, plan) in enumerate(zip(classes, plans)):
            for t in range(plan.trips):
                v = cls.probability * p_w[i]
                retrieve.append((v, travel.retrieve[o][t][i], 0.0))
                serve.append((v, ws_moments[o][t].mean, ws_moments[o][t].scv))
                store.append((v, travel.store[o][t][i], 0.0))
        v, m, s = _aggregate(retrieve)
        stations.append(Station(f"retrieve_{i}", "delay", 0, v, m, s))
        v, m, s = _aggregate(serve)
        stations.append(Station(f"ws_{i}", "queue", workers[i], v, m, s))
        v, m, s = _aggregate(store)
        stations.append(Station(f"store_{i}", "delay", 0, v, m, s))

    v_charge = sum(
        cls.probability * routing.p_charge[o][plans[o].trips - 1]
        for o, cls in enumerate(classes)
    )
    if v_charge > 0:
        stations.append(Station("dwell_to_charge", "delay", 0, v_charge, travel.dwell_to_charge, 0.0))
        stations.append(Station("charger", "queue", n_chargers, v_charge, charge_m.mean, charge_m.scv))
        stations.append(Station("charge_to_dwell", "delay", 0, v_charge, travel.charge_to_dwell, 0.0))

    lam = sum(cls.arrival_rate for cls in classes)
    return QnModel(
        stations=tuple(stations),
        n_robots=n_robots,
        arrival_rate=lam,
        v_charge=v_charge,
        classes=tuple(classes),
        plans=tuple(plans),
        workstation_moments=ws_moments,
        charge_moments=charge_m,
        n_chargers=n_chargers,
        workers=tuple(workers),
    )
