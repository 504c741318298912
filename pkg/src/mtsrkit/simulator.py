"""Discrete-event simulation of the warehouse operation.

One replication runs a single event loop over the full robot lifecycle:
Poisson order arrivals matched FCFS with idle robots, per-trip tote tours on
the directed grid, worker service at a probabilistically chosen workstation,
totes returned to their original shelves, and threshold-triggered charging.
Robots are points without interaction, dwell where they finish, and deplete
battery linearly over retrieval/storage stage time.

Replications differ only by sub-seed; metrics are time averages past the
warmup with Student-t confidence intervals across replications.
"""

from __future__ import annotations

import dataclasses
import heapq
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .model import SystemSpec
from .solver import SolveResult
from .travel import nn_order

ARRIVAL, RETRIEVAL_DONE, SERVICE_DONE, STORE_DONE = 0, 1, 2, 3
CHARGE_ARRIVE, CHARGE_DONE, RETURN_DONE, WARMUP_RESET = 4, 5, 6, 7


@dataclass(frozen=True)
class SimConfig:
    replications: int = 5
    horizon_hours: float = 200.0
    warmup_hours: float | None = None  # None: 10% of the horizon
    master_seed: int = 20_240_001

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("need >= 1 replication")
        warmup = self.warmup_seconds
        if not self.horizon_hours * 3600.0 > warmup >= 0:
            raise ValueError("need horizon > warmup >= 0")

    @property
    def horizon_seconds(self) -> float:
        return self.horizon_hours * 3600.0

    @property
    def warmup_seconds(self) -> float:
        if self.warmup_hours is None:
            return 0.1 * self.horizon_hours * 3600.0
        return self.warmup_hours * 3600.0


@dataclass(frozen=True)
class MetricEstimate:
    mean: float
    half_width_95: float
    per_replication: tuple

    def as_dict(self):
        return {
            "mean": self.mean,
            "half_width_95": self.half_width_95,
            "per_replication": list(self.per_replication),
        }


@dataclass(frozen=True)
class SimMetrics:
    tht: MetricEstimate
    tht_o: tuple
    rho_r: MetricEstimate
    rho_w: MetricEstimate
    rho_c: MetricEstimate
    order_queue_len: MetricEstimate
    totes_per_order: MetricEstimate
    charges_per_order: MetricEstimate
    replications: int
    horizon_hours: float
    warmup_hours: float
    master_seed: int
    warnings: tuple = field(default_factory=tuple)


@dataclass(frozen=True)
class ComparisonReport:
    """Per-metric analytical (A) vs simulated (S) values with the absolute
    relative error delta = |A - S| / A * 100."""

    rows: tuple  # (metric, analytical, simulated, delta_pct)

    def delta(self, metric: str) -> float:
        for name, _, _, delta in self.rows:
            if name == metric:
                return delta
        raise KeyError(metric)


def replication_ci(values) -> tuple:
    """Student-t 95% confidence interval half-width across replications."""
    vals = np.asarray(values, dtype=float)
    if len(vals) < 2:
        raise ValueError("confidence interval needs >= 2 replications")
    mean = float(vals.mean())
    half = float(sps.t.ppf(0.975, len(vals) - 1) * vals.std(ddof=1) / math.sqrt(len(vals)))
    return mean, half


class _Robot:
    __slots__ = ("pos", "battery", "cls", "trip", "totes", "station", "dwell", "arrival")

    def __init__(self, pos):
        self.pos = pos
        self.battery = 100.0
        self.cls = -1
        self.trip = 0
        self.totes = None
        self.station = -1
        self.dwell = pos
        self.arrival = 0.0


def _run_replication(spec: SystemSpec, horizon: float, warmup: float, seed) -> dict:
    rng = np.random.default_rng(seed)
    dist = spec.dist
    d = dist.d.tolist()
    n_sh = dist.n_shelves
    n_w = dist.n_workstations
    ws_cells = [dist.workstation(i) for i in range(n_w)]
    charger_cell = dist.charger
    v = spec.kin.speed
    tp = spec.kin.pick_time
    a, b = spec.handling
    c_lo, c_hi = spec.charging
    th_c, dr = spec.energy
    dep_per_s = dr / 60.0
    lam = spec.arrival_rate
    class_probs = np.array([c.probability for c in spec.classes])
    n_classes = len(spec.classes)
    plans = [list(p.totes_per_trip) for p in spec.plans]
    p_w = np.array(spec.p_w)
    workers = list(spec.workers)
    n_chargers = spec.n_chargers
    cr_retrieval = spec.policy == "cr"
    cr_storage = spec.storage_policy == "cr"

    robots = [_Robot(int(s)) for s in rng.integers(0, n_sh, size=spec.n_robots)]
    idle = deque(range(spec.n_robots))
    waiting = deque()  # (arrival_time, class)
    ws_busy = [0] * n_w
    ws_queue = [deque() for _ in range(n_w)]
    charger_busy = 0
    charger_queue = deque()

    heap = []
    seq = 0

    def push(t, kind, data):
        nonlocal seq
        heapq.heappush(heap, (t, seq, kind, data))
        seq += 1

    # time-average accumulators; reset at the warmup event
    stats_t0 = warmup
    last = {"t": 0.0, "idle": spec.n_robots, "oq": 0, "charge": 0}
    ws_last = [0.0] * n_w
    integ = {"idle": 0.0, "oq": 0.0, "charge": 0.0}
    ws_integ = [0.0] * n_w

    def advance(now):
        dt = now - last["t"]
        if dt > 0.0:
            integ["idle"] += last["idle"] * dt
            integ["oq"] += last["oq"] * dt
            integ["charge"] += last["charge"] * dt
            for i in range(n_w):
                ws_integ[i] += ws_busy[i] * dt
            last["t"] = now

    arrived = 0
    completed = 0
    tht_sum = [0.0] * n_classes
    tht_n = [0] * n_classes
    totes_done = 0
    charge_events = 0
    counting = warmup == 0.0

    def tour_time(robot, totes):
        if cr_retrieval:
            order, meters = nn_order(d, robot.pos, totes)
        else:
            order, meters = totes, 0.0
            pos = robot.pos
            for s in totes:
                meters += d[pos][s]
                pos = s
        return order, meters

    def start_trip(now, r_idx):
        robot = robots[r_idx]
        nc = plans[robot.cls][robot.trip]
        totes = [int(s) for s in rng.integers(0, n_sh, size=nc)]
        order, meters = tour_time(robot, totes)
        robot.totes = totes
        station = int(rng.choice(n_w, p=p_w))
        robot.station = station
        meters += d[order[-1]][ws_cells[station]]
        duration = meters / v + nc * tp
        robot.battery -= dep_per_s * duration
        robot.pos = ws_cells[station]
        push(now + duration, RETRIEVAL_DONE, r_idx)

    def start_service(now, r_idx):
        robot = robots[r_idx]
        i = robot.station
        ws_busy[i] += 1
        duration = float(rng.uniform(a, b, size=len(robot.totes)).sum())
        push(now + duration, SERVICE_DONE, r_idx)

    def start_storage(now, r_idx):
        robot = robots[r_idx]
        if cr_storage:
            order, meters = nn_order(d, robot.pos, robot.totes)
        else:
            order, meters = robot.totes, 0.0
            pos = robot.pos
            for s in robot.totes:
                meters += d[pos][s]
                pos = s
        nc = len(robot.totes)
        duration = meters / v + nc * tp
        robot.battery -= dep_per_s * duration
        robot.pos = order[-1]
        push(now + duration, STORE_DONE, r_idx)

    def assign(now, r_idx, order_arrival, cls):
        robot = robots[r_idx]
        robot.cls = cls
        robot.trip = 0
        robot.arrival = order_arrival
        start_trip(now, r_idx)

    def becomes_idle(now, r_idx):
        if waiting:
            order_arrival, cls = waiting.popleft()
            advance(now)
            last["oq"] -= 1
            assign(now, r_idx, order_arrival, cls)
        else:
            advance(now)
            last["idle"] += 1
            idle.append(r_idx)

    push(rng.exponential(1.0 / lam), ARRIVAL, int(rng.choice(n_classes, p=class_probs)))
    if warmup > 0.0:
        push(warmup, WARMUP_RESET, -1)

    while heap:
        now, _, kind, data = heapq.heappop(heap)
        if now > horizon:
            break

        if kind == ARRIVAL:
            advance(now)
            if counting:
                arrived += 1
            cls = data
            if idle:
                r_idx = idle.popleft()
                last["idle"] -= 1
                assign(now, r_idx, now, cls)
            else:
                waiting.append((now, cls))
                last["oq"] += 1
            nxt = now + rng.exponential(1.0 / lam)
            if nxt <= horizon:
                push(nxt, ARRIVAL, int(rng.choice(n_classes, p=class_probs)))

        elif kind == RETRIEVAL_DONE:
            r_idx = data
            robot = robots[r_idx]
            i = robot.station
            if ws_busy[i] < workers[i]:
                advance(now)
                start_service(now, r_idx)
            else:
                ws_queue[i].append(r_idx)

        elif kind == SERVICE_DONE:
            r_idx = data
            robot = robots[r_idx]
            i = robot.station
            advance(now)
            ws_busy[i] -= 1
            if counting:
                totes_done += len(robot.totes)
            if ws_queue[i]:
                nxt_robot = ws_queue[i].popleft()
                start_service(now, nxt_robot)
            start_storage(now, r_idx)

        elif kind == STORE_DONE:
            r_idx = data
            robot = robots[r_idx]
            robot.trip += 1
            if robot.trip < len(plans[robot.cls]):
                start_trip(now, r_idx)
            else:
                if counting and robot.arrival >= stats_t0:
                    tht_sum[robot.cls] += now - robot.arrival
                    tht_n[robot.cls] += 1
                    completed += 1
                robot.cls = -1
                if robot.battery < th_c:
                    if counting:
                        charge_events += 1
                    robot.dwell = robot.pos
                    push(now + d[robot.pos][charger_cell] / v, CHARGE_ARRIVE, r_idx)
                else:
                    becomes_idle(now, r_idx)

        elif kind == CHARGE_ARRIVE:
            r_idx = data
            robots[r_idx].pos = charger_cell
            if charger_busy < n_chargers:
                advance(now)
                charger_busy += 1
                last["charge"] += 1
                push(now + float(rng.uniform(c_lo, c_hi)), CHARGE_DONE, r_idx)
            else:
                charger_queue.append(r_idx)

        elif kind == CHARGE_DONE:
            r_idx = data
            robot = robots[r_idx]
            robot.battery = 100.0
            advance(now)
            charger_busy -= 1
            last["charge"] -= 1
            if charger_queue:
                nxt_robot = charger_queue.popleft()
                charger_busy += 1
                last["charge"] += 1
                push(now + float(rng.uniform(c_lo, c_hi)), CHARGE_DONE, nxt_robot)
            push(now + d[charger_cell][robot.dwell] / v, RETURN_DONE, r_idx)

        elif kind == RETURN_DONE:
            r_idx = data
            robots[r_idx].pos = robots[r_idx].dwell
            becomes_idle(now, r_idx)

        else:  # WARMUP_RESET
            advance(now)
            for key in integ:
                integ[key] = 0.0
            for i in range(n_w):
                ws_integ[i] = 0.0
            arrived = completed = totes_done = charge_events = 0
            tht_sum = [0.0] * n_classes
            tht_n = [0] * n_classes
            counting = True

    advance(horizon)
    span = horizon - stats_t0
    in_flight = sum(1 for r in robots if r.cls >= 0)

    rho_w = sum(
        p_w[i] * ws_integ[i] / (span * workers[i]) for i in range(n_w)
    ) * 100.0
    done = max(1, completed)
    return {
        "tht": sum(tht_sum) / max(1, sum(tht_n)),
        "tht_o": [tht_sum[o] / tht_n[o] if tht_n[o] else math.nan for o in range(n_classes)],
        "rho_r": (1.0 - integ["idle"] / (span * spec.n_robots)) * 100.0,
        "rho_w": rho_w,
        "rho_c": integ["charge"] / (span * n_chargers) * 100.0,
        "order_queue_len": integ["oq"] / span,
        "totes_per_order": totes_done / done,
        "charges_per_order": charge_events / done,
        "completed": completed,
        "arrived": arrived,
        "in_flight": in_flight,
        "queued_at_end": len(waiting),
    }


def simulate(spec: SystemSpec, config: SimConfig) -> SimMetrics:
    """Run all replications and aggregate confidence intervals."""
    horizon = config.horizon_seconds
    warmup = config.warmup_seconds
    reps = [
        _run_replication(spec, horizon, warmup, [config.master_seed, k])
        for k in range(config.replications)
    ]

    def estimate(key):
        values = [r[key] for r in reps]
        if len(values) == 1:
            return MetricEstimate(values[0], math.nan, tuple(values))
        mean, half = replication_ci(values)
        return MetricEstimate(mean, half, tuple(values))

    tht_o = []
    for o in range(len(spec.classes)):
        values = [r["tht_o"][o] for r in reps]
        if len(values) == 1:
            tht_o.append(MetricEstimate(values[0], math.nan, tuple(values)))
        else:
            mean, half = replication_ci(values)
            tht_o.append(MetricEstimate(mean, half, tuple(values)))

    metrics = SimMetrics(
        tht=estimate("tht"),
        tht_o=tuple(tht_o),
        rho_r=estimate("rho_r"),
        rho_w=estimate("rho_w"),
        rho_c=estimate("rho_c"),
        order_queue_len=estimate("order_queue_len"),
        totes_per_order=estimate("totes_per_order"),
        charges_per_order=estimate("charges_per_order"),
        replications=config.replications,
        horizon_hours=config.horizon_hours,
        warmup_hours=warmup / 3600.0,
        master_seed=config.master_seed,
        warnings=(),
    )
    warnings = []
    for name in ("tht", "rho_r", "rho_w", "rho_c"):
        est = getattr(metrics, name)
        if est.mean and not math.isnan(est.half_width_95):
            if est.half_width_95 > 0.01 * abs(est.mean):
                warnings.append(
                    f"{name}: 95% half-width {est.half_width_95:.3g} exceeds 1% of the "
                    f"mean; extend the horizon or add replications"
                )
    if warnings:
        metrics = dataclasses.replace(metrics, warnings=tuple(warnings))
    return metrics


def compare(analytical: SolveResult, simulated: SimMetrics) -> ComparisonReport:
    """Relative-error table between the solver and the simulator."""
    if not analytical.stable:
        raise ValueError("analytical result is unstable; comparison refused")
    pairs = [
        ("tht", analytical.tht, simulated.tht.mean),
        ("rho_r", analytical.rho_r, simulated.rho_r.mean),
        ("rho_w", analytical.rho_w, simulated.rho_w.mean),
        ("rho_c", analytical.rho_c, simulated.rho_c.mean),
        ("order_queue_len", analytical.no_sync, simulated.order_queue_len.mean),
    ]
    rows = []
    for name, a_val, s_val in pairs:
        if a_val == 0.0:
            delta = 0.0 if s_val == 0.0 else math.inf
        else:
            delta = abs(a_val - s_val) / abs(a_val) * 100.0
        rows.append((name, a_val, s_val, delta))
    return ComparisonReport(rows=tuple(rows))
