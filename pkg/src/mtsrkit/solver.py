"""Three-step steady-state solution of the robot token network.

Step 1 drops the synchronization node and computes the closed network's
throughput curve over robot populations; its top value is the maximum order
throughput. Step 2 puts a load-dependent station in the synchronization
node's place (service rate = order arrival rate while two or more robots are
idle, boosted by the waiting-order backlog when only one is) and re-solves to
get robot/worker/charger occupancies and waiting times. Step 3 isolates the
synchronization node as a birth-death chain on the number of orders in the
system to get the mean order backlog. The assembled metrics combine all
three.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, StabilityError
from .model import QnModel, RoutingTable
from .mva import LoadDependentStation, approximate_mva, exact_mva
from .travel import TravelTimeTable

STABILITY_MARGIN = 0.999


@dataclass(frozen=True)
class ThroughputCurve:
    """Order completion rate of the inner closed network per robot population."""

    th_at: np.ndarray  # th_at[n-1]: orders/s with n robots circulating

    def __post_init__(self):
        if np.any(self.th_at <= 0):
            raise ValueError("throughput must be positive")
        if np.any(np.diff(self.th_at) < -1e-12):
            raise ValueError("throughput curve must be nondecreasing")

    @property
    def max_throughput(self) -> float:
        return float(self.th_at[-1])

    def at(self, n: int) -> float:
        return float(self.th_at[n - 1])


@dataclass(frozen=True)
class Step2Result:
    nr_sync: float
    wt_w: tuple  # queueing delay before service, per workstation, seconds
    wt_c: float
    pn_w: tuple  # marginal occupancy distribution per workstation
    pn_c: tuple
    throughput: float


@dataclass(frozen=True)
class SolveResult:
    """Steady-state performance metrics of one scenario."""

    stable: bool
    throughput_max: float  # orders/s
    arrival_rate: float  # orders/s
    n_robots: int
    th_curve: tuple
    nr_sync: float | None = None
    no_sync: float | None = None
    wt_w: tuple | None = None
    wt_c: float | None = None
    pn_w: tuple | None = None
    pn_c: tuple | None = None
    rho_r: float | None = None
    rho_w: float | None = None
    rho_c: float | None = None
    tht_o: tuple | None = None
    tht: float | None = None


def mva_throughput_curve(model: QnModel, mode: str = "exact", scv_correction: bool = True) -> ThroughputCurve:
    """Step 1: throughput curve of the closed network without synchronization."""
    if mode == "exact":
        sol = exact_mva(model.stations, model.n_robots, scv_correction)
        return ThroughputCurve(th_at=sol.x_curve.copy())
    if mode == "approximate":
        th = np.empty(model.n_robots)
        for n in range(1, model.n_robots + 1):
            th[n - 1] = approximate_mva(model.stations, n, scv_correction).throughput
        return ThroughputCurve(th_at=th)
    raise ValueError(f"unknown mode {mode!r}")


def _sync_station(lam: float, th: float, n_robots: int) -> LoadDependentStation:
    rates = np.full(n_robots, lam)
    rates[0] = lam * th / (th - lam)
    return LoadDependentStation(name="sync", visit=1.0, rates=rates)


def solve_step2(model: QnModel, curve: ThroughputCurve, scv_correction: bool = True) -> Step2Result:
    """Step 2: re-solve with the synchronization node as a load-dependent station."""
    lam = model.arrival_rate
    th = curve.max_throughput
    if lam >= STABILITY_MARGIN * th:
        raise StabilityError(lam, th)
    stations = list(model.stations) + [_sync_station(lam, th, model.n_robots)]
    sol = exact_mva(stations, model.n_robots, scv_correction)
    n_w = len(model.workers)
    wt_w = []
    pn_w = []
    for i in range(n_w):
        st = model.station(f"ws_{i}")
        wt_w.append(max(0.0, sol.wait[st.name] - st.service_mean))
        pn_w.append(tuple(sol.marginals[st.name]))
    if model.v_charge > 0:
        charger = model.station("charger")
        wt_c = max(0.0, sol.wait["charger"] - charger.service_mean)
        pn_c = tuple(sol.marginals["charger"])
    else:
        wt_c = 0.0
        pn_c = (1.0,) + (0.0,) * model.n_robots
    return Step2Result(
        nr_sync=float(sol.queue["sync"]),
        wt_w=tuple(wt_w),
        wt_c=wt_c,
        pn_w=tuple(pn_w),
        pn_c=pn_c,
        throughput=sol.throughput,
    )


def solve_step3(
    curve: ThroughputCurve,
    lam: float,
    n_robots: int,
    tail_mass: float = 1e-10,
    max_states: int = 1_000_000,
) -> float:
    """Step 3: mean number of waiting orders from a birth-death chain.

    State j counts orders in the system; births at the arrival rate, deaths at
    the closed network's throughput with min(j, robots) busy robots. The chain
    is truncated once the remaining geometric tail is below `tail_mass`.
    """
    if lam == 0:
        return 0.0
    th_full = curve.max_throughput
    if lam >= th_full:
        raise StabilityError(lam, th_full)
    r_tail = lam / th_full
    pi = 1.0
    total = 1.0
    waiting = 0.0
    j = 0
    while True:
        j += 1
        if j > max_states:
            raise ConvergenceError(
                f"birth-death truncation exceeded {max_states} states before the "
                f"tail criterion was met"
            )
        pi *= lam / curve.at(min(j, n_robots))
        total += pi
        if j > n_robots:
            waiting += (j - n_robots) * pi
        if j >= n_robots and pi * r_tail / (1.0 - r_tail) < tail_mass * total:
            break
    # beyond state j the chain is geometric with ratio r_tail; fold in the
    # closed-form remainder so the truncation point does not bias the mean
    geo = r_tail / (1.0 - r_tail)
    total += pi * geo
    waiting += pi * ((j - n_robots) * geo + geo / (1.0 - r_tail))
    return waiting / total


def assemble_metrics(
    model: QnModel,
    routing: RoutingTable,
    travel: TravelTimeTable,
    step2: Step2Result,
    no_sync: float,
    curve: ThroughputCurve,
) -> SolveResult:
    """Combine steps 2 and 3 into throughput times and utilizations.

    A class's throughput time sums, over its trips and the workstation mix,
    the retrieval leg, workstation queueing and service, and the storage leg,
    plus the order backlog's waiting contribution (backlog over arrival rate).
    """
    lam = model.arrival_rate
    p_w = routing.p_w
    n_w = len(p_w)
    tht_o = []
    for o, plan in enumerate(model.plans):
        total = 0.0
        for t in range(plan.trips):
            for i in range(n_w):
                total += p_w[i] * (
                    travel.retrieve[o][t][i]
                    + model.workstation_moments[o][t].mean
                    + travel.store[o][t][i]
                    + step2.wt_w[i]
                )
        if lam > 0:
            total += no_sync / lam
        tht_o.append(total)
    tht = sum(
        cls.probability * tht_o[o] for o, cls in enumerate(model.classes)
    )

    rho_r = (1.0 - step2.nr_sync / model.n_robots) * 100.0

    rho_w = 0.0
    for i in range(n_w):
        m = model.workers[i]
        idle_share = sum(
            (m - n) / m * step2.pn_w[i][n] for n in range(min(m, len(step2.pn_w[i])))
        )
        rho_w += p_w[i] * (1.0 - idle_share)
    rho_w *= 100.0

    if model.v_charge > 0:
        m = model.n_chargers
        idle_share = sum(
            (m - n) / m * step2.pn_c[n] for n in range(min(m, len(step2.pn_c)))
        )
        rho_c = (1.0 - idle_share) * 100.0
    else:
        rho_c = 0.0

    return SolveResult(
        stable=True,
        throughput_max=curve.max_throughput,
        arrival_rate=lam,
        n_robots=model.n_robots,
        th_curve=tuple(float(x) for x in curve.th_at),
        nr_sync=step2.nr_sync,
        no_sync=no_sync,
        wt_w=step2.wt_w,
        wt_c=step2.wt_c,
        pn_w=step2.pn_w,
        pn_c=step2.pn_c,
        rho_r=rho_r,
        rho_w=rho_w,
        rho_c=rho_c,
        tht_o=tuple(tht_o),
        tht=tht,
    )


def solve(
    model: QnModel,
    routing: RoutingTable,
    travel: TravelTimeTable,
    mode: str = "exact",
    scv_correction: bool = True,
) -> SolveResult:
    """Full three-step solve; returns an unstable marker instead of metrics
    when the arrival rate is at or above the maximum throughput."""
    curve = mva_throughput_curve(model, mode, scv_correction)
    lam = model.arrival_rate
    if lam == 0.0:
        # zero load: every robot idles at the synchronization node
        n = model.n_robots
        empty = (1.0,) + (0.0,) * n
        step2 = Step2Result(
            nr_sync=float(n),
            wt_w=(0.0,) * len(model.workers),
            wt_c=0.0,
            pn_w=(empty,) * len(model.workers),
            pn_c=empty,
            throughput=0.0,
        )
        return assemble_metrics(model, routing, travel, step2, 0.0, curve)
    if lam >= STABILITY_MARGIN * curve.max_throughput:
        return SolveResult(
            stable=False,
            throughput_max=curve.max_throughput,
            arrival_rate=lam,
            n_robots=model.n_robots,
            th_curve=tuple(float(x) for x in curve.th_at),
        )
    step2 = solve_step2(model, curve, scv_correction)
    no_sync = solve_step3(curve, lam, model.n_robots)
    return assemble_metrics(model, routing, travel, step2, no_sync, curve)
