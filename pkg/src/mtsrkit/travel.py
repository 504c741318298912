"""Mean travel times for tote retrieval, storage and charging legs.

Two retrieval sequence policies are supported. Under the random policy a
robot visits the trip's tote shelves in the order they were drawn, so every
leg is an independent draw from the shelf-pair distance distribution and the
means have closed forms. Under the closest-retrieval (CR) policy the robot
always moves to the nearest unvisited tote shelf, which correlates the legs;
those means are estimated by Monte Carlo with a confidence-interval stopping
rule (sampling stops once the 95% half-width is within 1% of the running
mean).

A retrieval stage covers: travel from the dwell cell through all tote
shelves (one pick per tote) and the final leg to the workstation. A storage
stage covers: the leg from the workstation to the first shelf, legs between
the remaining original shelf positions, and one stow per tote. The robot
ends the stage at the last stored shelf, which becomes its next dwell point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LayoutError, SampleBudgetError
from .layout import DistanceMatrix, GridLayout

Z95 = 1.959963984540054  # normal 97.5% quantile

POLICY_RANDOM = "random"
POLICY_CR = "cr"
POLICIES = (POLICY_RANDOM, POLICY_CR)


@dataclass(frozen=True)
class KinematicsConfig:
    """Robot motion and handling parameters."""

    speed: float  # m/s, constant
    pick_time: float  # s per tote pick or stow

    def __post_init__(self):
        if self.speed <= 0:
            raise ValueError("robot speed must be positive")
        if self.pick_time < 0:
            raise ValueError("pick time must be nonnegative")


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    half_width_95: float
    n_samples: int
    seed: int

    @property
    def relative_half_width(self) -> float:
        return self.half_width_95 / self.mean if self.mean else math.inf


@dataclass(frozen=True)
class TravelTimeTable:
    """Per-class, per-trip, per-workstation mean stage times in seconds.

    retrieve[o][t][i] / store[o][t][i] index class o, trip t, workstation i.
    """

    retrieve: tuple
    store: tuple
    dwell_to_charge: float
    charge_to_dwell: float
    policy: str
    estimates: dict = field(default_factory=dict)

    def __post_init__(self):
        for table in (self.retrieve, self.store):
            for per_class in table:
                for per_trip in per_class:
                    for v in per_trip:
                        if v <= 0:
                            raise ValueError("travel times must be positive")


class Welford:
    """Streaming mean/variance accumulator."""

    __slots__ = ("n", "mean", "m2")

    def __init__(self):
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0

    def add(self, x):
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)

    def half_width_95(self):
        if self.n < 2:
            return math.inf
        var = self.m2 / (self.n - 1)
        return Z95 * math.sqrt(var / self.n)

    def converged(self, rel, min_samples):
        if self.n < min_samples or self.mean <= 0:
            return False
        return self.half_width_95() <= rel * self.mean


def random_policy_travel_time(
    dist: DistanceMatrix, kin: KinematicsConfig, nc: int, workstation: int
) -> float:
    """Mean retrieval-stage time under the random sequence policy.

    Equals the average shelf-to-workstation leg plus, per tote, the average
    shelf-pair leg and one pick.
    """
    if nc < 1:
        raise ValueError("tote count must be >= 1")
    if not 0 <= workstation < dist.n_workstations:
        raise KeyError(f"unknown workstation id {workstation}")
    to_ws = float(dist.shelf_to_workstation(workstation).mean())
    pair = float(dist.shelf_pairwise().mean())
    return to_ws / kin.speed + nc * (pair / kin.speed + kin.pick_time)


def random_policy_storage_time(
    dist: DistanceMatrix, kin: KinematicsConfig, nc: int, workstation: int
) -> float:
    """Mean storage-stage time under the random sequence policy.

    One workstation-to-shelf leg, nc-1 shelf-pair legs, and one stow per tote.
    """
    if nc < 1:
        raise ValueError("tote count must be >= 1")
    if not 0 <= workstation < dist.n_workstations:
        raise KeyError(f"unknown workstation id {workstation}")
    from_ws = float(dist.workstation_to_shelf(workstation).mean())
    pair = float(dist.shelf_pairwise().mean())
    return from_ws / kin.speed + (nc - 1) * (pair / kin.speed) + nc * kin.pick_time


def nn_order(d, start, totes):
    """Visit order of `totes` by repeated nearest neighbor from `start`.

    `d` is an indexable distance table (matrix or nested lists). Ties break
    toward the lowest shelf id. Returns (ordered totes, total travel meters).
    """
    remaining = sorted(totes)
    pos = start
    order = []
    total = 0.0
    while remaining:
        best_k = 0
        best_d = d[pos][remaining[0]]
        for k in range(1, len(remaining)):
            dk = d[pos][remaining[k]]
            if dk < best_d:
                best_d = dk
                best_k = k
        pos = remaining.pop(best_k)
        order.append(pos)
        total += best_d
    return order, total


def _tour_meters(d, start, seq):
    pos = start
    total = 0.0
    for s in seq:
        total += d[pos][s]
        pos = s
    return total


def cr_policy_travel_time(
    dist: DistanceMatrix,
    kin: KinematicsConfig,
    nc: int,
    workstation: int,
    seed: int,
    rel_half_width: float = 0.01,
    min_samples: int = 1000,
    max_samples: int = 2_000_000,
) -> MonteCarloEstimate:
    """Monte Carlo mean retrieval-stage time under the CR policy.

    Episodes draw the start cell uniformly over shelves and nc tote shelves
    uniformly (with replacement); the tour repeatedly visits the nearest
    unvisited tote shelf, then travels to the workstation. Stops once the
    95% CI half-width is within `rel_half_width` of the running mean.
    """
    if nc < 1:
        raise ValueError("tote count must be >= 1")
    if not 0 <= workstation < dist.n_workstations:
        raise KeyError(f"unknown workstation id {workstation}")
    rng = np.random.default_rng(seed)
    d = dist.d.tolist()
    n_sh = dist.n_shelves
    ws = dist.workstation(workstation)
    acc = Welford()
    check_every = 512
    while acc.n < max_samples:
        starts = rng.integers(0, n_sh, size=check_every)
        totes = rng.integers(0, n_sh, size=(check_every, nc))
        for k in range(check_every):
            order, meters = nn_order(d, int(starts[k]), [int(s) for s in totes[k]])
            meters += d[order[-1]][ws]
            acc.add(meters / kin.speed + nc * kin.pick_time)
        if acc.converged(rel_half_width, min_samples):
            return MonteCarloEstimate(acc.mean, acc.half_width_95(), acc.n, seed)
    raise SampleBudgetError(
        f"retrieval estimate hit the {max_samples}-sample cap before converging",
        partial=MonteCarloEstimate(acc.mean, acc.half_width_95(), acc.n, seed),
    )


def charging_leg_times(
    dist: DistanceMatrix,
    kin: KinematicsConfig,
    policy: str,
    dwell_samples=None,
    rel_half_width: float = 0.01,
    min_samples: int = 1000,
):
    """Mean dwell-to-charger and charger-to-dwell travel times in seconds.

    Random policy: every shelf is an equally likely dwell point, so both legs
    are direct averages of the directed shelf/charger distances. CR policy:
    averages over the empirical dwell-cell samples collected from simulated
    CR episodes (`dwell_samples`, shelf indices), checked against the same
    1%-of-mean CI rule.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    if policy == POLICY_RANDOM:
        d2c = float(dist.shelf_to_charger().mean()) / kin.speed
        c2d = float(dist.charger_to_shelf().mean()) / kin.speed
        return d2c, c2d
    if dwell_samples is None or len(dwell_samples) == 0:
        raise ValueError("CR charging legs need a non-empty dwell sample set")
    cells = np.asarray(dwell_samples, dtype=int)
    out = []
    for leg in (dist.shelf_to_charger()[cells], dist.charger_to_shelf()[cells]):
        times = leg / kin.speed
        mean = float(times.mean())
        if len(times) >= 2:
            hw = Z95 * float(times.std(ddof=1)) / math.sqrt(len(times))
            if len(times) >= min_samples and mean > 0 and hw > rel_half_width * mean:
                raise SampleBudgetError(
                    "charging-leg estimate not converged for the given dwell samples",
                    partial=MonteCarloEstimate(mean, hw, len(times), -1),
                )
        out.append(mean)
    return out[0], out[1]


class _CrChain:
    """Chained CR episode sampler producing per-(tote count, workstation) means.

    Episodes follow the marginal robot process: orders drawn from the class
    mix, trips visiting nearest-neighbor tote tours, a workstation drawn from
    the worker-proportional probabilities, and a storage tour back to the
    original shelves. The robot's position carries across episodes so the
    dwell-cell distribution is the empirical stationary one.
    """

    def __init__(self, dist, kin, class_probs, trip_totes, p_w, storage_policy, seed):
        self.dist = dist
        self.kin = kin
        self.class_probs = np.asarray(class_probs, dtype=float)
        self.trip_totes = trip_totes
        self.p_w = np.asarray(p_w, dtype=float)
        self.storage_policy = storage_policy
        self.rng = np.random.default_rng(seed)
        self.d = dist.d.tolist()
        self.n_sh = dist.n_shelves
        self.n_w = dist.n_workstations
        self.ws_cells = [dist.workstation(i) for i in range(self.n_w)]
        self.charger = dist.charger
        ncs = sorted({nc for plan in trip_totes for nc in plan})
        self.ret = {(nc, i): Welford() for nc in ncs for i in range(self.n_w)}
        self.sto = {(nc, i): Welford() for nc in ncs for i in range(self.n_w)}
        self.d2c = Welford()
        self.c2d = Welford()
        self.pos = 0  # burn-in from shelf 0; chain forgets the start quickly

    def _episode(self):
        o = int(self.rng.choice(len(self.class_probs), p=self.class_probs))
        v = self.kin.speed
        tp = self.kin.pick_time
        for nc in self.trip_totes[o]:
            totes = [int(s) for s in self.rng.integers(0, self.n_sh, size=nc)]
            order, meters = nn_order(self.d, self.pos, totes)
            last = order[-1]
            chosen = int(self.rng.choice(self.n_w, p=self.p_w))
            for i in range(self.n_w):
                ret_t = (meters + self.d[last][self.ws_cells[i]]) / v + nc * tp
                self.ret[(nc, i)].add(ret_t)
                if self.storage_policy == POLICY_CR:
                    st_order, st_m = nn_order(self.d, self.ws_cells[i], totes)
                else:
                    st_order = totes
                    st_m = _tour_meters(self.d, self.ws_cells[i], totes)
                self.sto[(nc, i)].add(st_m / v + nc * tp)
                if i == chosen:
                    self.pos = st_order[-1]
        self.d2c.add(self.d[self.pos][self.charger] / v)
        self.c2d.add(self.d[self.charger][self.pos] / v)

    def run(self, rel, min_samples, max_episodes, check_every=500, burn_in=200):
        for _ in range(burn_in):
            self._episode()
        for acc in (*self.ret.values(), *self.sto.values(), self.d2c, self.c2d):
            acc.n, acc.mean, acc.m2 = 0, 0.0, 0.0
        buckets = list(self.ret.values()) + list(self.sto.values()) + [self.d2c, self.c2d]
        episodes = 0
        while episodes < max_episodes:
            for _ in range(check_every):
                self._episode()
            episodes += check_every
            if all(b.converged(rel, min_samples) for b in buckets):
                return episodes
        worst = min(b.n for b in buckets)
        raise SampleBudgetError(
            f"CR travel table not converged after {episodes} episodes "
            f"(sparsest bucket has {worst} samples)"
        )


def build_travel_table(
    layout: GridLayout,
    dist: DistanceMatrix,
    kin: KinematicsConfig,
    class_probs,
    trip_totes,
    p_w,
    policy: str,
    storage_policy: str | None = None,
    seed: int = 0,
    rel_half_width: float = 0.01,
    min_samples: int = 1000,
    max_episodes: int = 500_000,
) -> TravelTimeTable:
    """Assemble the full travel-time table for a scenario.

    class_probs: order-class probabilities; trip_totes: per-class list of
    per-trip tote counts; p_w: workstation choice probabilities. The storage
    sequence follows `storage_policy` (defaults to the retrieval policy).
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    storage_policy = storage_policy or policy
    if storage_policy not in POLICIES:
        raise ValueError(f"unknown storage policy {storage_policy!r}")
    n_w = dist.n_workstations
    if len(p_w) != n_w:
        raise LayoutError("p_w length must match workstation count")

    estimates = {}
    if policy == POLICY_RANDOM:
        ret = {
            (nc, i): random_policy_travel_time(dist, kin, nc, i)
            for plan in trip_totes
            for nc in plan
            for i in range(n_w)
        }
        if storage_policy == POLICY_RANDOM:
            sto = {
                (nc, i): random_policy_storage_time(dist, kin, nc, i)
                for (nc, i) in ret
            }
        else:
            chain = _CrChain(dist, kin, class_probs, trip_totes, p_w, storage_policy, seed)
            chain.run(rel_half_width, min_samples, max_episodes)
            sto = {key: acc.mean for key, acc in chain.sto.items()}
        d2c, c2d = charging_leg_times(dist, kin, POLICY_RANDOM)
    else:
        chain = _CrChain(dist, kin, class_probs, trip_totes, p_w, storage_policy, seed)
        episodes = chain.run(rel_half_width, min_samples, max_episodes)
        ret = {key: acc.mean for key, acc in chain.ret.items()}
        sto = {key: acc.mean for key, acc in chain.sto.items()}
        d2c = chain.d2c.mean
        c2d = chain.c2d.mean
        estimates["episodes"] = episodes
        for (nc, i), acc in sorted(chain.ret.items()):
            estimates[f"retrieve_nc{nc}_ws{i}"] = MonteCarloEstimate(
                acc.mean, acc.half_width_95(), acc.n, seed
            )
        for (nc, i), acc in sorted(chain.sto.items()):
            estimates[f"store_nc{nc}_ws{i}"] = MonteCarloEstimate(
                acc.mean, acc.half_width_95(), acc.n, seed
            )
        estimates["dwell_to_charge"] = MonteCarloEstimate(
            chain.d2c.mean, chain.d2c.half_width_95(), chain.d2c.n, seed
        )
        estimates["charge_to_dwell"] = MonteCarloEstimate(
            chain.c2d.mean, chain.c2d.half_width_95(), chain.c2d.n, seed
        )

    retrieve = tuple(
        tuple(tuple(ret[(nc, i)] for i in range(n_w)) for nc in plan)
        for plan in trip_totes
    )
    store = tuple(
        tuple(tuple(sto[(nc, i)] for i in range(n_w)) for nc in plan)
        for plan in trip_totes
    )
    return TravelTimeTable(
        retrieve=retrieve,
        store=store,
        dwell_to_charge=d2c,
        charge_to_dwell=c2d,
        policy=policy,
        estimates=estimates,
    )
