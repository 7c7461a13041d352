"""Policy-specific cost physics for the three lane policies.

For one (scenario, q0, R, F) point this module tabulates per-mile travel
times along the corridor, accumulates them into line-haul times, adds
waiting, crowding, signalized-intersection delay, fares and operating
expenses, and rolls everything into the four system-cost components:

* bus users, bus operator, auto users, and lane-policy signal cost.

Lane allocation per policy:

* MTP  - all lanes shared; one traffic stream carries autos plus bus PCEs.
* EBLP - one lane exclusive to buses, the rest carry all autos.
* HOVLP - one lane for buses plus high-occupancy autos, the rest carry
  low-occupancy autos.

Positions are miles from the outer boundary; all travelers move toward the
inner end, so flows at x accumulate demand from [x, length].
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .config import Scenario, SignalParams
from .demand import DemandField, OccupancySplit, cumulative_demand, occupancy_split
from .errors import UndefinedServiceError, ValidationError
from .numeric import CorridorGrid, cumulative_values, integrate_values

__all__ = [
    "Policy",
    "POLICY_ORDER",
    "CostBreakdown",
    "EvaluationContext",
    "build_context",
    "bpr_time",
    "unit_time_profile",
    "line_haul_time",
    "waiting_time",
    "discomfort_cost",
    "intersection_delay",
    "delay_args",
    "total_intersection_delay",
    "bus_disutility",
    "auto_disutility",
    "cost_breakdown",
]


class Policy(enum.Enum):
    """The three lane policies; declaration order is the fixed tie-break order."""

    MTP = "mtp"
    EBLP = "eblp"
    HOVLP = "hovlp"

    @classmethod
    def parse(cls, name: str) -> "Policy":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValidationError(
                f"unknown policy {name!r}; expected one of "
                f"{', '.join(p.value for p in cls)}"
            ) from None


POLICY_ORDER: tuple[Policy, ...] = (Policy.MTP, Policy.EBLP, Policy.HOVLP)

_CLASSES_BY_POLICY: dict[Policy, tuple[str, ...]] = {
    Policy.MTP: ("auto", "bus"),
    Policy.EBLP: ("auto", "bus"),
    Policy.HOVLP: ("low_occ_auto", "high_occ_auto", "bus"),
}


def _check_class(policy: Policy, traveler_class: str) -> None:
    if traveler_class not in _CLASSES_BY_POLICY[policy]:
        raise ValidationError(
            f"traveler class {traveler_class!r} is not defined under {policy.value}; "
            f"valid classes: {', '.join(_CLASSES_BY_POLICY[policy])}"
        )


@dataclass(frozen=True)
class CostBreakdown:
    """Hourly system-cost components for one policy at one operating point."""

    bus_user: float
    bus_operator: float
    auto_user: float
    signal: float
    total: float = field(init=False)

    def __post_init__(self) -> None:
        for name in ("bus_user", "bus_operator", "auto_user", "signal"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < -1e-9:
                raise ValidationError(f"cost component {name} must be >= 0, got {value}")
            if value < 0:  # clip roundoff-scale negatives
                object.__setattr__(self, name, 0.0)
        object.__setattr__(
            self, "total", self.bus_user + self.bus_operator + self.auto_user + self.signal
        )


@dataclass(frozen=True)
class EvaluationContext:
    """One (scenario, q0, R, F) operating point with tabulated node profiles.

    Profiles are computed lazily per (policy, class) and memoized, so nested
    integrals reuse a single tabulation pass.
    """

    scenario: Scenario
    q0: float
    auto_share: float
    frequency: float
    grid: CorridorGrid
    demand_field: DemandField
    split: OccupancySplit
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # -- node-sampled demand quantities ------------------------------------

    def _cached(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def q_auto_cum(self) -> np.ndarray:
        return self._cached(
            "Qa", lambda: cumulative_demand(self.demand_field, "auto", self.grid.nodes)
        )

    def q_bus_cum(self) -> np.ndarray:
        return self._cached(
            "Qb", lambda: cumulative_demand(self.demand_field, "bus", self.grid.nodes)
        )

    def density_auto(self) -> np.ndarray:
        field_ = self.demand_field
        return self._cached(
            "qa",
            lambda: field_.auto_share * field_.q0 * (1.0 - self.grid.nodes / field_.length_mi),
        )

    def density_bus(self) -> np.ndarray:
        field_ = self.demand_field
        return self._cached(
            "qb",
            lambda: (1.0 - field_.auto_share)
            * field_.q0
            * (1.0 - self.grid.nodes / field_.length_mi),
        )


def build_context(scenario: Scenario, q0: float, auto_share: float, frequency: float) -> EvaluationContext:
    if frequency < 0:
        raise ValidationError(f"frequency must be >= 0, got {frequency}")
    demand_field = DemandField(q0=q0, length_mi=scenario.geometry.length_mi, auto_share=auto_share)
    return EvaluationContext(
        scenario=scenario,
        q0=q0,
        auto_share=auto_share,
        frequency=frequency,
        grid=scenario.grid(),
        demand_field=demand_field,
        split=occupancy_split(scenario.occupancy),
    )


def bpr_time(t0: float, alpha: float, beta: float, volume, capacity: float):
    """Congested per-mile travel time t0*(1 + alpha*(volume/capacity)^beta), hr/mi."""
    if capacity <= 0:
        raise ValidationError(f"capacity must be > 0, got {capacity}")
    v = np.asarray(volume, dtype=float)
    if np.any(v < 0):
        raise ValidationError("volume must be >= 0")
    out = t0 * (1.0 + alpha * (v / capacity) ** beta)
    return float(out) if np.isscalar(volume) else out


def _class_volume_and_capacity(ctx: EvaluationContext, policy: Policy, traveler_class: str):
    """Auto-equivalent volume array (veh/hr) and lane-group capacity for a class."""
    geom = ctx.scenario.geometry
    pce = ctx.scenario.bpr.bus_pce
    split = ctx.split
    q_auto_veh = ctx.q_auto_cum() / split.average_occupancy
    if policy is Policy.MTP:
        volume = q_auto_veh + pce * ctx.frequency
        return volume, geom.n_lanes * geom.lane_capacity_vph
    if policy is Policy.EBLP:
        if traveler_class == "bus":
            volume = np.full_like(q_auto_veh, pce * ctx.frequency)
            return volume, geom.lane_capacity_vph
        return q_auto_veh, (geom.n_lanes - 1) * geom.lane_capacity_vph
    # HOVLP: the reserved lane carries buses and high-occupancy autos
    if traveler_class == "low_occ_auto":
        volume = split.low_fraction * ctx.q_auto_cum() / ctx.scenario.occupancy.low_occupancy
        return volume, (geom.n_lanes - 1) * geom.lane_capacity_vph
    volume = (
        split.high_fraction * ctx.q_auto_cum() / ctx.scenario.occupancy.high_occupancy
        + pce * ctx.frequency
    )
    return volume, geom.lane_capacity_vph


def unit_time_profile(ctx: EvaluationContext, policy: Policy, traveler_class: str) -> np.ndarray:
    """Per-mile travel time at every grid node for one policy and traveler class."""
    _check_class(policy, traveler_class)
    key = ("unit", policy, traveler_class)

    def build() -> np.ndarray:
        volume, capacity = _class_volume_and_capacity(ctx, policy, traveler_class)
        bpr = ctx.scenario.bpr
        if traveler_class == "bus":
            t0, alpha, beta = bpr.t0_bus, bpr.alpha_bus, bpr.beta_bus
        else:
            t0, alpha, beta = bpr.t0_auto, bpr.alpha_auto, bpr.beta_auto
        profile = bpr_time(t0, alpha, beta, volume, capacity)
        profile.setflags(write=False)
        return profile

    return ctx._cached(key, build)


def _cumulative_time(ctx: EvaluationContext, policy: Policy, traveler_class: str) -> np.ndarray:
    key = ("cum", policy, traveler_class)
    return ctx._cached(
        key, lambda: cumulative_values(unit_time_profile(ctx, policy, traveler_class), ctx.grid)
    )


def line_haul_time(ctx: EvaluationContext, policy: Policy, traveler_class: str, x):
    """In-vehicle time from the boundary to x (hours); linear between grid nodes."""
    cum = _cumulative_time(ctx, policy, traveler_class)
    out = np.interp(np.asarray(x, dtype=float), ctx.grid.nodes, cum)
    return float(out) if np.isscalar(x) else out


def waiting_time(ctx: EvaluationContext, x):
    """Expected stop waiting time at x (hours): headway term plus crowding term.

    w(x) = g1/F + (g2/F) * (Q_bus(x) / (capacity*F))^g3.  Decreasing in F.
    """
    if ctx.frequency <= 0:
        raise UndefinedServiceError("waiting time is undefined at zero bus frequency")
    bus = ctx.scenario.bus
    freq = ctx.frequency
    q_bus = cumulative_demand(ctx.demand_field, "bus", x)
    load_ratio = q_bus / (bus.capacity_pax * freq)
    out = bus.wait_gamma1 / freq + bus.wait_gamma2 / freq * load_ratio**bus.wait_gamma3
    return float(out) if np.isscalar(x) else out


def _waiting_profile(ctx: EvaluationContext) -> np.ndarray:
    return ctx._cached("wait", lambda: waiting_time(ctx, ctx.grid.nodes))


def _crowding_density(ctx: EvaluationContext) -> np.ndarray:
    """Discomfort rate per onboard hour, $/hr: quad*Q_bus^2 + lin*Q_bus."""
    bus = ctx.scenario.bus

    def build() -> np.ndarray:
        q_bus = ctx.q_bus_cum()
        return bus.discomfort_quad * q_bus**2 + bus.discomfort_lin * q_bus

    return ctx._cached("crowding", build)


def discomfort_cost(ctx: EvaluationContext, policy: Policy, x):
    """Crowding discomfort accumulated over the ride to x, $ per passenger."""
    key = ("discomfort", policy)

    def build() -> np.ndarray:
        rate = _crowding_density(ctx) * unit_time_profile(ctx, policy, "bus")
        return cumulative_values(rate, ctx.grid)

    cum = ctx._cached(key, build)
    out = np.interp(np.asarray(x, dtype=float), ctx.grid.nodes, cum)
    return float(out) if np.isscalar(x) else out


def intersection_delay(signal: SignalParams, arriving_vph, capacity_vph: float):
    """Average signal delay in seconds per vehicle (uniform plus overflow term).

    Control delay for a pre-timed signal: a uniform term from the red phase,
    capped at saturation, plus an overflow term that grows with the
    volume-to-capacity ratio X and stays finite and continuous across X = 1.
    """
    if capacity_vph <= 0:
        raise ValidationError(f"intersection capacity must be > 0, got {capacity_vph}")
    x_ratio = np.asarray(arriving_vph, dtype=float) / capacity_vph
    if np.any(x_ratio < 0):
        raise ValidationError("arriving volume must be >= 0")
    g = signal.green_ratio
    uniform = (
        signal.cycle_s * (1.0 - g) ** 2 / (2.0 * (1.0 - np.minimum(1.0, x_ratio) * g))
    )
    t_i = signal.analysis_period_hr
    spare = 8.0 * signal.incremental_delay_factor * signal.upstream_filter * x_ratio
    overflow = 900.0 * t_i * (
        (x_ratio - 1.0) + np.sqrt((x_ratio - 1.0) ** 2 + spare / (capacity_vph * t_i))
    )
    out = uniform + overflow
    return float(out) if np.isscalar(arriving_vph) else out


def delay_volume_components(
    scenario: Scenario,
    split: OccupancySplit,
    q0: float,
    auto_share: float,
    policy: Policy,
    traveler_class: str,
    i: int,
) -> tuple[float, float, float]:
    """Arriving volume at intersection i as (base, slope_per_bus, capacity).

    The arriving volume is affine in frequency: base + slope*F.  ``segment``
    volume mode counts autos entering between this intersection and the next;
    ``cumulative`` counts every auto still upstream.  Bus through-volume is
    spread uniformly across the intersections.
    """
    _check_class(policy, traveler_class)
    geom = scenario.geometry
    n = geom.n_intersections
    if not 1 <= i <= n:
        raise ValidationError(f"intersection index must lie in [1, {n}], got {i}")
    field_ = DemandField(q0=q0, length_mi=geom.length_mi, auto_share=auto_share)
    l_i = geom.length_mi * i / (n + 1)
    l_next = geom.length_mi * (i + 1) / (n + 1)
    if scenario.solver.delay_volume_mode == "segment":
        auto_veh = (
            cumulative_demand(field_, "auto", l_i) - cumulative_demand(field_, "auto", l_next)
        ) / split.average_occupancy
    else:
        auto_veh = cumulative_demand(field_, "auto", l_i) / split.average_occupancy
    bus_slope = scenario.bpr.bus_pce / (n + 1)
    cap = geom.lane_capacity_vph
    if policy is Policy.MTP:
        return auto_veh, bus_slope, geom.n_lanes * cap
    if policy is Policy.EBLP:
        if traveler_class == "bus":
            return 0.0, bus_slope, cap
        return auto_veh, 0.0, (geom.n_lanes - 1) * cap
    mu = scenario.occupancy.low_share
    if traveler_class == "low_occ_auto":
        return mu * auto_veh, 0.0, (geom.n_lanes - 1) * cap
    return (1.0 - mu) * auto_veh, bus_slope, cap


def delay_args(
    ctx: EvaluationContext, policy: Policy, traveler_class: str, i: int
) -> tuple[float, float]:
    """(arriving veh/hr, capacity veh/hr) for one intersection and class."""
    base, slope, cap = delay_volume_components(
        ctx.scenario, ctx.split, ctx.q0, ctx.auto_share, policy, traveler_class, i
    )
    return base + slope * ctx.frequency, cap


def _per_vehicle_delays(ctx: EvaluationContext, policy: Policy, traveler_class: str) -> np.ndarray:
    """Seconds of signal delay per vehicle of a class at each intersection."""
    n = ctx.scenario.geometry.n_intersections
    out = np.empty(n)
    for i in range(1, n + 1):
        arriving, cap = delay_args(ctx, policy, traveler_class, i)
        out[i - 1] = intersection_delay(ctx.scenario.signal, arriving, cap)
    return out


def total_intersection_delay(ctx: EvaluationContext, policy: Policy, mode: str) -> float:
    """Passenger-hours of signal delay per hour for one mode under a policy.

    Each intersection's per-vehicle delay is charged to every passenger still
    upstream of it (the cumulative mode demand at the intersection).
    """
    if mode not in ("auto", "bus"):
        raise ValidationError(f"mode must be 'auto' or 'bus', got {mode!r}")
    geom = ctx.scenario.geometry
    if geom.n_intersections == 0:
        return 0.0
    positions = np.asarray(geom.intersection_positions)
    if mode == "bus":
        passengers = cumulative_demand(ctx.demand_field, "bus", positions)
        seconds = _per_vehicle_delays(ctx, policy, "bus")
        return float(np.dot(seconds, passengers)) / 3600.0
    passengers = cumulative_demand(ctx.demand_field, "auto", positions)
    if policy is Policy.HOVLP:
        seconds = (
            ctx.split.low_fraction * _per_vehicle_delays(ctx, policy, "low_occ_auto")
            + ctx.split.high_fraction * _per_vehicle_delays(ctx, policy, "high_occ_auto")
        )
    else:
        seconds = _per_vehicle_delays(ctx, policy, "auto")
    return float(np.dot(seconds, passengers)) / 3600.0


def bus_disutility(ctx: EvaluationContext, policy: Policy, x):
    """Generalized cost of one bus trip boarding at x, $ per passenger."""
    econ = ctx.scenario.econ
    wait = waiting_time(ctx, x)
    ride = line_haul_time(ctx, policy, "bus", x)
    out = (
        econ.vot_wait * wait
        + econ.vot_bus * ride
        + discomfort_cost(ctx, policy, x)
        + ctx.scenario.bus.fare
    )
    return float(out) if np.isscalar(x) else out


def auto_disutility(ctx: EvaluationContext, policy: Policy, traveler_class: str, x):
    """Generalized cost of one auto trip from x, $ per passenger.

    Monetary costs are shared by the vehicle's occupants, so the divisor is
    the class occupancy (fleet average under shared-lane policies).
    """
    _check_class(policy, traveler_class)
    if traveler_class == "bus":
        raise ValidationError("auto_disutility does not apply to the bus class")
    occ = ctx.scenario.occupancy
    if policy is Policy.HOVLP:
        divisor = occ.low_occupancy if traveler_class == "low_occ_auto" else occ.high_occupancy
    else:
        divisor = ctx.split.average_occupancy
    econ = ctx.scenario.econ
    x_arr = np.asarray(x, dtype=float)
    ride = line_haul_time(ctx, policy, traveler_class, x_arr)
    out = econ.vot_auto * ride + (econ.auto_fixed_cost + econ.auto_cost_per_mi * x_arr) / divisor
    return float(out) if np.isscalar(x) else out


def _bus_user_cost(ctx: EvaluationContext, policy: Policy) -> float:
    density_bus = ctx.density_bus()
    if not density_bus.any():  # no bus travelers anywhere
        return 0.0
    unit_cost = bus_disutility(ctx, policy, ctx.grid.nodes)
    in_corridor = integrate_values(unit_cost * density_bus, ctx.grid)
    delay = total_intersection_delay(ctx, policy, "bus")
    return in_corridor + ctx.scenario.econ.vot_bus * delay


def _bus_operator_cost(ctx: EvaluationContext, policy: Policy) -> float:
    bus = ctx.scenario.bus
    round_trip = 2.0 * _cumulative_time(ctx, policy, "bus")[-1]
    return bus.fixed_operating_cost + bus.variable_operating_cost * round_trip * ctx.frequency


def _auto_user_cost(ctx: EvaluationContext, policy: Policy) -> float:
    density_auto = ctx.density_auto()
    if not density_auto.any():
        return 0.0
    nodes = ctx.grid.nodes
    if policy is Policy.HOVLP:
        unit_cost = ctx.split.low_fraction * auto_disutility(
            ctx, policy, "low_occ_auto", nodes
        ) + ctx.split.high_fraction * auto_disutility(ctx, policy, "high_occ_auto", nodes)
    else:
        unit_cost = auto_disutility(ctx, policy, "auto", nodes)
    in_corridor = integrate_values(unit_cost * density_auto, ctx.grid)
    delay = total_intersection_delay(ctx, policy, "auto")
    return in_corridor + ctx.scenario.econ.vot_auto * delay


def _signal_cost(scenario: Scenario, policy: Policy) -> float:
    costs = scenario.lane_costs
    length = scenario.geometry.length_mi
    if policy is Policy.EBLP:
        return costs.ebl_fixed + costs.ebl_variable_per_mi * length
    if policy is Policy.HOVLP:
        return costs.hovl_fixed + costs.hovl_variable_per_mi * length
    return 0.0


def cost_breakdown(
    scenario: Scenario, policy: Policy, q0: float, auto_share: float, frequency: float
) -> CostBreakdown:
    """Hourly system cost of running ``policy`` at one (q0, R, F) point.

    Defined for any F > 0 (and for F = 0 when no one rides the bus), whether
    or not F satisfies the service-capacity constraint; the optimizer is
    responsible for feasibility.
    """
    ctx = build_context(scenario, q0, auto_share, frequency)
    if frequency == 0 and (1.0 - auto_share) * q0 > 0:
        raise UndefinedServiceError(
            "bus demand is positive but frequency is zero; waiting time is undefined"
        )
    return CostBreakdown(
        bus_user=_bus_user_cost(ctx, policy),
        bus_operator=_bus_operator_cost(ctx, policy),
        auto_user=_auto_user_cost(ctx, policy),
        signal=_signal_cost(scenario, policy),
    )
