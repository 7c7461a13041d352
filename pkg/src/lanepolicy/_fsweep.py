"""Vectorized total-cost evaluation across a whole frequency lattice.

The inner loop of the nested optimization evaluates the same (scenario,
policy, q0, R) point at dozens of candidate frequencies.  Every traffic
volume in the model is affine in frequency F, so when the congestion
exponents are integers the per-mile time profiles expand binomially into
polynomials in F whose coefficient profiles do not depend on F.  All corridor
integrals then collapse into per-degree moments computed once per operating
point; the cost at every candidate frequency is then a short polynomial plus
a closed-form waiting term plus the (cheap) per-intersection delay formula.

This reproduces `costmodel.cost_breakdown` totals to floating-point
reordering error (the expansion is algebraically exact); a property test
pins the two paths together.  Non-integer exponents fall back to per-point
evaluation.
"""

from __future__ import annotations

import math

import numpy as np

from .config import Scenario
from .costmodel import Policy, cost_breakdown, intersection_delay, _signal_cost
from .demand import DemandField, cumulative_demand, occupancy_split
from .errors import ValidationError

__all__ = ["FrequencySweep", "frequency_cost_table"]

_MAX_POLY_DEGREE = 12


def _cumulative_rows(values: np.ndarray, h: float) -> np.ndarray:
    """Row-wise cumulative integral along the last axis (pairwise Simpson).

    Matches ``numeric.cumulative_values`` bit for bit on every row.
    """
    f0 = values[..., :-2:2]
    f1 = values[..., 1:-1:2]
    f2 = values[..., 2::2]
    out = np.zeros_like(values)
    out[..., 2::2] = np.cumsum(h / 3.0 * (f0 + 4.0 * f1 + f2), axis=-1)
    out[..., 1::2] = out[..., :-2:2] + h / 12.0 * (5.0 * f0 + 8.0 * f1 - f2)
    return out


def _power_stack(base: np.ndarray, degree: int) -> np.ndarray:
    """(degree+1, n) rows base^0, base^1, ..., base^degree."""
    out = np.empty((degree + 1, base.shape[0]))
    out[0] = 1.0
    for j in range(1, degree + 1):
        out[j] = out[j - 1] * base
    return out


def _poly_eval(coeffs: np.ndarray, f_values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(f_values)
    for c in coeffs[::-1]:
        out = out * f_values + c
    return out


class FrequencySweep:
    """Total cost as a cheap function of frequency at fixed (policy, q0, R).

    Build once per operating point, then call :meth:`totals` on any number of
    candidate-frequency arrays.
    """

    def __init__(self, scenario: Scenario, policy: Policy, q0: float, auto_share: float):
        bpr = scenario.bpr
        self.scenario = scenario
        self.policy = policy
        self.q0 = q0
        self.auto_share = auto_share
        self.exact = (
            float(bpr.beta_auto).is_integer()
            and float(bpr.beta_bus).is_integer()
            and bpr.beta_auto <= _MAX_POLY_DEGREE
            and bpr.beta_bus <= _MAX_POLY_DEGREE
        )
        if self.exact:
            self._precompute()

    # -- slow but fully general path ----------------------------------------

    def _fallback_totals(self, f_arr: np.ndarray) -> np.ndarray:
        return np.array(
            [
                cost_breakdown(self.scenario, self.policy, self.q0, self.auto_share, float(f)).total
                for f in f_arr
            ]
        )

    # -- polynomial moment precomputation ------------------------------------

    def _coeff_rows(self, base, slope, capacity, t0, alpha, degree) -> np.ndarray:
        """Rows P_k(x) with per-mile time t(x, F) = sum_k P_k(x) F^k."""
        if slope == 0.0:
            rows = np.empty((1, base.shape[0]))
            rows[0] = t0 * (1.0 + alpha * (base / capacity) ** degree)
            return rows
        scale = t0 * alpha / capacity**degree
        powers = _power_stack(base, degree)
        rows = np.empty((degree + 1, base.shape[0]))
        for k in range(degree + 1):
            rows[k] = scale * math.comb(degree, k) * powers[degree - k] * slope**k
        rows[0] += t0
        return rows

    def _precompute(self) -> None:
        scenario, policy = self.scenario, self.policy
        geom, bpr, bus, econ = scenario.geometry, scenario.bpr, scenario.bus, scenario.econ
        grid = scenario.grid()
        nodes = grid.nodes
        h = grid.h
        split = occupancy_split(scenario.occupancy)
        self._split = split
        field_ = DemandField(q0=self.q0, length_mi=geom.length_mi, auto_share=self.auto_share)
        q_auto_cum = cumulative_demand(field_, "auto", nodes)
        q_bus_cum = cumulative_demand(field_, "bus", nodes)
        density = self.q0 * (1.0 - nodes / geom.length_mi)
        w_bus = grid.simpson_weights * ((1.0 - self.auto_share) * density)
        w_auto = grid.simpson_weights * (self.auto_share * density)
        q_auto_veh = q_auto_cum / split.average_occupancy
        cap = geom.lane_capacity_vph
        pce = bpr.bus_pce
        beta_a, beta_b = int(bpr.beta_auto), int(bpr.beta_bus)

        # (base volume profile, slope per bus, lane-group capacity) per class
        if policy is Policy.MTP:
            groups = {
                "auto": (q_auto_veh, pce, geom.n_lanes * cap),
                "bus": (q_auto_veh, pce, geom.n_lanes * cap),
            }
        elif policy is Policy.EBLP:
            groups = {
                "auto": (q_auto_veh, 0.0, (geom.n_lanes - 1) * cap),
                "bus": (np.zeros_like(nodes), pce, cap),
            }
        else:
            occ = scenario.occupancy
            hov = split.high_fraction * q_auto_cum / occ.high_occupancy
            groups = {
                "low_occ_auto": (
                    split.low_fraction * q_auto_cum / occ.low_occupancy,
                    0.0,
                    (geom.n_lanes - 1) * cap,
                ),
                "high_occ_auto": (hov, pce, cap),
                "bus": (hov, pce, cap),
            }

        def coeffs_for(name: str) -> np.ndarray:
            base, slope, capacity = groups[name]
            if name == "bus":
                return self._coeff_rows(base, slope, capacity, bpr.t0_bus, bpr.alpha_bus, beta_b)
            return self._coeff_rows(base, slope, capacity, bpr.t0_auto, bpr.alpha_auto, beta_a)

        # bus side: ride time, round trip, crowding discomfort
        p_bus = coeffs_for("bus")
        cum_bus = _cumulative_rows(p_bus, h)
        self._ride_bus = cum_bus @ w_bus
        self._round_trip = 2.0 * cum_bus[:, -1]
        crowding = bus.discomfort_quad * q_bus_cum**2 + bus.discomfort_lin * q_bus_cum
        self._discomfort = _cumulative_rows(crowding * p_bus, h) @ w_bus
        self._boardings = float(np.sum(w_bus))
        self._load_moment = float(q_bus_cum**bus.wait_gamma3 @ w_bus)

        # auto side: ride time (HOVLP blends the two classes) and money
        money = econ.auto_fixed_cost + econ.auto_cost_per_mi * nodes
        if policy is Policy.HOVLP:
            occ = scenario.occupancy
            ride_low = _cumulative_rows(coeffs_for("low_occ_auto"), h) @ w_auto
            ride_high = _cumulative_rows(coeffs_for("high_occ_auto"), h) @ w_auto
            ride = split.high_fraction * ride_high
            ride[: ride_low.shape[0]] += split.low_fraction * ride_low
            self._ride_auto = ride
            per_pax = split.low_fraction / occ.low_occupancy + split.high_fraction / occ.high_occupancy
            self._money = float(money * per_pax @ w_auto)
        else:
            self._ride_auto = _cumulative_rows(coeffs_for("auto"), h) @ w_auto
            self._money = float(money @ w_auto) / split.average_occupancy

        # intersections: affine arriving volume per class, passengers upstream
        # (vectorized restatement of costmodel.delay_volume_components; the
        # fast-vs-direct property test pins the two)
        n_inter = geom.n_intersections
        self._delay_classes: list[tuple[np.ndarray, float, float, np.ndarray]] = []
        if n_inter > 0:
            positions = np.asarray(geom.intersection_positions)
            downstream = positions + geom.length_mi / (n_inter + 1)
            pax_bus = cumulative_demand(field_, "bus", positions)
            pax_auto = cumulative_demand(field_, "auto", positions)
            if scenario.solver.delay_volume_mode == "segment":
                auto_veh = (
                    pax_auto - cumulative_demand(field_, "auto", downstream)
                ) / split.average_occupancy
            else:
                auto_veh = pax_auto / split.average_occupancy
            bus_slope = pce / (n_inter + 1)
            shared_cap = geom.n_lanes * cap
            other_cap = (geom.n_lanes - 1) * cap
            if policy is Policy.MTP:
                plan = [
                    (auto_veh, bus_slope, shared_cap, econ.vot_bus * pax_bus),
                    (auto_veh, bus_slope, shared_cap, econ.vot_auto * pax_auto),
                ]
            elif policy is Policy.EBLP:
                plan = [
                    (np.zeros(n_inter), bus_slope, cap, econ.vot_bus * pax_bus),
                    (auto_veh, 0.0, other_cap, econ.vot_auto * pax_auto),
                ]
            else:
                mu = scenario.occupancy.low_share
                hov_veh = (1.0 - mu) * auto_veh
                plan = [
                    (hov_veh, bus_slope, cap, econ.vot_bus * pax_bus),
                    (mu * auto_veh, 0.0, other_cap, econ.vot_auto * split.low_fraction * pax_auto),
                    (hov_veh, bus_slope, cap, econ.vot_auto * split.high_fraction * pax_auto),
                ]
            self._delay_classes.extend(plan)

        self._signal = _signal_cost(scenario, policy)

    # -- evaluation -----------------------------------------------------------

    def totals(self, f_values) -> np.ndarray:
        """Total system cost ($/hr) at each frequency in ``f_values`` (all > 0)."""
        f_arr = np.asarray(f_values, dtype=float)
        if f_arr.size == 0:
            return np.empty(0)
        if np.any(f_arr <= 0):
            raise ValidationError("frequency candidates must be positive")
        if not self.exact:
            return self._fallback_totals(f_arr)

        scenario = self.scenario
        bus, econ = scenario.bus, scenario.econ
        waiting = bus.wait_gamma1 / f_arr * self._boardings + (
            bus.wait_gamma2
            * self._load_moment
            / (bus.capacity_pax * f_arr) ** bus.wait_gamma3
            / f_arr
        )
        out = (
            econ.vot_wait * waiting
            + econ.vot_bus * _poly_eval(self._ride_bus, f_arr)
            + _poly_eval(self._discomfort, f_arr)
            + bus.fare * self._boardings
            + bus.fixed_operating_cost
            + bus.variable_operating_cost * _poly_eval(self._round_trip, f_arr) * f_arr
            + econ.vot_auto * _poly_eval(self._ride_auto, f_arr)
            + self._money
            + self._signal
        )
        for bases, slope, cap, weighted_pax in self._delay_classes:
            arriving = bases[:, None] + slope * f_arr[None, :]
            seconds = intersection_delay(scenario.signal, arriving, cap)
            out += weighted_pax @ seconds / 3600.0
        return out


def frequency_cost_table(
    scenario: Scenario, policy: Policy, q0: float, auto_share: float, f_values
) -> np.ndarray:
    """One-shot helper: build a :class:`FrequencySweep` and evaluate it."""
    return FrequencySweep(scenario, policy, q0, auto_share).totals(f_values)
