"""Frequency and mode-split optimization."""

from __future__ import annotations

import pytest

from lanepolicy import (
    InfeasibleError,
    Policy,
    Scenario,
    ValidationError,
    cost_breakdown,
    load_scenario,
    min_frequency,
    optimize_frequency,
    optimize_policy,
)
from lanepolicy.optimizer import equilibrium_gap, foc_residual


class TestMinFrequency:
    def test_closed_form(self, baseline: Scenario):
        # peak onboard load (1-R)*q0*A/2 divided by bus capacity
        assert min_frequency(baseline, 1000.0, 0.75) == pytest.approx(
            0.25 * 1000.0 * 30.0 / 2.0 / 70.0
        )

    def test_no_bus_demand_no_floor(self, baseline: Scenario):
        assert min_frequency(baseline, 1000.0, 1.0) == 0.0

    def test_share_validated(self, baseline: Scenario):
        with pytest.raises(ValidationError):
            min_frequency(baseline, 1000.0, 1.5)


class TestOptimizeFrequency:
    def test_synthetic_parabola(self, baseline: Scenario):
        f, cost = optimize_frequency(
            baseline, Policy.MTP, 1000.0, 1.0, cost_fn=lambda f: (f - 42.3) ** 2
        )
        assert f == pytest.approx(42.3, abs=1e-9)
        assert cost == pytest.approx(0.0, abs=1e-12)

    def test_refinement_clips_to_capacity_floor(self, baseline: Scenario):
        # strictly increasing cost pushes the optimum onto the exact floor,
        # which sits between integer lattice points
        f_min = min_frequency(baseline, 1000.0, 0.75)
        assert f_min == pytest.approx(53.5714285714, rel=1e-9)
        f, _ = optimize_frequency(baseline, Policy.MTP, 1000.0, 0.75, cost_fn=lambda f: f)
        assert f == pytest.approx(f_min, abs=1e-12)

    def test_floor_above_cap_is_infeasible(self, baseline: Scenario):
        # all-bus demand at q0=3000 needs ~643 buses/hr, far above the cap
        with pytest.raises(InfeasibleError):
            optimize_frequency(baseline, Policy.MTP, 3000.0, 0.0)

    def test_all_non_finite_costs_rejected(self, baseline: Scenario):
        with pytest.raises(InfeasibleError):
            optimize_frequency(
                baseline, Policy.MTP, 1000.0, 1.0, cost_fn=lambda f: float("nan")
            )

    def test_model_evaluation_agrees_with_breakdown(self, baseline: Scenario):
        f, cost = optimize_frequency(baseline, Policy.EBLP, 800.0, 0.8)
        assert cost == pytest.approx(
            cost_breakdown(baseline, Policy.EBLP, 800.0, 0.8, f).total, rel=1e-9
        )


class TestFocResidual:
    def test_step_guard(self, baseline: Scenario):
        with pytest.raises(ValidationError):
            foc_residual(baseline, Policy.MTP, 1000.0, 0.75, 0.005)

    def test_sign_tracks_slope(self, baseline: Scenario):
        # at a very high frequency operator cost dominates: slope positive
        assert foc_residual(baseline, Policy.MTP, 1000.0, 0.75, 110.0) > 0
        # at a very low frequency waiting dominates: slope negative
        assert foc_residual(baseline, Policy.MTP, 1000.0, 0.3, 2.0) < 0


class TestEquilibriumGap:
    def test_none_at_corners(self, baseline: Scenario):
        assert equilibrium_gap(baseline, Policy.MTP, 1000.0, 1.0, 16.0) is None
        assert equilibrium_gap(baseline, Policy.MTP, 1000.0, 0.0, 16.0) is None
        assert equilibrium_gap(baseline, Policy.MTP, 0.0, 0.5, 16.0) is None

    def test_unsigned_dominates_signed(self, baseline: Scenario):
        signed = equilibrium_gap(baseline, Policy.MTP, 1000.0, 0.6, 20.0, signed=True)
        unsigned = equilibrium_gap(baseline, Policy.MTP, 1000.0, 0.6, 20.0)
        assert unsigned >= abs(signed) - 1e-12


class TestOptimizePolicy:
    def test_zero_demand_degenerates_to_minimal_service(self, baseline: Scenario):
        opt = optimize_policy(baseline, Policy.MTP, 0.0)
        assert opt.r_star == 1.0  # tie broken toward the largest auto share
        assert opt.f_star == 1.0
        # fixed operating cost plus one bus/hr on a free-flow 1.5 hr round trip
        assert opt.breakdown.total == pytest.approx(300.0 + 20.0 * 2.0 * 0.75, rel=1e-9)
        assert opt.equilibrium_gap is None

    def test_negative_demand_rejected(self, baseline: Scenario):
        with pytest.raises(ValidationError):
            optimize_policy(baseline, Policy.MTP, -10.0)

    def test_optimum_is_consistent(self, baseline: Scenario):
        opt = optimize_policy(baseline, Policy.MTP, 1000.0)
        assert 0.0 <= opt.r_star <= 1.0
        f_min = min_frequency(baseline, 1000.0, opt.r_star)
        assert opt.f_star >= f_min - 1e-9
        assert opt.breakdown.total == pytest.approx(
            cost_breakdown(baseline, Policy.MTP, 1000.0, opt.r_star, opt.f_star).total,
            rel=1e-12,
        )
        assert opt.constraint_binding == (
            abs(opt.f_star - f_min) <= baseline.solver.f_refine_step / 2.0 + 1e-9
        )

    def test_inner_solution_reproducible(self, baseline: Scenario):
        opt = optimize_policy(baseline, Policy.EBLP, 900.0)
        f, cost = optimize_frequency(baseline, Policy.EBLP, 900.0, opt.r_star)
        assert f == opt.f_star
        assert cost == pytest.approx(opt.breakdown.total, rel=1e-12)

    def test_beats_nearby_splits(self, baseline: Scenario):
        opt = optimize_policy(baseline, Policy.MTP, 700.0)
        for r in (0.0, 0.25, 0.5, 0.9, 1.0):
            try:
                _, cost = optimize_frequency(baseline, Policy.MTP, 700.0, r)
            except InfeasibleError:
                continue
            assert opt.breakdown.total <= cost + 1e-6

    def test_memoized(self, baseline: Scenario):
        a = optimize_policy(baseline, Policy.HOVLP, 1234.0)
        b = optimize_policy(baseline, Policy.HOVLP, 1234.0)
        assert a is b

    def test_policy_name_coerced(self, baseline: Scenario):
        assert optimize_policy(baseline, "mtp", 600.0) is optimize_policy(
            baseline, Policy.MTP, 600.0
        )

    def test_infeasible_when_no_interior_split_fits(self):
        # the equilibrium rule needs an interior split; a tiny frequency cap
        # with tiny buses makes every one of them violate the capacity floor
        tight = load_scenario(
            {
                "solver": {"f_cap": 2.0, "split_rule": "equilibrium"},
                "bus": {"capacity_pax": 5.0},
            }
        )
        with pytest.raises(InfeasibleError):
            optimize_policy(tight, Policy.MTP, 2000.0)

    def test_equilibrium_split_rule_balances_disutilities(self):
        scen = load_scenario({"solver": {"split_rule": "equilibrium"}})
        opt = optimize_policy(scen, Policy.MTP, 1000.0)
        assert 0.0 < opt.r_star < 1.0
        signed = equilibrium_gap(scen, Policy.MTP, 1000.0, opt.r_star, opt.f_star, signed=True)
        # the root solve stops at the split-lattice refinement tolerance
        assert abs(signed) < 0.5
