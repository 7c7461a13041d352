"""Cost curves, switching thresholds, and best-policy regions."""

from __future__ import annotations

import csv
import io

import pytest

from lanepolicy import (
    Policy,
    Scenario,
    ValidationError,
    cost_curve,
    find_threshold,
    load_scenario,
    optimize_policy,
    policy_regions,
    write_curves_csv,
)
from lanepolicy.threshold import CURVE_CSV_COLUMNS


class TestCostCurve:
    def test_samples_cover_range(self, baseline: Scenario):
        curve = cost_curve(baseline, Policy.MTP, (400.0, 800.0), 5)
        assert curve.policy is Policy.MTP
        assert list(curve.densities()) == [400.0, 500.0, 600.0, 700.0, 800.0]
        assert len(curve.totals()) == 5
        assert curve.failures == ()
        # each sample is the joint optimum at that density
        q0, opt = curve.samples[2]
        assert opt is optimize_policy(baseline, Policy.MTP, q0)

    def test_infeasible_densities_recorded_not_raised(self):
        scen = load_scenario(
            {
                "solver": {"f_cap": 2.0, "split_rule": "equilibrium"},
                "bus": {"capacity_pax": 5.0},
            }
        )
        curve = cost_curve(scen, Policy.MTP, (1500.0, 2500.0), 3)
        assert curve.samples == ()
        assert len(curve.failures) == 3
        for q0, reason in curve.failures:
            assert 1500.0 <= q0 <= 2500.0
            assert reason  # a human-readable explanation

    def test_validation(self, baseline: Scenario):
        with pytest.raises(ValidationError):
            cost_curve(baseline, Policy.MTP, (800.0, 400.0), 5)
        with pytest.raises(ValidationError):
            cost_curve(baseline, Policy.MTP, (-10.0, 400.0), 5)
        with pytest.raises(ValidationError):
            cost_curve(baseline, Policy.MTP, (400.0, 800.0), 1)

    def test_csv_round_trip(self, baseline: Scenario):
        curve = cost_curve(baseline, Policy.MTP, (400.0, 800.0), 3)
        buf = io.StringIO()
        write_curves_csv([curve], buf)
        rows = list(csv.reader(io.StringIO(buf.getvalue())))
        assert tuple(rows[0]) == CURVE_CSV_COLUMNS
        assert len(rows) == 1 + 3
        assert rows[1][1] == "mtp"
        assert float(rows[1][0]) == pytest.approx(400.0)
        # total column equals the sum of the component columns
        total, *parts = (float(v) for v in rows[2][2:7])
        assert total == pytest.approx(sum(parts), abs=1e-3)


class TestFindThreshold:
    def test_crossing_located_and_ordered(self, contrast: Scenario):
        res = find_threshold(contrast, Policy.MTP, Policy.HOVLP, 200.0, 2200.0)
        assert res.q0_star == pytest.approx(657.5, abs=2.0)
        assert res.cheaper_below is Policy.MTP
        assert res.cheaper_above is Policy.HOVLP
        # the reported ordering matches direct evaluation on each side
        below = res.q0_star - 100.0
        above = res.q0_star + 100.0
        assert (
            optimize_policy(contrast, Policy.MTP, below).breakdown.total
            < optimize_policy(contrast, Policy.HOVLP, below).breakdown.total
        )
        assert (
            optimize_policy(contrast, Policy.HOVLP, above).breakdown.total
            < optimize_policy(contrast, Policy.MTP, above).breakdown.total
        )

    def test_argument_order_does_not_move_the_crossing(self, contrast: Scenario):
        a = find_threshold(contrast, Policy.MTP, Policy.HOVLP, 500.0, 900.0)
        b = find_threshold(contrast, Policy.HOVLP, Policy.MTP, 500.0, 900.0)
        assert a.q0_star == pytest.approx(b.q0_star, abs=2.0)
        assert a.cheaper_below is b.cheaper_below is Policy.MTP

    def test_no_crossing_reports_uniform_winner(self, baseline: Scenario):
        res = find_threshold(baseline, Policy.MTP, Policy.EBLP, 200.0, 1000.0)
        assert res.q0_star is None
        assert res.cheaper_below is Policy.MTP
        assert res.cheaper_above is Policy.MTP

    def test_same_policy_is_trivial(self, baseline: Scenario):
        res = find_threshold(baseline, Policy.MTP, Policy.MTP, 200.0, 400.0)
        assert res.q0_star is None
        assert res.cheaper_below is Policy.MTP

    def test_range_validated(self, baseline: Scenario):
        with pytest.raises(ValidationError):
            find_threshold(baseline, Policy.MTP, Policy.EBLP, 900.0, 300.0)


class TestPolicyRegions:
    def test_contrast_scenario_switches_once(self, contrast: Scenario):
        regions = policy_regions(contrast, (200.0, 1200.0), 200.0)
        assert [r.policy for r in regions] == [Policy.MTP, Policy.HOVLP]
        assert regions[0].q0_lo == 200.0
        assert regions[-1].q0_hi == 1200.0
        # contiguous partition with the boundary at the pairwise crossing
        assert regions[0].q0_hi == regions[1].q0_lo
        assert regions[0].q0_hi == pytest.approx(657.5, abs=2.0)

    def test_single_region_when_one_policy_dominates(self, baseline: Scenario):
        regions = policy_regions(baseline, (400.0, 800.0), 100.0)
        assert len(regions) == 1
        assert regions[0].policy is Policy.MTP
        assert (regions[0].q0_lo, regions[0].q0_hi) == (400.0, 800.0)

    def test_restricted_policy_set(self, contrast: Scenario):
        regions = policy_regions(
            contrast, (300.0, 500.0), 100.0, policies=(Policy.MTP,)
        )
        assert regions == [
            type(regions[0])(q0_lo=300.0, q0_hi=500.0, policy=Policy.MTP)
        ]

    def test_validation(self, baseline: Scenario):
        with pytest.raises(ValidationError):
            policy_regions(baseline, (400.0, 800.0), 0.0)
        with pytest.raises(ValidationError):
            policy_regions(baseline, (400.0, 800.0), 100.0, policies=())
