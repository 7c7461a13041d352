"""Policy-selection analysis over demand density.

Sweeps optimized total cost against demand density for each lane policy,
locates pairwise switching thresholds (the density where two policies' costs
cross), and decomposes a density range into best-policy regions.

Cost differences can in principle cross zero more than once; find_threshold
reports the crossing nearest the low end of the bracket (at scan resolution)
and policy_regions, a pointwise argmin, is the authoritative decomposition.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .config import Scenario
from .costmodel import POLICY_ORDER, Policy
from .errors import InfeasibleError, ValidationError
from .numeric import find_root
from .optimizer import PolicyOptimum, optimize_policy

__all__ = [
    "CostCurve",
    "ThresholdResult",
    "PolicyRegion",
    "cost_curve",
    "find_threshold",
    "policy_regions",
    "write_curves_csv",
    "CURVE_CSV_COLUMNS",
]

_SCAN_POINTS = 33


@dataclass(frozen=True)
class CostCurve:
    """Optimized operating points for one policy over increasing density."""

    policy: Policy
    samples: tuple[tuple[float, PolicyOptimum], ...]
    failures: tuple[tuple[float, str], ...] = ()  # (q0, reason) for skipped samples

    def totals(self) -> np.ndarray:
        return np.array([opt.breakdown.total for _, opt in self.samples])

    def densities(self) -> np.ndarray:
        return np.array([q0 for q0, _ in self.samples])


@dataclass(frozen=True)
class ThresholdResult:
    """Switching density for a policy pair, or the uniform winner if none."""

    pair: tuple[Policy, Policy]
    q0_star: float | None
    cheaper_below: Policy
    cheaper_above: Policy


@dataclass(frozen=True)
class PolicyRegion:
    """Maximal density interval on which one policy has the lowest total cost."""

    q0_lo: float
    q0_hi: float
    policy: Policy


def _as_policy(value) -> Policy:
    return value if isinstance(value, Policy) else Policy.parse(str(value))


def _validate_range(q0_lo: float, q0_hi: float) -> tuple[float, float]:
    lo, hi = float(q0_lo), float(q0_hi)
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise ValidationError(f"demand range must be finite, got [{q0_lo}, {q0_hi}]")
    if lo < 0:
        raise ValidationError(f"demand range must be non-negative, got lower end {q0_lo}")
    if not lo < hi:
        raise ValidationError(f"demand range must satisfy lo < hi, got [{q0_lo}, {q0_hi}]")
    return lo, hi


def cost_curve(
    scenario: Scenario, policy: Policy, q0_range: tuple[float, float], n_samples: int
) -> CostCurve:
    """Optimize one policy at ``n_samples`` evenly spaced densities.

    Densities where the optimization is infeasible are recorded on
    ``failures`` instead of aborting the sweep.
    """
    policy = _as_policy(policy)
    lo, hi = _validate_range(*q0_range)
    if n_samples < 2:
        raise ValidationError(f"n_samples must be >= 2, got {n_samples}")
    samples: list[tuple[float, PolicyOptimum]] = []
    failures: list[tuple[float, str]] = []
    for q0 in np.linspace(lo, hi, int(n_samples)):
        try:
            samples.append((float(q0), optimize_policy(scenario, policy, float(q0))))
        except InfeasibleError as exc:
            failures.append((float(q0), str(exc)))
    return CostCurve(policy=policy, samples=tuple(samples), failures=tuple(failures))


def _total(scenario: Scenario, policy: Policy, q0: float) -> float:
    return optimize_policy(scenario, policy, q0).breakdown.total


def find_threshold(
    scenario: Scenario, p1: Policy, p2: Policy, q0_lo: float, q0_hi: float
) -> ThresholdResult:
    """Density where the optimized totals of two policies cross.

    Scans the bracket coarsely for the sign change of C_p1 - C_p2 nearest
    ``q0_lo``, then bisects it to the solver's threshold tolerance.  Without
    a sign change the uniformly cheaper policy fills both sides and q0_star
    is None.
    """
    p1, p2 = _as_policy(p1), _as_policy(p2)
    lo, hi = _validate_range(q0_lo, q0_hi)
    if p1 == p2:
        return ThresholdResult(pair=(p1, p2), q0_star=None, cheaper_below=p1, cheaper_above=p1)

    def delta(q0: float) -> float:
        return _total(scenario, p1, q0) - _total(scenario, p2, q0)

    grid = np.linspace(lo, hi, _SCAN_POINTS)
    values = [delta(float(q0)) for q0 in grid]
    bracket = None
    for i in range(len(grid) - 1):
        if values[i] == 0.0 and values[i + 1] == 0.0:
            continue  # identical on a stretch: not a crossing
        if values[i] * values[i + 1] <= 0.0:
            bracket = i
            break
    if bracket is None:
        cheaper = p1 if values[int(np.argmax(np.abs(values)))] < 0 else p2
        if all(v == 0.0 for v in values):
            cheaper = p1
        return ThresholdResult(pair=(p1, p2), q0_star=None, cheaper_below=cheaper, cheaper_above=cheaper)

    tol = scenario.solver.threshold_tol
    q0_star = find_root(delta, float(grid[bracket]), float(grid[bracket + 1]), tol=tol)
    sign_below = values[bracket] if values[bracket] != 0.0 else -values[bracket + 1]
    below, above = (p1, p2) if sign_below < 0 else (p2, p1)
    return ThresholdResult(pair=(p1, p2), q0_star=float(q0_star), cheaper_below=below, cheaper_above=above)


def policy_regions(
    scenario: Scenario,
    q0_range: tuple[float, float],
    resolution: float,
    policies: tuple[Policy, ...] = POLICY_ORDER,
) -> list[PolicyRegion]:
    """Decompose a density range into maximal best-policy intervals.

    Pointwise argmin of the optimized totals on a ``resolution``-spaced
    lattice (ties break toward the policy listed first), runs merged, and
    each interior boundary sharpened with the pairwise threshold between the
    two adjacent winners.
    """
    lo, hi = _validate_range(*q0_range)
    if resolution <= 0 or not np.isfinite(resolution):
        raise ValidationError(f"resolution must be positive, got {resolution}")
    if not policies:
        raise ValidationError("policies must be non-empty")
    policies = tuple(_as_policy(p) for p in policies)

    lattice = list(np.arange(lo, hi, resolution)) + [hi]
    winners: list[Policy] = []
    for q0 in lattice:
        totals = [(_total(scenario, p, float(q0)), k) for k, p in enumerate(policies)]
        winners.append(policies[min(totals)[1]])

    regions: list[PolicyRegion] = []
    run_start = lo
    for i in range(1, len(lattice)):
        if winners[i] == winners[i - 1]:
            continue
        result = find_threshold(
            scenario, winners[i - 1], winners[i], float(lattice[i - 1]), float(lattice[i])
        )
        boundary = result.q0_star if result.q0_star is not None else float(lattice[i])
        regions.append(PolicyRegion(q0_lo=run_start, q0_hi=boundary, policy=winners[i - 1]))
        run_start = boundary
    regions.append(PolicyRegion(q0_lo=run_start, q0_hi=hi, policy=winners[-1]))
    return regions


CURVE_CSV_COLUMNS = (
    "q0",
    "policy",
    "total",
    "bus_user",
    "bus_operator",
    "auto_user",
    "signal",
    "R_star",
    "F_star",
)


def write_curves_csv(curves, file) -> None:
    """Write one or more cost curves as CSV rows under CURVE_CSV_COLUMNS.

    ``file`` is a path or a text file object; rows are ordered by policy
    then density.
    """
    if isinstance(file, (str, bytes)) or hasattr(file, "__fspath__"):
        with open(file, "w", newline="") as handle:
            write_curves_csv(curves, handle)
            return
    writer = csv.writer(file)
    writer.writerow(CURVE_CSV_COLUMNS)
    for curve in curves:
        for q0, opt in curve.samples:
            b = opt.breakdown
            writer.writerow(
                [
                    f"{q0:.6g}",
                    curve.policy.value,
                    f"{b.total:.6f}",
                    f"{b.bus_user:.6f}",
                    f"{b.bus_operator:.6f}",
                    f"{b.auto_user:.6f}",
                    f"{b.signal:.6f}",
                    f"{opt.r_star:.6f}",
                    f"{opt.f_star:.6f}",
                ]
            )
