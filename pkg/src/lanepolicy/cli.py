"""Command-line runner for costs, sweeps, demand simulation, and scheduling.

Each invocation creates one run directory (default under ``runs/``) holding a
``manifest.json`` that records the command line, the full scenario, seeds,
solver settings, and every output file; the run is reproducible from the
manifest alone.  Outputs are staged in a temporary directory and renamed into
place only on success.  Numeric CSVs carry ``# key=value`` comment headers
naming their units and manifest.

Exit codes: 0 success, 2 validation/usage, 3 infeasibility or numeric
failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import os
import shlex
import shutil
import sys
import tempfile
import time
from typing import IO, Callable, Sequence

import numpy as np

from ._version import __version__
from .config import (
    Scenario,
    load_scenario,
    preset,
    preset_names,
    scenario_fingerprint,
    serialize,
)
from .costmodel import POLICY_ORDER, Policy, cost_breakdown
from .errors import (
    InfeasibleError,
    LanePolicyError,
    UndefinedServiceError,
    ValidationError,
)
from .optimizer import min_frequency, optimize_frequency, optimize_policy
from .scheduler import (
    build_schedule,
    evaluate_trajectory,
    format_timetable,
    schedule_summary,
    write_schedule_csv,
    write_schedule_json,
)
from .stochastic import (
    DEFAULT_CLOCK_START_HR,
    DEFAULT_DT_HR,
    DEFAULT_HORIZON_HR,
    OUParams,
    Trajectory,
    read_trajectory_csv,
    simulate,
    write_trajectory_csv,
)
from .threshold import cost_curve, find_threshold, policy_regions, write_curves_csv

_HIGHLIGHT_NOTE = (
    "intersection count and waiting value-of-time are assumed defaults; "
    "switching thresholds move materially with both"
)
_SYNTHETIC_PARAMS_NOTE = (
    "demand-process defaults are synthetic placeholders, not calibrated values"
)


# ---------------------------------------------------------------------------
# scenario assembly


def _parse_set_item(item: str) -> tuple[str, str, object]:
    key, sep, raw = item.partition("=")
    if not sep or not raw:
        raise ValidationError(f"--set expects section.key=value, got {item!r}")
    section, sep, field = key.partition(".")
    if not sep or not field:
        raise ValidationError(f"--set key must be dotted section.key, got {key!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return section.strip(), field.strip(), value


def build_scenario(
    preset_name: str,
    scenario_file: str | None = None,
    set_items: Sequence[str] = (),
) -> Scenario:
    """Assemble the working scenario: preset, then file, then --set overrides."""
    document = json.loads(serialize(preset(preset_name)))
    if scenario_file is not None:
        with open(scenario_file) as handle:
            try:
                file_doc = json.load(handle)
            except json.JSONDecodeError as err:
                raise ValidationError(
                    f"{scenario_file}: not valid JSON: {err.msg} (line {err.lineno})"
                ) from None
        if not isinstance(file_doc, dict):
            raise ValidationError(f"{scenario_file}: scenario document must be a JSON object")
        for section, body in file_doc.items():
            if not isinstance(body, dict):
                raise ValidationError(f"{section}: expected an object")
            document.setdefault(section, {}).update(body)
    for item in set_items:
        section, field, value = _parse_set_item(item)
        document.setdefault(section, {})[field] = value
    return load_scenario(document)


# ---------------------------------------------------------------------------
# run directory and file plumbing


def _unique_path(base: str) -> str:
    if not os.path.exists(base):
        return base
    for k in itertools.count(2):
        candidate = f"{base}-{k}"
        if not os.path.exists(candidate):
            return candidate
    raise AssertionError("unreachable")


def _csv_with_meta(path: str, meta: dict, write_rows: Callable[[IO[str]], None]) -> None:
    with open(path, "w", newline="") as handle:
        for key, value in meta.items():
            handle.write(f"# {key}={value}\n")
        write_rows(handle)


class _Run:
    """Staged run directory: files collect in a temp dir, renamed on success."""

    def __init__(self, out_root: str, name: str) -> None:
        os.makedirs(out_root, exist_ok=True)
        self.out_root = out_root
        self.name = name
        self.tmp = tempfile.mkdtemp(prefix=f".tmp-{name}-", dir=out_root)
        self.outputs: list[str] = []

    def path(self, relative: str) -> str:
        full = os.path.join(self.tmp, relative)
        if os.path.dirname(relative):
            os.makedirs(os.path.dirname(full), exist_ok=True)
        self.outputs.append(relative)
        return full

    def finalize(self, manifest: dict) -> str:
        manifest = dict(manifest)
        manifest["outputs"] = sorted(set(self.outputs))
        manifest["completed_utc"] = _utc_stamp()
        with open(os.path.join(self.tmp, "manifest.json"), "w") as handle:
            json.dump(manifest, handle, indent=2, sort_keys=True)
            handle.write("\n")
        final = _unique_path(os.path.join(self.out_root, self.name))
        os.replace(self.tmp, final)
        return final

    def discard(self) -> None:
        shutil.rmtree(self.tmp, ignore_errors=True)


def _utc_stamp() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def _base_manifest(command: str, argv: Sequence[str], scenario: Scenario) -> dict:
    return {
        "artifact_version": __version__,
        "command": command,
        "argv": list(argv),
        "invocation": "lanepolicy " + shlex.join(argv),
        "started_utc": _utc_stamp(),
        "scenario_fingerprint": scenario_fingerprint(scenario),
        "scenario": json.loads(serialize(scenario)),
        "solver": dataclasses.asdict(scenario.solver),
        "highlighted_defaults": {
            "geometry.n_intersections": scenario.geometry.n_intersections,
            "econ.vot_wait": scenario.econ.vot_wait,
            "note": _HIGHLIGHT_NOTE,
        },
    }


# ---------------------------------------------------------------------------
# cost command


def _best_split_at_fixed_f(
    scenario: Scenario, policy: Policy, q0: float, frequency: float
) -> float:
    """Cheapest auto share when the frequency is pinned by the caller.

    Only shares whose bus demand fits the pinned frequency are admissible;
    ties prefer the larger auto share.
    """
    step = scenario.solver.r_step
    shares = np.arange(0.0, 1.0 + step / 2, step)
    shares = np.minimum(shares, 1.0)
    best: tuple[float, float] | None = None
    for r in shares:
        if min_frequency(scenario, q0, float(r)) > frequency + 1e-9:
            continue
        total = cost_breakdown(scenario, policy, q0, float(r), frequency).total
        key = (total, 1.0 - float(r))
        if best is None or key < best[0:2]:
            best = (total, 1.0 - float(r), float(r))
    if best is None:
        raise InfeasibleError(
            f"no mode split can carry the bus demand at F={frequency:g} buses/hr"
        )
    return best[2]


def _cmd_cost(args: argparse.Namespace, scenario: Scenario, run: _Run) -> dict:
    policy = Policy.parse(args.policy)
    q0 = args.q0
    foc_residual = None
    binding = None
    if args.R is not None and not 0.0 <= args.R <= 1.0:
        raise ValidationError(f"R must lie in [0, 1], got {args.R}")
    if args.F is not None and args.F <= 0.0:
        raise ValidationError(f"F must be positive, got {args.F}")

    if args.R is None and args.F is None:
        opt = optimize_policy(scenario, policy, q0)
        r, f = opt.r_star, opt.f_star
        breakdown = opt.breakdown
        foc_residual = opt.foc_residual
        binding = opt.constraint_binding
        mode = "optimized R and F"
    elif args.F is None:
        r = args.R
        f, _ = optimize_frequency(scenario, policy, q0, r)
        breakdown = cost_breakdown(scenario, policy, q0, r, f)
        mode = "fixed R, optimized F"
    elif args.R is None:
        f = args.F
        r = _best_split_at_fixed_f(scenario, policy, q0, f)
        breakdown = cost_breakdown(scenario, policy, q0, r, f)
        mode = "optimized R, fixed F"
    else:
        r, f = args.R, args.F
        breakdown = cost_breakdown(scenario, policy, q0, r, f)
        mode = "fixed R and F"

    f_min = min_frequency(scenario, q0, r)
    lines = [
        f"policy        {policy.value}",
        f"q0            {q0:g} pax/hr/mi",
        f"auto share R  {r:.4f} ({mode})",
        f"frequency F   {f:.2f} buses/hr (capacity floor {f_min:.2f})",
    ]
    if f + 1e-9 < f_min:
        lines.append("note          F is below the capacity floor; diagnostic evaluation only")
    for name in ("bus_user", "bus_operator", "auto_user", "signal", "total"):
        lines.append("%-13s $%.2f/hr" % (name, getattr(breakdown, name)))
    print("\n".join(lines))

    rows = [(name, getattr(breakdown, name)) for name in
            ("bus_user", "bus_operator", "auto_user", "signal", "total")]

    def write_rows(handle: IO[str]) -> None:
        handle.write("component,cost\n")
        for name, value in rows:
            handle.write("%s,%.6f\n" % (name, value))

    _csv_with_meta(
        run.path("breakdown.csv"),
        {"manifest": "manifest.json", "units": "cost=$/hr", "policy": policy.value, "q0": q0},
        write_rows,
    )
    results = {
        "policy": policy.value,
        "q0": q0,
        "R": r,
        "F": f,
        "min_frequency": f_min,
        "mode": mode,
        "breakdown": {name: value for name, value in rows},
    }
    if foc_residual is not None:
        results["foc_residual"] = foc_residual
        results["constraint_binding"] = binding
    return results


# ---------------------------------------------------------------------------
# sweep command


def _with_capacity(scenario: Scenario, capacity: float) -> Scenario:
    document = json.loads(serialize(scenario))
    document["geometry"]["lane_capacity_vph"] = capacity
    return load_scenario(document)


def _cmd_sweep(args: argparse.Namespace, scenario: Scenario, run: _Run) -> dict:
    if args.n < 2:
        raise ValidationError(f"sweep needs at least 2 samples, got {args.n}")
    lo, hi = args.q0_lo, args.q0_hi
    if not 0.0 < lo < hi:
        raise ValidationError(f"demand range must satisfy 0 < lo < hi, got [{lo}, {hi}]")
    capacities = args.capacities if args.capacities else [None]

    threshold_rows: list[tuple] = []
    region_summary: dict[str, list] = {}
    failure_total = 0
    for capacity in capacities:
        scen = scenario if capacity is None else _with_capacity(scenario, capacity)
        cap_value = scen.geometry.lane_capacity_vph
        tag = "" if capacity is None else "_C%g" % capacity

        curves = [cost_curve(scen, p, (lo, hi), args.n) for p in POLICY_ORDER]
        _csv_with_meta(
            run.path(f"cost_curves{tag}.csv"),
            {
                "manifest": "manifest.json",
                "units": "q0=pax/hr/mi cost=$/hr R_star=fraction F_star=buses/hr",
                "lane_capacity_vph": cap_value,
            },
            lambda handle, curves=curves: write_curves_csv(curves, handle),
        )
        failures = [(c.policy, q0, msg) for c in curves for q0, msg in c.failures]
        failure_total += len(failures)
        if failures:
            def write_failures(handle: IO[str], rows=failures) -> None:
                handle.write("policy,q0,error\n")
                for pol, q0, msg in rows:
                    handle.write('%s,%g,"%s"\n' % (pol.value, q0, msg.replace('"', "'")))

            _csv_with_meta(
                run.path(f"failures{tag}.csv"),
                {"manifest": "manifest.json", "units": "q0=pax/hr/mi"},
                write_failures,
            )

        resolution = (hi - lo) / (args.n - 1)
        regions = policy_regions(scen, (lo, hi), resolution)

        def write_regions(handle: IO[str], rows=regions) -> None:
            handle.write("q0_lo,q0_hi,policy\n")
            for region in rows:
                handle.write("%.6f,%.6f,%s\n" % (region.q0_lo, region.q0_hi, region.policy.value))

        _csv_with_meta(
            run.path(f"regions{tag}.csv"),
            {
                "manifest": "manifest.json",
                "units": "q0=pax/hr/mi",
                "lane_capacity_vph": cap_value,
            },
            write_regions,
        )
        region_summary["%g" % cap_value] = [
            {"q0_lo": r.q0_lo, "q0_hi": r.q0_hi, "policy": r.policy.value} for r in regions
        ]

        for p1, p2 in itertools.combinations(POLICY_ORDER, 2):
            found = find_threshold(scen, p1, p2, lo, hi)
            threshold_rows.append(
                (
                    cap_value,
                    f"{p1.value}/{p2.value}",
                    found.q0_star,
                    found.cheaper_below.value,
                    found.cheaper_above.value,
                )
            )

    def write_thresholds(handle: IO[str]) -> None:
        handle.write("lane_capacity_vph,pair,q0_star,cheaper_below,cheaper_above\n")
        for cap_value, pair, q0_star, below, above in threshold_rows:
            star = "" if q0_star is None else "%.6f" % q0_star
            handle.write("%g,%s,%s,%s,%s\n" % (cap_value, pair, star, below, above))

    _csv_with_meta(
        run.path("thresholds.csv"),
        {"manifest": "manifest.json", "units": "lane_capacity_vph=veh/hr q0_star=pax/hr/mi"},
        write_thresholds,
    )

    for cap_key, regions in region_summary.items():
        chain = " -> ".join(
            "%s[%.0f,%.0f]" % (r["policy"], r["q0_lo"], r["q0_hi"]) for r in regions
        )
        print(f"capacity {cap_key} veh/hr/lane: {chain}")
    for cap_value, pair, q0_star, below, above in threshold_rows:
        where = "none in range" if q0_star is None else "%.1f" % q0_star
        print(f"  threshold {pair} @ C={cap_value:g}: {where} (below {below}, above {above})")
    if failure_total:
        print(f"  {failure_total} sample(s) failed; see failures CSV")

    return {
        "q0_range": [lo, hi],
        "n_samples": args.n,
        "capacities": ["%g" % (c if c is not None else scenario.geometry.lane_capacity_vph) for c in capacities],
        "regions": region_summary,
        "thresholds": [
            {
                "lane_capacity_vph": cap_value,
                "pair": pair,
                "q0_star": q0_star,
                "cheaper_below": below,
                "cheaper_above": above,
            }
            for cap_value, pair, q0_star, below, above in threshold_rows
        ],
        "failed_samples": failure_total,
    }


# ---------------------------------------------------------------------------
# simulate command


def _ou_params(args: argparse.Namespace) -> OUParams:
    defaults = OUParams()
    return OUParams(
        mean_reversion=defaults.mean_reversion if args.mean_reversion is None else args.mean_reversion,
        long_run_level=defaults.long_run_level if args.long_run_level is None else args.long_run_level,
        volatility=defaults.volatility if args.volatility is None else args.volatility,
        q0_init=defaults.q0_init if args.q0_init is None else args.q0_init,
    )


def _trajectory_meta(traj: Trajectory, rel_manifest: str) -> dict:
    return {
        "manifest": rel_manifest,
        "units": "t_hours=hours q0=pax/hr/mi",
        "seed": traj.seed,
        "dt_hr": traj.dt,
        "t0_clock": traj.t0_clock,
        "note": _SYNTHETIC_PARAMS_NOTE,
    }


def _cmd_simulate(args: argparse.Namespace, scenario: Scenario, run: _Run) -> dict:
    if args.n < 1:
        raise ValidationError(f"need n >= 1 trajectories, got {args.n}")
    params = _ou_params(args)
    horizon = DEFAULT_HORIZON_HR if args.horizon is None else args.horizon
    dt = DEFAULT_DT_HR if args.dt is None else args.dt
    seeds = [args.seed + i for i in range(args.n)]
    entries = []
    for seed in seeds:
        traj = simulate(params, horizon=horizon, dt=dt, seed=seed, t0_clock=args.clock_start)
        name = f"trajectories/trajectory_seed{seed}.csv"
        _csv_with_meta(
            run.path(name),
            _trajectory_meta(traj, "../manifest.json"),
            lambda handle, traj=traj: write_trajectory_csv(traj, handle),
        )
        entries.append(
            {
                "file": name,
                "seed": seed,
                "min_q0": float(traj.values.min()),
                "max_q0": float(traj.values.max()),
                "final_q0": float(traj.values[-1]),
                "floor_events": traj.floor_events,
            }
        )
        print(
            "seed %d: q0 in [%.0f, %.0f], final %.0f, floor events %d"
            % (seed, entries[-1]["min_q0"], entries[-1]["max_q0"], entries[-1]["final_q0"], traj.floor_events)
        )
    return {
        "params": dataclasses.asdict(params),
        "horizon_hr": horizon,
        "dt_hr": dt,
        "clock_start": args.clock_start,
        "seeds": seeds,
        "trajectories": entries,
        "note": _SYNTHETIC_PARAMS_NOTE,
    }


# ---------------------------------------------------------------------------
# schedule command


def _cmd_schedule(args: argparse.Namespace, scenario: Scenario, run: _Run) -> dict:
    tokens = [tok for tok in args.allowed.split(",") if tok.strip()]
    if not tokens:
        raise ValidationError("--allowed must list at least one policy")
    allowed = [Policy.parse(tok) for tok in tokens]

    generator_flags = (
        args.mean_reversion,
        args.long_run_level,
        args.volatility,
        args.q0_init,
        args.horizon,
        args.dt,
        args.seed,
    )
    if args.trajectory is not None:
        if any(value is not None for value in generator_flags):
            raise ValidationError(
                "give either --trajectory or generator parameters, not both"
            )
        traj = read_trajectory_csv(args.trajectory)
        seeds: list[int] = []
        source = {"kind": "file", "path": os.path.abspath(args.trajectory)}
    else:
        params = _ou_params(args)
        horizon = DEFAULT_HORIZON_HR if args.horizon is None else args.horizon
        dt = DEFAULT_DT_HR if args.dt is None else args.dt
        seed = 0 if args.seed is None else args.seed
        traj = simulate(params, horizon=horizon, dt=dt, seed=seed, t0_clock=args.clock_start)
        seeds = [seed]
        source = {
            "kind": "generated",
            "params": dataclasses.asdict(params),
            "horizon_hr": horizon,
            "dt_hr": dt,
            "seed": seed,
            "note": _SYNTHETIC_PARAMS_NOTE,
        }

    _csv_with_meta(
        run.path("trajectory.csv"),
        _trajectory_meta(traj, "manifest.json"),
        lambda handle: write_trajectory_csv(traj, handle),
    )

    table = evaluate_trajectory(scenario, traj, allowed)
    schedule = build_schedule(table, min_dwell=args.min_dwell)
    print(format_timetable(schedule))
    print(
        "demand quantization cost bound: $%.2f/hr per step" % schedule.quantization_bound
    )

    _csv_with_meta(
        run.path("schedule.csv"),
        {
            "manifest": "manifest.json",
            "units": "entry_t_hr=clock-hours exit_t_hr=clock-hours duration_min=minutes",
            "allowed": ",".join(p.value for p in allowed),
        },
        lambda handle: write_schedule_csv(schedule, handle),
    )
    write_schedule_json(schedule, run.path("schedule.json"))
    summary = schedule_summary(schedule)
    summary["allowed"] = [p.value for p in allowed]
    summary["min_dwell_minutes"] = args.min_dwell
    summary["trajectory_source"] = source
    summary["seeds"] = seeds
    return summary


# ---------------------------------------------------------------------------
# parser and entry point


def _add_scenario_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--preset",
        default="baseline",
        choices=preset_names(),
        help="named scenario to start from (default: baseline)",
    )
    parser.add_argument(
        "--scenario",
        metavar="FILE",
        help="JSON scenario file merged over the preset",
    )
    parser.add_argument(
        "--set",
        metavar="SECTION.KEY=VALUE",
        action="append",
        default=[],
        dest="set_items",
        help="override one scenario field (repeatable), e.g. --set geometry.n_lanes=4",
    )
    parser.add_argument(
        "--out-dir",
        default="runs",
        help="directory that receives run output directories (default: runs)",
    )
    parser.add_argument(
        "--run-name",
        help="run directory name (default: <command>-<timestamp>)",
    )


def _add_generator_flags(parser: argparse.ArgumentParser, with_n: bool) -> None:
    parser.add_argument("--mean-reversion", type=float, default=None,
                        help="pull rate toward the long-run level, 1/hr (default 1.5)")
    parser.add_argument("--long-run-level", type=float, default=None,
                        help="stationary demand level, pax/hr/mi (default 1500)")
    parser.add_argument("--volatility", type=float, default=None,
                        help="noise intensity (default 0.3)")
    parser.add_argument("--q0-init", type=float, default=None,
                        help="initial demand density, pax/hr/mi (default 1000)")
    parser.add_argument("--horizon", type=float, default=None,
                        help="simulated hours (default 12)")
    parser.add_argument("--dt", type=float, default=None,
                        help="step size in hours (default 1/60)")
    parser.add_argument("--clock-start", type=float, default=DEFAULT_CLOCK_START_HR,
                        help="clock hour of the first sample (default 7.0)")
    if with_n:
        parser.add_argument("--n", type=int, default=10,
                            help="number of trajectories (default 10)")
        parser.add_argument("--seed", type=int, default=0,
                            help="first seed; trajectory i uses seed+i (default 0)")
    else:
        parser.add_argument("--seed", type=int, default=None,
                            help="trajectory seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lanepolicy",
        description="Corridor lane-policy cost evaluation, optimization, and scheduling.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    cost = sub.add_parser("cost", help="evaluate or optimize one policy at one demand level")
    _add_scenario_flags(cost)
    cost.add_argument("--policy", required=True, help="mtp, eblp, or hovlp")
    cost.add_argument("--q0", type=float, required=True, help="CBD demand density, pax/hr/mi")
    cost.add_argument("--R", type=float, default=None, help="auto share; optimized when omitted")
    cost.add_argument("--F", type=float, default=None, help="bus frequency; optimized when omitted")
    cost.set_defaults(func=_cmd_cost)

    sweep = sub.add_parser("sweep", help="cost curves, policy regions, and thresholds over a demand range")
    _add_scenario_flags(sweep)
    sweep.add_argument("--q0-lo", type=float, default=200.0, help="low end of the demand range")
    sweep.add_argument("--q0-hi", type=float, default=2500.0, help="high end of the demand range")
    sweep.add_argument("--n", type=int, default=47, help="number of samples (>= 2)")
    sweep.add_argument(
        "--capacities",
        type=lambda text: [float(tok) for tok in text.split(",") if tok.strip()],
        default=None,
        help="comma-separated lane capacities to repeat the sweep over, veh/hr",
    )
    sweep.set_defaults(func=_cmd_sweep)

    simulate_cmd = sub.add_parser("simulate", help="simulate seeded demand-density trajectories")
    _add_scenario_flags(simulate_cmd)
    _add_generator_flags(simulate_cmd, with_n=True)
    simulate_cmd.set_defaults(func=_cmd_simulate)

    schedule = sub.add_parser("schedule", help="build a policy-switching timetable for a trajectory")
    _add_scenario_flags(schedule)
    schedule.add_argument("--trajectory", metavar="FILE",
                          help="trajectory CSV (clock_time,t_hours,q0); excludes generator flags")
    _add_generator_flags(schedule, with_n=False)
    schedule.add_argument("--allowed", default="mtp,eblp,hovlp",
                          help="comma-separated policies to switch among (default: all three)")
    schedule.add_argument("--min-dwell", type=float, default=0.0,
                          help="shortest admissible entry duration, minutes (default 0)")
    schedule.set_defaults(func=_cmd_schedule)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)

    run: _Run | None = None
    try:
        scenario = build_scenario(args.preset, args.scenario, args.set_items)
        name = args.run_name or f"{args.command}-{time.strftime('%Y%m%d-%H%M%S')}"
        run = _Run(args.out_dir, name)
        manifest = _base_manifest(args.command, argv, scenario)
        results = args.func(args, scenario, run)
        manifest["results"] = results
        if "seeds" in results:
            manifest["seeds"] = results["seeds"]
        final = run.finalize(manifest)
        print(f"run written to {final}")
        return 0
    except (ValidationError, UndefinedServiceError) as err:
        if run is not None:
            run.discard()
        print(f"error: {err}", file=sys.stderr)
        return 2
    except InfeasibleError as err:
        if run is not None:
            run.discard()
        print(f"infeasible: {err}", file=sys.stderr)
        return 3
    except LanePolicyError as err:
        if run is not None:
            run.discard()
        print(f"error: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        if run is not None:
            run.discard()
        print(f"i/o error: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
