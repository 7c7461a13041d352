"""Seeded mean-reverting simulation of CBD demand density.

Demand density q0 evolves as a discretized mean-reverting diffusion.  Over a
step of length dt the update is

    q(t + dt) = q(t) * exp(-theta * dt + volatility * dW) + drift_gain * (1 - exp(-theta * dt))

with theta = mean_reversion + volatility**2 / 2, drift_gain =
mean_reversion * long_run_level / theta, and dW a fresh N(0, dt) draw.  With
zero volatility the path relaxes exponentially toward long_run_level; with
mean_reversion = volatility = 0 it is constant.

Reproducibility contract: a trajectory with seed s consumes exactly n_steps
standard normal variates, in step order, from
``numpy.random.Generator(numpy.random.Philox(key=s))``.  Ensembles use keys
base_seed, base_seed + 1, ...  Same seed and parameters give bitwise-identical
values.

The default experiment parameters (rate 1.5/hr, level 1500 pax/hr/mi,
volatility 0.3, initial 1000, horizon 12 hr from 07:00, 1-minute steps) are
synthetic placeholders, not calibrated values; outputs label them as such.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass
from typing import IO, Sequence

import numpy as np

from .errors import ValidationError

DEFAULT_HORIZON_HR = 12.0
DEFAULT_DT_HR = 1.0 / 60.0
DEFAULT_CLOCK_START_HR = 7.0

# Demand densities below this floor (pax/hr/mi) make downstream cost
# evaluation degenerate; simulated values are clamped here and the
# clamp events counted.
DEMAND_FLOOR = 1.0

TRAJECTORY_CSV_COLUMNS = ("clock_time", "t_hours", "q0")

_SYNTHETIC_NOTE = (
    "default experiment parameters are synthetic placeholders, not values "
    "calibrated from observed demand"
)
_DRIFT_NOTE = (
    "relaxation target equals long_run_level * mean_reversion / "
    "(mean_reversion + volatility**2 / 2)"
)


@dataclass(frozen=True)
class OUParams:
    """Mean-reverting demand process parameters.

    mean_reversion: pull rate toward the long-run level (1/hr).
    long_run_level: stationary demand level (pax/hr/mi).
    volatility: multiplicative noise intensity (1/sqrt(hr)).
    q0_init: demand density at the start of the horizon (pax/hr/mi).
    """

    mean_reversion: float = 1.5
    long_run_level: float = 1500.0
    volatility: float = 0.3
    q0_init: float = 1000.0

    def __post_init__(self) -> None:
        if self.mean_reversion < 0.0:
            raise ValidationError("mean_reversion must be >= 0")
        if self.volatility < 0.0:
            raise ValidationError("volatility must be >= 0")
        if self.long_run_level <= 0.0:
            raise ValidationError("long_run_level must be > 0")
        if self.q0_init <= 0.0:
            raise ValidationError("q0_init must be > 0")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One simulated demand-density path.

    values[k] is the density at t = k * dt hours after t0_clock.
    floor_events counts samples clamped up to DEMAND_FLOOR.
    """

    t0_clock: float
    dt: float
    values: np.ndarray
    seed: int
    floor_events: int = 0

    @property
    def n_steps(self) -> int:
        return len(self.values) - 1

    @property
    def horizon(self) -> float:
        return self.n_steps * self.dt

    @property
    def t_hours(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.dt

    def clock_labels(self) -> list[str]:
        return [clock_label(self.t0_clock + t) for t in self.t_hours]


def clock_label(hours: float) -> str:
    """Render a time-of-day in hours as HH:MM, wrapping at midnight."""
    minutes = int(round(hours * 60.0))
    return "%02d:%02d" % ((minutes // 60) % 24, minutes % 60)


def _step_count(horizon: float, dt: float) -> int:
    if dt <= 0.0:
        raise ValidationError("dt must be > 0")
    if horizon <= 0.0:
        raise ValidationError("horizon must be > 0")
    if dt > horizon * (1.0 + 1e-12):
        raise ValidationError("dt must not exceed the horizon")
    # Tolerate horizons that are integer multiples of dt up to roundoff.
    return int(math.floor(horizon / dt + 1e-9))


def simulate(
    params: OUParams,
    horizon: float = DEFAULT_HORIZON_HR,
    dt: float = DEFAULT_DT_HR,
    seed: int = 0,
    t0_clock: float = DEFAULT_CLOCK_START_HR,
) -> Trajectory:
    """Simulate one demand trajectory over `horizon` hours in steps of `dt`.

    Deterministic in (params, horizon, dt, seed): repeated calls return
    bitwise-identical values.
    """
    n_steps = _step_count(horizon, dt)
    seed = int(seed)
    if seed < 0:
        raise ValidationError("seed must be a non-negative integer")

    theta = params.mean_reversion + 0.5 * params.volatility**2
    if theta > 0.0:
        drift = params.mean_reversion * params.long_run_level / theta
        drift_term = drift * -math.expm1(-theta * dt)
    else:
        drift_term = 0.0
    sig_sqrt_dt = params.volatility * math.sqrt(dt)

    gen = np.random.Generator(np.random.Philox(key=seed))
    shocks = gen.standard_normal(n_steps)

    values = np.empty(n_steps + 1)
    floors = 0
    q = params.q0_init
    if q < DEMAND_FLOOR:
        q = DEMAND_FLOOR
        floors += 1
    values[0] = q
    for k in range(n_steps):
        q = q * math.exp(-theta * dt + sig_sqrt_dt * shocks[k]) + drift_term
        if q < DEMAND_FLOOR:
            q = DEMAND_FLOOR
            floors += 1
        values[k + 1] = q
    values.setflags(write=False)
    return Trajectory(
        t0_clock=t0_clock, dt=dt, values=values, seed=seed, floor_events=floors
    )


def simulate_ensemble(
    params: OUParams,
    horizon: float = DEFAULT_HORIZON_HR,
    dt: float = DEFAULT_DT_HR,
    n: int = 10,
    base_seed: int = 0,
    t0_clock: float = DEFAULT_CLOCK_START_HR,
) -> list[Trajectory]:
    """Simulate n independent trajectories with seeds base_seed, base_seed+1, ..."""
    if n < 1:
        raise ValidationError("ensemble size must be >= 1")
    return [
        simulate(params, horizon=horizon, dt=dt, seed=base_seed + i, t0_clock=t0_clock)
        for i in range(n)
    ]


def write_trajectory_csv(traj: Trajectory, file: str | os.PathLike | IO[str]) -> None:
    """Write one trajectory as CSV with columns clock_time, t_hours, q0."""
    if hasattr(file, "write"):
        _write_trajectory_rows(traj, file)
        return
    with open(file, "w", newline="") as handle:
        _write_trajectory_rows(traj, handle)


def _write_trajectory_rows(traj: Trajectory, handle: IO[str]) -> None:
    writer = csv.writer(handle)
    writer.writerow(TRAJECTORY_CSV_COLUMNS)
    labels = traj.clock_labels()
    for label, t, q in zip(labels, traj.t_hours, traj.values):
        writer.writerow([label, "%.6f" % t, "%.6f" % q])


def read_trajectory_csv(file: str | os.PathLike | IO[str]) -> Trajectory:
    """Load a trajectory written by :func:`write_trajectory_csv`.

    Comment lines starting with ``#`` are skipped.  The step size is taken
    from the t_hours column (which must be uniform) and the clock start from
    the first clock_time label.  The returned trajectory carries seed -1 to
    mark an external source.
    """
    if hasattr(file, "read"):
        return _read_trajectory_rows(file)
    with open(file, newline="") as handle:
        return _read_trajectory_rows(handle)


def _read_trajectory_rows(handle: IO[str]) -> Trajectory:
    rows = [row for row in csv.reader(handle) if row and not row[0].startswith("#")]
    if not rows or tuple(rows[0]) != TRAJECTORY_CSV_COLUMNS:
        raise ValidationError(
            "trajectory file must start with columns %s" % ",".join(TRAJECTORY_CSV_COLUMNS)
        )
    body = rows[1:]
    if len(body) < 2:
        raise ValidationError("trajectory file needs at least two samples")
    try:
        t = np.array([float(row[1]) for row in body])
        q = np.array([float(row[2]) for row in body])
    except (IndexError, ValueError) as err:
        raise ValidationError(f"malformed trajectory row: {err}") from None
    steps = np.diff(t)
    dt = float(np.median(steps))
    if dt <= 0.0 or np.any(np.abs(steps - dt) > 1e-6):
        raise ValidationError("trajectory t_hours column must be uniformly spaced")
    if np.any(q <= 0.0):
        raise ValidationError("trajectory q0 values must be positive")
    label = body[0][0]
    try:
        hh, mm = label.split(":")
        t0_clock = int(hh) + int(mm) / 60.0
    except ValueError:
        raise ValidationError(f"bad clock_time label {label!r}; expected HH:MM") from None
    floors = int(np.sum(q <= DEMAND_FLOOR))
    q.setflags(write=False)
    return Trajectory(t0_clock=t0_clock, dt=dt, values=q, seed=-1, floor_events=floors)


def write_ensemble(
    trajectories: Sequence[Trajectory],
    directory: str | os.PathLike,
    params: OUParams | None = None,
) -> list[str]:
    """Write one CSV per trajectory plus a manifest.json into `directory`.

    Returns the list of written file paths (manifest last).
    """
    if not trajectories:
        raise ValidationError("need at least one trajectory to write")
    os.makedirs(directory, exist_ok=True)
    paths: list[str] = []
    entries = []
    for traj in trajectories:
        name = "trajectory_seed%d.csv" % traj.seed
        path = os.path.join(directory, name)
        write_trajectory_csv(traj, path)
        paths.append(path)
        entries.append(
            {
                "file": name,
                "seed": traj.seed,
                "n_steps": traj.n_steps,
                "floor_events": traj.floor_events,
            }
        )
    manifest = {
        "kind": "demand_trajectory_ensemble",
        "rng": "numpy Philox counter-based generator, key = seed",
        "columns": list(TRAJECTORY_CSV_COLUMNS),
        "units": {"t_hours": "hours", "q0": "pax/hr/mi"},
        "t0_clock": trajectories[0].t0_clock,
        "dt_hr": trajectories[0].dt,
        "horizon_hr": trajectories[0].horizon,
        "demand_floor": DEMAND_FLOOR,
        "trajectories": entries,
        "notes": [_SYNTHETIC_NOTE, _DRIFT_NOTE],
    }
    if params is not None:
        manifest["params"] = asdict(params)
    manifest_path = os.path.join(directory, "manifest.json")
    with open(manifest_path, "w") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    paths.append(manifest_path)
    return paths
