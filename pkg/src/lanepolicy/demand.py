"""Linear many-to-one demand field and auto-occupancy bookkeeping.

Travelers originate along the corridor with density q(x) = q0*(1 - x/A) and
all head to the inner end at x = A, so the flow passing location x is the
demand accumulated on [x, A].  A scalar share R of all travelers drives; the
rest ride buses.  Auto travelers split further into low- and high-occupancy
vehicles, which yields the average occupancy used to convert person flows to
vehicle flows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import OccupancyParams
from .errors import ValidationError

__all__ = [
    "DemandField",
    "OccupancySplit",
    "density",
    "cumulative_demand",
    "occupancy_split",
    "total_volume",
]

_MODE_SHARES = ("auto", "bus", "total")


@dataclass(frozen=True)
class DemandField:
    """Demand profile scalars: boundary density q0, length, and auto share R."""

    q0: float  # pax/hr/mi at x = 0
    length_mi: float
    auto_share: float  # R

    def __post_init__(self) -> None:
        if self.q0 < 0:
            raise ValidationError(f"q0 must be >= 0, got {self.q0}")
        if self.length_mi <= 0:
            raise ValidationError(f"length_mi must be > 0, got {self.length_mi}")
        if not 0 <= self.auto_share <= 1:
            raise ValidationError(f"auto_share must lie in [0, 1], got {self.auto_share}")


def _check_position(x, length_mi: float):
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < -1e-12) or np.any(x_arr > length_mi * (1 + 1e-12)):
        raise ValidationError(f"position {x!r} falls outside the corridor [0, {length_mi}]")
    return x_arr


def density(field: DemandField, x):
    """Trip-origin density q0*(1 - x/A) in pax/hr/mi; accepts scalars or arrays."""
    x_arr = _check_position(x, field.length_mi)
    out = field.q0 * (1.0 - x_arr / field.length_mi)
    out = np.maximum(out, 0.0)  # guard the x = A boundary against roundoff
    return float(out) if np.isscalar(x) else out


def cumulative_demand(field: DemandField, mode: str, x):
    """Demand accumulated from x to the corridor end, pax/hr.

    Closed form share * q0 * (A - x)^2 / (2A); ``mode`` selects the share
    (``auto`` -> R, ``bus`` -> 1 - R, ``total`` -> 1).
    """
    if mode not in _MODE_SHARES:
        raise ValidationError(f"mode must be one of {_MODE_SHARES}, got {mode!r}")
    x_arr = _check_position(x, field.length_mi)
    share = {"auto": field.auto_share, "bus": 1.0 - field.auto_share, "total": 1.0}[mode]
    a = field.length_mi
    out = share * field.q0 * (a - x_arr) ** 2 / (2.0 * a)
    return float(out) if np.isscalar(x) else out


@dataclass(frozen=True)
class OccupancySplit:
    """Traveler-level occupancy shares and the resulting average occupancy."""

    low_fraction: float  # share of auto travelers riding in low-occupancy vehicles
    high_fraction: float
    average_occupancy: float  # pax/veh across the whole auto fleet


def occupancy_split(occ: OccupancyParams) -> OccupancySplit:
    """Convert the vehicle-level mix into traveler fractions and mean occupancy.

    With ``mu`` the low-occupancy share of vehicles, the share of *travelers*
    in low-occupancy vehicles is mu*O_la / (mu*O_la + (1-mu)*O_ha), and the
    average occupancy is the harmonic combination O_la*O_ha / (O_ha*q_l +
    O_la*q_h), which simplifies to the vehicle-weighted mean mu*O_la +
    (1-mu)*O_ha.
    """
    mu, o_low, o_high = occ.low_share, occ.low_occupancy, occ.high_occupancy
    weight = mu * o_low + (1.0 - mu) * o_high
    q_l = mu * o_low / weight
    q_h = 1.0 - q_l
    o_avg = o_low * o_high / (o_high * q_l + o_low * q_h)
    return OccupancySplit(low_fraction=q_l, high_fraction=q_h, average_occupancy=o_avg)


def total_volume(field: DemandField, average_occupancy: float, bus_pce: float, frequency: float, x):
    """Auto-equivalent traffic volume at x: Q_auto(x)/O_avg + PCE*F, veh/hr."""
    if frequency < 0:
        raise ValidationError(f"frequency must be >= 0, got {frequency}")
    if average_occupancy <= 0:
        raise ValidationError(f"average_occupancy must be > 0, got {average_occupancy}")
    q_auto = cumulative_demand(field, "auto", x)
    return q_auto / average_occupancy + bus_pce * frequency
