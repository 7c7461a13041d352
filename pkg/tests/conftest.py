"""Shared fixtures: the default scenario and a contrast scenario with a
strong occupancy skew that produces a real policy crossing on [200, 2200]."""

from __future__ import annotations

import pytest

from lanepolicy import OccupancyParams, Scenario


@pytest.fixture(scope="session")
def baseline() -> Scenario:
    return Scenario()


@pytest.fixture(scope="session")
def contrast() -> Scenario:
    return Scenario(
        occupancy=OccupancyParams(low_share=0.8, low_occupancy=1.0, high_occupancy=4.0)
    )
