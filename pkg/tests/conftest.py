from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bilap.lab.families import random_band_limited
from bilap.spectral_core import TorusGrid

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def grid1():
    return TorusGrid(1, 32)


@pytest.fixture
def grid2():
    return TorusGrid(2, 16)


def band_field(grid, seed, band=None, decay=0.0):
    return random_band_limited(grid, np.random.default_rng(seed), band, decay)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance criteria with PASS/FAIL summary lines")


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed", "xfailed"):
        for rep in terminalreporter.stats.get(key, []):
            lines += [v for k, v in getattr(rep, "user_properties", ()) if k == "acceptance"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
