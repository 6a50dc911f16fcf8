from __future__ import annotations

import pytest

from predwave.pde_sim import Grid, SimConfig


@pytest.fixture
def small_cfg() -> SimConfig:
    """Coarse grid for fast qualitative runs."""
    return SimConfig(grid=Grid(L=200.0, nx=512), t_end=400.0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
