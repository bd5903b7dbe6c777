"""Shared fixtures for spheig tests."""

import os

import numpy as np
import pytest

from spheig.geometry import PParams, SphericalDomain
from spheig.models import Branch
from spheig.ode_axisym import solve_beta


def pytest_collection_modifyitems(config, items):
    if os.environ.get("CI") or os.environ.get("SPHEIG_SLOW"):
        return

    skip_slow = pytest.mark.skip(reason="Skipping slow run (set CI or SPHEIG_SLOW)")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def isolated_log(tmp_path, monkeypatch):
    """Keep the CLI file sink out of the user log directory."""
    monkeypatch.setattr("spheig.cli.main.CLI_LOG_PATH", tmp_path / "cli.log")


@pytest.fixture
def quarter_arc():
    return SphericalDomain.arc(np.pi / 2.0)


@pytest.fixture
def hemisphere():
    return SphericalDomain.cap(np.pi / 2.0, 3)


@pytest.fixture(scope="session")
def arc_pair_p2():
    """Shooting eigenpair of the quarter arc for p = 2 (beta = 2)."""
    return solve_beta(PParams(p=2.0, dim=2), SphericalDomain.arc(np.pi / 2.0), Branch.SINGULAR)
