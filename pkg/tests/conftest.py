import os

import pytest
from hypothesis import settings

from largedam import BatchDistribution, CostProfile, DamModel, ServiceDistribution

settings.register_profile("default", max_examples=40, deadline=None)
settings.register_profile("ci", max_examples=15, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def mm1(rho=0.5, L=12):
    """Plain M/M/1 (both regimes identical)."""
    s = ServiceDistribution.exponential(1.0 / rho)
    return DamModel(1.0, BatchDistribution.single(), s, s, L)


def geometric_model(L=10, rho1=1.0, rho2=0.5, q=0.5):
    """Geometric batches with exponential services in both regimes."""
    m = DamModel(1.0, BatchDistribution.geometric(q), ServiceDistribution.exponential(1.0),
                 ServiceDistribution.exponential(1.0), L)
    return m.with_rho(rho1=rho1, rho2=rho2)


def scenario_b(L=200, rho1=1.0, j2=1.06):
    """Poisson input, deterministic services: D = 1, rho2 = 0.5, costs 2 -> 1."""
    m = DamModel(1.0, BatchDistribution.single(), ServiceDistribution.deterministic(1.0),
                 ServiceDistribution.deterministic(0.5), L, 1.0, j2, CostProfile.linear(2.0, 1.0))
    return m.with_rho(rho1=rho1)


@pytest.fixture
def geo():
    return geometric_model()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
