"""Shared fixtures: cached oracle solves and the acceptance summary hook."""

import numpy as np
import pytest

from jsq import oracle
from jsq.model import SymmetricParams

RHO_GRID = (0.1, 0.5, 1.0, 1.5, 2.0, 3.0)

# Filled by tests/test_acceptance.py; printed after the run so the one-line
# verdicts survive pytest's output capture.
ACCEPTANCE_RESULTS = []


@pytest.fixture(scope="session")
def oracle80():
    """Truncated-infinite oracle at rho=0.5, K=80 (one 6561-state solve)."""
    dist, tail = oracle.truncated_infinite(0.5, 80)
    return dist, tail


@pytest.fixture(scope="session")
def oracle_sym():
    """Memoized dense solves of the symmetric model."""
    cache = {}

    def get(rho, K):
        key = (rho, K)
        if key not in cache:
            cache[key] = oracle.stationary_dist(SymmetricParams(rho=rho, capacity=K))
        return cache[key]

    return get


def max_entry_gap(d1, d2, K=None):
    K = K if K is not None else min(d1.capacity, d2.capacity)
    return max(
        abs(float(d1.prob(j, k)) - float(d2.prob(j, k)))
        for j in range(K + 1)
        for k in range(K + 1)
    )


@pytest.fixture()
def entry_gap():
    return max_entry_gap


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
