from __future__ import annotations

import time

import pytest

from acceptance_report import RESULTS, format_line
from hypershadow import mc


@pytest.fixture(scope="session")
def limit_run_2000():
    """One n = 2000, 2e5-draw run of all three limit statistics at the default seed, and its duration."""
    start = time.perf_counter()
    samples = mc.sample_limit_statistics(mc.KINDS, 2000, 200_000, seed=mc.DEFAULT_SEED)
    return samples, time.perf_counter() - start


@pytest.fixture(scope="session")
def limit_samples_2000(limit_run_2000):
    return limit_run_2000[0]


@pytest.fixture(scope="session")
def beta_oracle_table():
    """(z, alpha, beta, quadrature value) for the 200-case incomplete beta grid."""
    from oracles import beta_cdf_quad, beta_grid

    return [(z, a, b, beta_cdf_quad(z, a, b)) for z, a, b in beta_grid()]


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(format_line(number))
