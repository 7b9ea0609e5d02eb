import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from toricmle.lattice import catalog, lookup

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

TABLE_MODELS = ["S3", "S4", "S4_A2", "S4_A3", "S5", "S5'", "S6", "S6'", "S6''", "S6'''"]
CLOSED_FORM_MODELS = ["S3", "S4", "S4_A2", "S4_A3"]


@pytest.fixture(scope="session")
def entries():
    return catalog()


@pytest.fixture
def rng():
    return np.random.default_rng(20241019)


def model(label):
    return lookup(label).model()


def random_counts(rng, m, low=1, high=1000):
    return [int(x) for x in rng.integers(low, high + 1, size=m)]


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    RESULTS = getattr(module, "RESULTS", None)
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: int(k.split()[0])):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")
