import numpy as np
import pytest

from nehari import Field, random_init


def rand_field(grid, seed, amplitude=1.0):
    """Smooth random field (sine superposition), sign-indefinite."""
    f = random_init(grid, seed, modes=3, nonnegative=False)
    return Field(grid, amplitude * f.values)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_runtest_logreport(report):
    """Print one pass/fail line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    outcome = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] {name}: {outcome}")
