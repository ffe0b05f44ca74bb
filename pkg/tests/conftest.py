import numpy as np
import pytest

from tvpgar.synthetic import DgpSpec, simulate_dgp


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_dataset():
    data, truth = simulate_dgp(DgpSpec(T=60, K=2, beta_path="random_walk", v=0.05, vol="sv", seed=3))
    return data, truth


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for i in sorted(lines):
            terminalreporter.write_line(lines[i])
