import numpy as np
import pytest

from fishbone.params import BridgeParams
from fishbone.piecewise import BarKernel, BarModel
from fishbone.projection import ProjectionKernel
from fishbone.slackening import MMK

M, R0 = 3.0, 1.0 / 3.0


def academic(j=1, k=1, beta=0.0):
    return BridgeParams(alpha=1.0, beta=beta, gamma=3.0, j=j, k=k)


@pytest.fixture
def mmk():
    return MMK(M, R0)


@pytest.fixture
def params11():
    return academic()


@pytest.fixture
def mmk_kernel11(mmk):
    return ProjectionKernel(mmk, 1, 1, engine="closed_form")


@pytest.fixture
def bar_kernel11():
    return BarKernel(BarModel(M, R0), 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_LINES = {}


def record_criterion(key, ok, detail):
    line = f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[key] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
