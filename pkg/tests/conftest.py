import numpy as np
import pytest

from mecoffload.config import SystemConfig

ACCEPTANCE = {}


def record(criterion: int, passed: bool, detail: str):
    ACCEPTANCE[criterion] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def cfg5():
    return SystemConfig.defaults(5, 2)


@pytest.fixture
def cfg1():
    return SystemConfig.defaults(1, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
