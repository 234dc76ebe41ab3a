import numpy as np
import pytest

from polent import MEASURED_SOURCE_A, MEASURED_SOURCE_B, PolSqueezedSource


@pytest.fixture
def sources():
    return MEASURED_SOURCE_A, MEASURED_SOURCE_B


@pytest.fixture
def symmetric_sources():
    """Both inputs at the linear mean of the measured pair: 0.389 / 92.26."""
    v_sq = (10 ** -0.42 + 10 ** -0.40) / 2
    v_asq = (10 ** 1.97 + 10 ** 1.96) / 2
    th = np.radians(4.5)
    return PolSqueezedSource(v_sq, v_asq, th), PolSqueezedSource(v_sq, v_asq, th)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
