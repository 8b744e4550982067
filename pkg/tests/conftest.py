import numpy as np
import pytest

from util import ACCEPTANCE_LINES


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def _no_floor_override(monkeypatch):
    monkeypatch.delenv("MAPCA_SPD_FLOOR", raising=False)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
