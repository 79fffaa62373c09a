import numpy as np
import pytest

from uavfso.params import Scenario

_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def defaults():
    return Scenario()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record_criterion(request):
    """Log one PASS/FAIL line for an acceptance criterion; repeated in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(label, passed, detail):
        line = f"criterion {label:<6} {'PASS' if passed else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
