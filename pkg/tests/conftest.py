import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from polarperm import _backend
from polarperm.core import PolarCode

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

EX8_Y = np.array([-3.42, 2.97, 3.16, 1.45, 1.01, 0.32, 2.00, -6.12])
EX8_FROZEN = (0, 1, 2, 4)


def _available():
    names = ["python"]
    try:
        _backend.get("cython")
        names.append("cython")
    except ImportError:
        pass
    return names


@pytest.fixture(params=_available())
def backend(request, monkeypatch):
    """Run the test once per kernel backend."""
    monkeypatch.setattr(_backend, "kernels", _backend.get(request.param))
    return request.param


@pytest.fixture
def ex8_code():
    return PolarCode.from_frozen(8, EX8_FROZEN)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
