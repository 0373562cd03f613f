from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from sawcavity import kernels
from sawcavity.config import reference_device

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def device():
    return reference_device()


@pytest.fixture(params=[b.NAME for b in kernels.available_backends()])
def backend(request):
    return {b.NAME: b for b in kernels.available_backends()}[request.param]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
