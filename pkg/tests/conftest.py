import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

from coarse import parse_group  # noqa: E402


@pytest.fixture(scope="session")
def Z():
    return parse_group("Z")


@pytest.fixture(scope="session")
def Z2():
    return parse_group("Z^2")


@pytest.fixture(scope="session")
def F2():
    return parse_group("F_2")


_CRITERIA: dict = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    num = int(name.split("_")[2])
    if report.when == "call" or report.failed:
        prev = _CRITERIA.get(num)
        if prev is None or prev[0]:
            _CRITERIA[num] = (report.passed, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        ok, secs = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'} ({secs:.1f}s)")
