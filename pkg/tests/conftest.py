from __future__ import annotations

import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict[int, list[bool]] = defaultdict(list)
_TITLES: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion this test covers")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _TITLES[mark.args[0]] = mark.args[1]
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA[crit].append(report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_TITLES):
        results = _CRITERIA.get(n, [])
        status = "NOT RUN" if not results else "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n} [{_TITLES[n]}]: {status}")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240601)
