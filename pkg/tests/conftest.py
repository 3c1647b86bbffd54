import re

import numpy as np
import pytest

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    num, name = int(m.group(1)), m.group(2)
    if report.when == "call" or report.outcome in ("failed", "skipped"):
        prev = _CRITERIA.get(num)
        if prev is None or prev[1] == "PASS":
            _CRITERIA[num] = (name, "PASS" if report.outcome == "passed" else report.outcome.upper())


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        name, verdict = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:>2} {name.replace('_', ' '):<40} {verdict}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
