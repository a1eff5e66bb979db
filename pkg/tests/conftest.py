"""Shared fixtures plus the acceptance report hook.

test_acceptance.py appends one line per criterion to `acceptance_report`;
after the run those lines are printed as their own terminal section so the
pass/fail status of every criterion is visible in one place.
"""

import numpy as np
import pytest

acceptance_report: list[str] = []


def record(line: str) -> None:
    acceptance_report.append(line)


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not acceptance_report:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_report:
        terminalreporter.write_line(line)
