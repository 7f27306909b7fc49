"""Shared fixtures: one-line summaries for the acceptance checks."""

import pytest

_LINES = []


@pytest.fixture
def criterion_line():
    """Record one pass/fail summary line, echoed again after the run."""

    def record(line):
        _LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _LINES:
        terminalreporter.section("acceptance summary")
        for line in _LINES:
            terminalreporter.write_line(line)
