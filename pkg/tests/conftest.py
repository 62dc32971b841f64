"""Shared pytest wiring for the release-gate checks."""

import pytest

_GATE_LINES = []


@pytest.fixture
def gate():
    """Record one PASS/FAIL line per release-gate check.

    Lines are printed immediately (visible with -s or on failure) and
    echoed in the terminal summary at the end of the run.
    """
    def record(num, name, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        line = f"[criterion {num}] {status} {name}"
        if detail:
            line += f" — {detail}"
        print(line)
        _GATE_LINES.append(line)
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _GATE_LINES:
        terminalreporter.section("release gate")
        for line in sorted(_GATE_LINES):
            terminalreporter.line(line)
