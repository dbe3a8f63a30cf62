"""Shared fixtures and the acceptance-summary terminal hook."""

import pytest

from censoredpl import PathlossParams


@pytest.fixture
def true_params():
    return PathlossParams(60.0, 2.0, 4.0)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # One PASS/FAIL line per acceptance criterion, visible in plain runs.
    import sys

    results = None
    for name, module in sys.modules.items():
        if name.rpartition(".")[2] == "test_acceptance":
            results = getattr(module, "RESULTS", None)
            break
    if not results:
        return
    terminalreporter.ensure_newline()
    terminalreporter.section("acceptance criteria")
    for name, passed in results:
        terminalreporter.write_line(("PASS" if passed else "FAIL") + f": {name}")
