import random

import pytest

#: acceptance tests append "criterion N: PASS/FAIL" lines here; the summary
#: hook prints them after the run so they are visible without -s
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return random.Random(20240817)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
