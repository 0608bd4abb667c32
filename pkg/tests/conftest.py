"""Shared test session state.

The acceptance module reports one line per criterion; capture would
swallow them on passing tests, so they are replayed here after the run.
"""

ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
