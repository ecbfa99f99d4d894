import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# Filled in by tests/test_acceptance.py; echoed after the run so the
# per-criterion verdicts survive output capture.
acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance_lines):
            terminalreporter.write_line(line)
