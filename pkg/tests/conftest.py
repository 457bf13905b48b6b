import io
import os

import pytest

from eadistinct.cli import main

DATA = os.path.join(os.path.dirname(__file__), "data")

# lines recorded by test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def run_cli():
    def _run(*argv):
        out = io.StringIO()
        code = main([str(a) for a in argv], out=out)
        return code, out.getvalue()
    return _run


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
