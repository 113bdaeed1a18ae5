from pathlib import Path

import pytest

from stminer.io import read_dataset

DATA = Path(__file__).parent / "data"

_acceptance_lines = []


@pytest.fixture
def chains():
    return read_dataset(DATA / "chains.csv")


@pytest.fixture(scope="session")
def acceptance_report():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
