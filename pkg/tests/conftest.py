from pathlib import Path

import pytest

from cxc import gen

GOLDEN = Path(__file__).parent / "golden"
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def corpus():
    return gen.finite_corpus(240, seed=0)


@pytest.fixture(scope="session")
def periodic_corpus():
    return gen.periodic_corpus(pendants=20, seed=0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
