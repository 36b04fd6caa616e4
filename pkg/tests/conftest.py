import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DEFAULT_SEED = 20240611


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized corpora")


@pytest.fixture
def seed(request) -> int:
    return request.config.getoption("--seed")


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
