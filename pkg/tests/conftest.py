import numpy as np
import pytest

from entdyn.basis import enumerate_sector
from entdyn.state import random_sector_state

# each criterion test in test_acceptance.py records one line here; the summary
# hook prints them all at the end so the verdicts survive pytest's folding
ACCEPTANCE_LINES = {}


def record_acceptance(number, ok, detail):
    word = "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {word}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])


@pytest.fixture(scope="session")
def basis8():
    return enumerate_sector(8, 0)


@pytest.fixture(scope="session")
def basis6():
    return enumerate_sector(6, 0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture()
def state8(basis8, rng):
    return random_sector_state(basis8, rng)
