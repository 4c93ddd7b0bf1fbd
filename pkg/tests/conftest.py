import numpy as np
import pytest

from leafmetric.fixtures import get_fixture
from leafmetric.singular import find_singularities

ACCEPTANCE_LINES = []


def report(number: int, title: str, ok: bool, detail: str = "") -> bool:
    """Record one acceptance line; it is printed immediately and in the terminal summary."""
    line = f"{'PASS' if ok else 'FAIL'} [{number:2d}] {title}" + (f" :: {detail}" if detail else "")
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def example5():
    return get_fixture("example5")


@pytest.fixture(scope="session")
def radial():
    return get_fixture("radial")


@pytest.fixture(scope="session")
def diag21():
    return get_fixture("diag21")


@pytest.fixture(scope="session")
def example5_zeros(example5):
    return find_singularities(example5, 3.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
