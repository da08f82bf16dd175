import numpy as np
import pytest

from hnreserve.oracle import fixture_triangle, random_triangles

FIXTURE_CSV = (
    "accident_year,dev_0,dev_1,dev_2\n"
    "1,100,150,165\n"
    "2,110,154,\n"
    "3,120,,\n"
)

_ACCEPTANCE_LINES = []


@pytest.fixture
def fixture3():
    return fixture_triangle()


@pytest.fixture(scope="session")
def random_tris():
    return random_triangles(10, seed=12345)


@pytest.fixture
def fixture_csv(tmp_path):
    path = tmp_path / "fixture3.csv"
    path.write_text(FIXTURE_CSV)
    return path


@pytest.fixture
def record_criterion():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary.

    ``passed=None`` records an explicit SKIP line.
    """

    def record(number, text, passed):
        status = "SKIP" if passed is None else ("PASS" if passed else "FAIL")
        line = f"[{status}] criterion {number}: {text}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def square(rows):
    """Pad ragged row lists with NaN into a square array."""
    n = len(rows)
    out = np.full((n, n), np.nan)
    for r, row in enumerate(rows):
        out[r, : len(row)] = row
    return out
