import sys

import pytest

from brachistochrone.curves import make_mesh
from brachistochrone.cycloid_solver import BrachProblem, sample_solution, solve


@pytest.fixture(scope="session")
def unit_solution():
    return solve(BrachProblem(1.0, 1.0))


@pytest.fixture(scope="session")
def mesh128():
    return make_mesh(128, 1.0)


@pytest.fixture(scope="session")
def unit_cycloid(unit_solution, mesh128):
    return sample_solution(unit_solution, mesh128)


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.RESULTS[number])
