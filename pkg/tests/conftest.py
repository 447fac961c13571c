import pytest

from battery import CUBIC, P3, PT3
from onestep.dist import DiscreteDist
from onestep.presets import grid_preset


@pytest.fixture(scope="session")
def beta22():
    return grid_preset("beta22")


@pytest.fixture(scope="session")
def linear():
    return grid_preset("linear")


@pytest.fixture(scope="session")
def uniform():
    return grid_preset("uniform")


@pytest.fixture(scope="session")
def twobump():
    return grid_preset("twobump")


@pytest.fixture
def pair3():
    return DiscreteDist(P3), DiscreteDist(PT3)


@pytest.fixture
def cubic():
    return CUBIC


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
