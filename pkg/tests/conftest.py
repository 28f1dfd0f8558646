import sys

import pytest

from models import chain3, discrete2
from ttglue import catalog


@pytest.fixture
def chain():
    return chain3()


@pytest.fixture
def discrete():
    return discrete2()


@pytest.fixture(scope="session")
def valuation():
    return catalog.valuation_package()


@pytest.fixture(scope="session")
def artin():
    return catalog.artin_motives_space(3)


@pytest.fixture(scope="session")
def d8():
    return catalog.d8_package()


@pytest.fixture(scope="session")
def chromatic():
    return catalog.chromatic_p_completion_package(4)


@pytest.fixture(scope="session")
def excisive():
    return catalog.excisive_d3p2_package(4)


@pytest.fixture(scope="session")
def split():
    return catalog.split_package()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
