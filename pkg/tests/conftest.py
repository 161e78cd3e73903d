from math import gcd

import pytest

import rileyslopes as rs


def all_valid_knots(max_p: int):
    for p in range(3, max_p + 1, 2):
        for q in range(-p + 2, p, 2):  # odd q in (-p, p)
            if gcd(p, abs(q)) == 1:
                yield rs.validate_knot(p, q)


@pytest.fixture(scope="session")
def k113():
    return rs.validate_knot(11, 3)


@pytest.fixture(scope="session")
def k53():
    return rs.validate_knot(5, 3)


@pytest.fixture(scope="session")
def k31():
    return rs.validate_knot(3, 1)


@pytest.fixture(scope="session")
def sys113(k113):
    return rs.riley_system(k113)


@pytest.fixture(scope="session")
def sys53(k53):
    return rs.riley_system(k53)


@pytest.fixture(scope="session")
def sys31(k31):
    return rs.riley_system(k31)


@pytest.fixture(scope="session")
def branches113(sys113):
    """The banded negative-slope (by t) and positive-slope (by u) branches."""
    return rs.trace_slope_branches(sys113, dps=50)


@pytest.fixture(scope="session")
def branches53(sys53):
    return rs.trace_slope_branches(sys53, dps=50)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    from acceptance_log import summary_lines

    lines = summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
