import pytest

from lorascale import Cell, RadioConfig, plan_eib

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def radio():
    return RadioConfig()


@pytest.fixture(scope="session")
def cell6(radio):
    """Default radio, EIB, R = 6 km, N = 1500."""
    return Cell(radio, plan_eib(6000.0), 1500.0)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
