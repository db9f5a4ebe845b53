import pytest

from collective_cqed.atomic_data import RB87_D2, build_dipole_table


@pytest.fixture(scope="session")
def table():
    return build_dipole_table()


@pytest.fixture(scope="session")
def line():
    return RB87_D2


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_report():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
