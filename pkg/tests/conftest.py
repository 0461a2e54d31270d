import pytest

from relsite import fixtures


@pytest.fixture
def C2():
    return fixtures.C2()


@pytest.fixture
def one():
    return fixtures.ONE()


@pytest.fixture
def J1(C2):
    return fixtures.J1(C2)


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":").rstrip("s"))):
            terminalreporter.write_line(line)
