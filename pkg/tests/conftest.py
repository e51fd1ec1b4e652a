import pytest

from qedfriction.response import OscillatorParams

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def params():
    return OscillatorParams.default()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
