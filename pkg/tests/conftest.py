import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion_line():
    """Record one summary line per acceptance criterion."""
    def record(text):
        _LINES.append(text)
        print(text)
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
