import pytest

_acceptance_lines: list[str] = []


@pytest.fixture
def acceptance_report():
    """Collect one pass/fail line per acceptance criterion for the summary."""

    def record(line: str):
        _acceptance_lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
