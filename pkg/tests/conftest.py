"""Session hooks shared by the test modules.

The acceptance module registers one verdict line per criterion; echoing
them in the terminal summary keeps all ten visible even though pytest
captures stdout of passing tests.
"""

_criterion_lines: dict[int, str] = {}


def record_criterion(number: int, line: str) -> None:
    _criterion_lines[number] = line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criterion_lines):
        terminalreporter.write_line(_criterion_lines[number])
