import pytest

_ACCEPTANCE = {}


@pytest.fixture
def report():
    """Record and print a one-line verdict for an acceptance criterion, then assert it."""

    def _report(number, title, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        assert passed, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
