import pytest

_REPORT = []


@pytest.fixture(scope="session")
def report():
    """Collects one line per acceptance criterion, printed at the end of the run."""

    def add(number, name, ok, detail):
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
        _REPORT.append((number, line))
        print("\n" + line)
        return ok

    return add


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_REPORT):
            terminalreporter.write_line(line)
