import pytest

_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion."""
    def _report(number: int, title: str, ok: bool, detail: str, seconds: float):
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}  [{seconds:.1f}s]  {detail}"
        _LINES.append(line)
        print(line)
    return _report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES):
            terminalreporter.write_line(line)
