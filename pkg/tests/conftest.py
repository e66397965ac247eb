import pytest

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record one acceptance criterion's verdict for the terminal summary."""

    def record(number: int, ok: bool, detail: str):
        _ACCEPTANCE[number] = (ok, detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
