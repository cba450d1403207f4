import pytest

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store one acceptance verdict; the summary prints them in order."""

    def _record(key: str, passed: bool, detail: str) -> None:
        ACCEPTANCE[key] = (bool(passed), detail)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split()[0][2:].rstrip("ab")), k)):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {key}: {detail}")
