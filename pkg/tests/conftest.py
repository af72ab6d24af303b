import pytest

# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])


@pytest.fixture
def record():
    def _record(key: str, passed: bool, detail: str) -> None:
        line = f"{'PASS' if passed else 'FAIL'}  {key}: {detail}"
        ACCEPTANCE[key] = line
        print(line)
    return _record
