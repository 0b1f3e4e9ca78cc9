import pytest

ACCEPTANCE = []


@pytest.fixture
def report():
    """Record one pass/fail line for the acceptance summary."""
    def record(criterion: str, passed: bool, detail: str):
        ACCEPTANCE.append((criterion, passed, detail))
        assert passed, f"{criterion}: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
