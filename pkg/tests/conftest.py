import pytest

# verdict lines recorded by the acceptance suite, echoed after the run
ACCEPTANCE: list[str] = []


@pytest.fixture
def verdict():
    def record(tag: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} {tag:<4} {detail}"
        ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
