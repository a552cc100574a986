import pytest

# filled by tests/test_acceptance.py: criterion number -> (passed, summary)
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        passed, line = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {key}: {line}")


@pytest.fixture
def record():
    def _record(key, passed, line):
        ACCEPTANCE[key] = (bool(passed), line)
        print(f"[{'PASS' if passed else 'FAIL'}] criterion {key}: {line}")
        return passed

    return _record
