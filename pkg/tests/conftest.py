import pytest

_ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store one acceptance line: ``record("C1 ...", passed, detail)``."""
    def _record(name, passed, detail=""):
        _ACCEPTANCE[name] = (bool(passed), detail)
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[name]
        status = "INFO" if name.startswith("INFO") else ("PASS" if passed else "FAIL")
        terminalreporter.write_line(f"{status}  {name}  {detail}")
