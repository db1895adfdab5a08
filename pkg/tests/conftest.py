import pytest

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        _ACCEPTANCE[report.nodeid] = report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, rep in sorted(_ACCEPTANCE.items()):
        name = nodeid.split("::")[-1]
        status = "PASS" if rep.passed else "FAIL"
        detail = dict(rep.user_properties).get("summary", "")
        terminalreporter.write_line(f"{status}  {name}  {detail}")


@pytest.fixture
def summary(record_property):
    """Attach a one-line summary to the acceptance report."""
    def put(text):
        record_property("summary", text)
        print(text)
    return put
