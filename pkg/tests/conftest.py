import re

_CRITERION = re.compile(r"test_acceptance\.py::test_(c\d\d)_(\w+)")
_outcomes: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    key = m.group(1)
    if report.when == "call" or report.failed:
        prev = _outcomes.get(key, ("PASS", m.group(2)))[0]
        status = "FAIL" if report.failed or prev == "FAIL" else ("SKIP" if report.skipped else "PASS")
        _outcomes[key] = (status, m.group(2))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_outcomes):
        status, name = _outcomes[key]
        terminalreporter.write_line(f"{key} {status}  {name.replace('_', ' ')}")
