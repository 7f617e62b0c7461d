import re

CRITERIA = {}
_NAME = re.compile(r"test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    m = _NAME.search(report.nodeid)
    if not m:
        return
    key = int(m.group(1))
    title = m.group(2).replace("_", " ")
    ok = CRITERIA.get(key, (title, True))[1]
    if report.failed or (report.when == "call" and report.skipped):
        ok = False
    CRITERIA[key] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA):
        title, ok = CRITERIA[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {key}: {title}")
