import re

_results = {}


def pytest_runtest_logreport(report):
    match = re.search(r"test_criterion_(\d+)(\w?)_", report.nodeid)
    if not match:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _results[report.nodeid] = (int(match.group(1)), match.group(2), report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (number, part, outcome) in sorted(_results.items(), key=lambda kv: kv[1]):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        name = nodeid.split("::")[-1]
        terminalreporter.write_line(f"criterion {number}{part}: {verdict}  {name}")
