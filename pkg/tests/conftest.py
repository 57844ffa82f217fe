import re

_criterion_results = {}

_CRITERION_RE = re.compile(r"test_criterion_(\d+)")


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    match = _CRITERION_RE.search(report.nodeid)
    if match:
        number = int(match.group(1))
        outcome = "PASS" if report.passed else "FAIL"
        _criterion_results[number] = outcome


def pytest_terminal_summary(terminalreporter):
    if not _criterion_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(_criterion_results):
        terminalreporter.write_line(
            f"criterion {number}: {_criterion_results[number]}"
        )
