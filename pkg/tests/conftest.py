import re

_results: dict[int, list] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        entry = _results.setdefault(int(m.group(1)), [m.group(2), True])
        entry[1] = entry[1] and report.outcome == "passed"


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_results):
        name, ok = _results[k]
        terminalreporter.write_line(f"criterion {k} {'PASS' if ok else 'FAIL'}  {name.replace('_', ' ')}")
