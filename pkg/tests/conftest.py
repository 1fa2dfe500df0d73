"""Per-criterion PASS/FAIL summary for tests marked ``criterion``."""

import pytest

_results: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title): acceptance criterion exercised by the test"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if report.when != "call" and report.passed:
        return
    number, title = mark.args
    entry = _results.setdefault(number, {"title": title, "passed": 0, "failed": [], "skipped": 0})
    if report.passed:
        entry["passed"] += 1
    elif report.skipped:
        entry["skipped"] += 1
    else:
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        entry = _results[number]
        if entry["failed"]:
            status = "FAIL"
        elif entry["passed"]:
            status = "PASS"
        else:
            status = "SKIP"
        line = f"[{status}] criterion {number}: {entry['title']}"
        if entry["failed"]:
            line += f"  (failed: {', '.join(entry['failed'])})"
        terminalreporter.write_line(line)
