"""Shared pytest wiring.

Tests marked ``acceptance("label")`` feed a checklist that is printed as one
PASS/FAIL line per entry after the run, so the end-to-end guarantees are
visible at a glance in the terminal summary.
"""

_results = {}
_order = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(label): entry in the acceptance checklist printed after the run")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            label = mark.args[0]
            item.user_properties.append(("acceptance_label", label))
            if label not in _order:
                _order.append(label)


def pytest_runtest_logreport(report):
    label = dict(report.user_properties).get("acceptance_label")
    if label is None:
        return
    if report.when == "call":
        outcome = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        _results[label] = outcome
    elif not report.passed:
        # setup/teardown error counts as a failure of the checklist entry
        _results[label] = "SKIP" if report.skipped else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _order:
        return
    terminalreporter.section("acceptance checklist")
    for idx, label in enumerate(_order, 1):
        outcome = _results.get(label, "NOT RUN")
        terminalreporter.write_line(f"[{idx:2d}] {outcome:<7s} {label}")
