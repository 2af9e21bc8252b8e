from collections import defaultdict

TITLES = {
    1: "order formula for V(FG)",
    2: "exhaustive verdicts at desk scale",
    3: "odd replay",
    4: "even replay",
    5: "even certificates beyond enumeration",
    6: "exhaustive and certificate verdicts agree",
    7: "quotient factorization",
    8: "table-group checks",
    9: "modular family display",
    10: "parser round-trip and byte-identical reports",
}

_outcomes: dict[int, list[bool]] = defaultdict(list)
_criterion_of: dict[str, int] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            _criterion_of[item.nodeid] = m.args[0]


def pytest_runtest_logreport(report):
    n = _criterion_of.get(report.nodeid)
    if n is None:
        return
    if report.when == "call" or report.failed or report.skipped:
        _outcomes[n].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(TITLES):
        results = _outcomes.get(n)
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        count = len(results or [])
        terminalreporter.write_line(f"criterion {n:2d}: {status:7s} {TITLES[n]} ({count} check{'s' * (count != 1)})")
