import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA = {
    1: "constant formulas",
    2: "symbol and fundamental solution",
    3: "solver conservation and positivity",
    4: "fractional-Laplacian kernel compliance",
    5: "Boltzmann kernel",
    6: "De Giorgi iteration",
    7: "barriers",
    8: "weak Poincare",
    9: "Harnack pipeline (surrogate constants)",
    10: "Hoelder estimation",
    11: "reproducibility",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n = mark.args[0]
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes.setdefault(n, []).append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, name in CRITERIA.items():
        res = _outcomes.get(n)
        if res is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(res) else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d} {status:7s} {name} ({len(res or [])} checks)")
