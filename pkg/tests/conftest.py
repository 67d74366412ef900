import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

CRITERIA = {
    1: "mixture depth curves: n=1 and n=2 closed forms, n=3,4 ordering",
    2: "maximum-depth superpositions and cats, analytic minima",
    3: "distance closed forms vs numeric Q maximisation",
    4: "Gaussian depth/distance bijection",
    5: "phase-space consistency (Wigner, Q, cross-evaluator, normalisation)",
    6: "diagnostics: Mandel q, impurity, no quadrature squeezing",
    7: "shortcut rules: zero vacuum population, squeezed mixtures",
    8: "acceptance suite runtime under 15 minutes",
}

_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion exercised by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or rep.failed:
        _outcomes.setdefault(mark.args[0], []).append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, text in CRITERIA.items():
        runs = _outcomes.get(n)
        if not runs:
            status = "NOT RUN"
        else:
            status = "PASS" if all(runs) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status:7s} {text} ({len(runs or [])} checks)")
