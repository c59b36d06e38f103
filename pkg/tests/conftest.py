import functools

import pytest

from codim4cy.pipeline import construct, reproduce
from codim4cy.resolve import minimal_free_resolution

_VERDICTS: list = []


class Presets:
    """Session cache of the expensive per-preset computations."""

    @functools.lru_cache(maxsize=None)
    def ideal(self, name, seed=0):
        return construct(name, 101, seed)[0]

    @functools.lru_cache(maxsize=None)
    def resolution(self, name, seed=0):
        return minimal_free_resolution(self.ideal(name, seed))

    @functools.lru_cache(maxsize=None)
    def report(self, name):
        return reproduce(name, 101, 0, 10)


@pytest.fixture(scope="session")
def presets():
    return Presets()


@pytest.fixture
def verdict(request):
    """Call ``verdict(n, text)`` after the asserts of criterion ``n`` have passed.

    Failures and expected failures are recorded from the test outcome, so
    every criterion test leaves exactly one line in the final summary.
    """
    marker = request.node.get_closest_marker("criterion")
    label = marker.args[0] if marker else request.node.name
    state = {"detail": ""}

    def record(text):
        state["detail"] = text

    yield record
    rep = getattr(request.node, "rep_call", None)
    if rep is None:
        return
    if rep.passed:
        status = "PASS"
    elif hasattr(rep, "wasxfail"):
        status = "XFAIL"
        state["detail"] = rep.wasxfail
    elif rep.skipped:
        status = "SKIP"
    else:
        status = "FAIL"
    _VERDICTS.append((label, status, state["detail"]))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion covered by the test")


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, detail in sorted(_VERDICTS, key=lambda v: _sort_key(v[0])):
        line = f"criterion {label}: {status}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))


def _sort_key(label):
    head = label.split(".")[0].split()[0]
    return (int(head) if head.isdigit() else 99, label)
