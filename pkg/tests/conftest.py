import pytest
from hypothesis import HealthCheck, settings

from pathprops.fixtures import airline_graph, connection_defs

settings.register_profile("repo", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def g():
    return airline_graph()


@pytest.fixture(scope="session")
def conn():
    return connection_defs()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance check")


_CRITERIA = {}


def pytest_runtest_logreport(report):
    n = report.__dict__.get("criterion")
    if n is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA[n] = (report.outcome, report.duration, report.nodeid)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result().criterion = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        outcome, seconds, nodeid = _CRITERIA[n]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {n:>2}: {verdict}  {seconds:7.2f}s  {nodeid.split('::')[-1]}")
