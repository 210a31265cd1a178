from pathlib import Path

import pytest

from hbpp.instance import Instance, generate_instance

DATA = Path(__file__).parent / "data"


def make(weights, capacity, name="t"):
    return Instance(name=name, capacity=capacity, weights=tuple(weights))


@pytest.fixture
def pairs_instance():
    return make([50, 50, 50, 50], 100, "pairs")


@pytest.fixture
def heavy_instance():
    return make([60, 60, 60], 100, "heavy")


@pytest.fixture
def reference_instance():
    """The fixed n=6 instance used to calibrate the default annealing time."""
    return generate_instance(6, 100, "gauss1", seed=6, name="ref_6_100_1G")


_acceptance: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "acceptance", None)
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker
    if report.when == "call" or report.failed:
        _acceptance[number] = (title, "PASS" if report.passed else "FAIL")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        outcome.get_result().acceptance = marker.args


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, verdict = _acceptance[number]
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")
