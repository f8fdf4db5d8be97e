from importlib import resources

import pytest

from arraygrammar.engine import read_trace
from arraygrammar.grammar import builtin_cpag

DATA = resources.files("arraygrammar") / "data"


@pytest.fixture(scope="session")
def cpag():
    return builtin_cpag()


@pytest.fixture(scope="session")
def cpag_text():
    return (DATA / "cpag.iag").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def fixture_trace(cpag):
    def load(name):
        return read_trace((DATA / "traces" / f"{name}.trace").read_text(encoding="utf-8"), cpag)
    return load


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, summary): acceptance criterion")


_criteria: dict[int, list] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = report.user_properties and dict(report.user_properties).get("criterion")
    if marker:
        number, summary = marker
        entry = _criteria.setdefault(number, [summary, True, 0.0])
        entry[1] = entry[1] and report.passed
        entry[2] += report.duration


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            item.user_properties.append(("criterion", tuple(mark.args)))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        summary, ok, seconds = _criteria[number]
        terminalreporter.write_line(
            f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {summary}  ({seconds:.2f}s)"
        )
