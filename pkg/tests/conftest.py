import pytest
from hypothesis import settings

from eepnber.core import LaserParams, LinkParams, ModulationSpec, noise_budget

settings.register_profile("eepnber", max_examples=60, deadline=None)
settings.load_profile("eepnber")

_acceptance_lines = []


@pytest.fixture
def link_2000km():
    return LinkParams.from_engineering(1550.0, 16.0, 2000.0)


@pytest.fixture
def fig1b_budget(link_2000km):
    return noise_budget(link_2000km, LaserParams(5e6, 5e6), ModulationSpec(4, 28e9))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.get_closest_marker("acceptance") and report.when == "call":
        detail = dict(report.user_properties).get("detail", "")
        title = (item.function.__doc__ or item.name).strip().splitlines()[0]
        verdict = "PASS" if report.passed else "FAIL"
        _acceptance_lines.append(f"{verdict}  {title}  {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
