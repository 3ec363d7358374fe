import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when not in ("setup", "call"):
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    if rep.failed or rep.when == "call":
        _RESULTS[number] = (title, "PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, verdict, detail = _RESULTS[number]
        line = f"{verdict} criterion {number}: {title}"
        if detail:
            line += f" [{detail}]"
        terminalreporter.write_line(line)
