import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, derandomize=True, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_criteria: dict[int, dict] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, text = marker.args
    entry = _criteria.setdefault(number, {"text": text, "ok": True, "seen": False})
    if call.when == "call" or call.excinfo is not None:
        entry["seen"] = True
        if call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception):
            entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "PASS" if entry["ok"] and entry["seen"] else "FAIL"
        terminalreporter.write_line(f"AC{number:02d} {status}  {entry['text']}")
