import sys
import time
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_acceptance: list = []


def pytest_configure(config):
    config._session_started = time.monotonic()
    config.addinivalue_line("markers", "run_last: run after every other collected test")


def pytest_collection_modifyitems(items):
    # stable sort keeps the collection order otherwise
    items.sort(key=lambda it: it.get_closest_marker("run_last") is not None)


def pytest_runtest_logreport(report):
    if report.when != "call" or "::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::test_criterion_")[1]
    number, _, title = name.partition("_")
    detail = dict(report.user_properties).get("summary", "")
    if report.failed:
        crash = getattr(report.longrepr, "reprcrash", None)
        detail = crash.message.splitlines()[0] if crash else "failed"
    _acceptance.append((int(number), title.replace("_", " "), report.outcome, report.duration, detail))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome, duration, detail in sorted(_acceptance):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status} {title} ({duration:.1f} s) {detail}".rstrip())


@pytest.fixture
def summary(record_property):
    """Record a one-line result and echo it (visible with -s)."""

    def put(text: str) -> None:
        record_property("summary", text)
        print(text)

    return put


@pytest.fixture(scope="session")
def session_start(pytestconfig) -> float:
    return pytestconfig._session_started
