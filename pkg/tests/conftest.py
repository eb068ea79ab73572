import time

import pytest

from picard_strata.dual_graph import DualGraph

_SESSION_START = time.monotonic()
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def session_elapsed() -> float:
    return time.monotonic() - _SESSION_START


def pytest_collection_modifyitems(items):
    # acceptance runs last so criterion 10 can time the whole session
    items.sort(key=lambda item: "test_acceptance" in item.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def vine111():
    return DualGraph.vine(1, 1, 1)


@pytest.fixture
def vine003():
    return DualGraph.vine(0, 0, 3)
