from __future__ import annotations

import numpy as np
import pytest

from wlstab.core import ColorMatrix, normalize


def random_colored(rng: np.random.Generator, n: int) -> ColorMatrix:
    """A random input of one of four shapes: graph, digraph, arc-colored, fully colored."""
    kind = int(rng.integers(4))
    if kind == 0:
        p = rng.uniform(0.2, 0.8)
        upper = np.triu(rng.random((n, n)) < p, 1)
        a = (upper | upper.T).astype(np.int64)
    elif kind == 1:
        a = (rng.random((n, n)) < rng.uniform(0.2, 0.8)).astype(np.int64)
    elif kind == 2:
        a = rng.integers(0, int(rng.integers(2, 5)), size=(n, n))
    else:
        a = rng.integers(0, 3, size=(n, n))
        np.fill_diagonal(a, rng.integers(0, 2, size=n) + 10)
        return normalize(a)
    np.fill_diagonal(a, 0)
    return normalize(a)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240101)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")
    config.addinivalue_line("markers", "slow: long-running sweep")
    config._criteria = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = marker.args
        item.config._criteria.append((number, title, report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_criteria", [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome in sorted(results, key=lambda t: t[0]):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{verdict}] criterion {number}: {title}")
