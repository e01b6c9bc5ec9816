import time

import numpy as np
import pytest

from iqakit.synthetic import gallery

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title, budget): acceptance criterion with runtime budget in seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args[:2]
    entry = _CRITERIA.setdefault(n, {"title": title, "ok": True, "detail": []})
    if report.when == "call" or report.failed:
        if report.failed:
            entry["ok"] = False
            entry["detail"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        status = "PASS" if e["ok"] else "FAIL"
        extra = "" if e["ok"] else f"  ({', '.join(e['detail'])})"
        terminalreporter.write_line(f"AC{n:<3d} {status}  {e['title']}{extra}")


@pytest.fixture
def budget():
    """Context manager asserting that a block finishes within a runtime budget."""

    class _Budget:
        def __init__(self, seconds):
            self.seconds = seconds

        def __enter__(self):
            self.start = time.perf_counter()
            return self

        def __exit__(self, *exc):
            self.elapsed = time.perf_counter() - self.start
            if exc[0] is None:
                assert self.elapsed < self.seconds, f"took {self.elapsed:.2f}s, budget {self.seconds}s"

    return _Budget


@pytest.fixture(scope="session")
def gray_gallery():
    return gallery(6, (96, 96), seed=11)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("IQA_NO_PARALLEL", raising=False)
    return tmp_path
