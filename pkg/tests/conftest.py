import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from switchgame.core import SwitchGame

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def random_game(rng, m, n, kind="positive", lo=0, hi=4):
    """Integer payoffs with a nonconstant A; ``kind`` picks the cost structure."""
    while True:
        A = rng.integers(lo, hi + 1, size=(m, n)).astype(float)
        if np.ptp(A) > 0:
            break
    if kind == "uniform":
        S = np.ones((n, n)) - np.eye(n)
    elif kind == "symmetric":
        S = rng.integers(1, 4, size=(n, n)).astype(float)
        S = np.triu(S, 1)
        S = S + S.T
    elif kind == "free":
        S = rng.integers(0, 3, size=(n, n)).astype(float)
        np.fill_diagonal(S, 0.0)
    else:
        S = rng.integers(1, 4, size=(n, n)).astype(float)
        np.fill_diagonal(S, 0.0)
    return SwitchGame(A, S)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance report -------------------------------------------------------------

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = "PASS" if rep.outcome == "passed" else "FAIL"
        prev = _CRITERIA.get(num)
        if prev is None or prev[1] == "PASS":
            _CRITERIA[num] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, status = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {title}")
