import numpy as np
import pytest

from rankdyn.panel import Panel

# Pass/fail lines from tests/test_acceptance.py, printed at the end of the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_panel(rng: np.random.Generator, n: int, t: int, vol: float = 0.1, frequency: int = 12) -> Panel:
    """Log-normal random walk levels with a random per-entity scale."""
    steps = rng.normal(0.0, vol, size=(t, n))
    logx = np.cumsum(steps, axis=0) + rng.normal(0.0, 1.0, size=n)
    return Panel([f"e{i}" for i in range(n)], [str(j) for j in range(t)], np.exp(logx), frequency)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
