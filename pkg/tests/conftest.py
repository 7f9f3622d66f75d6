import numpy as np
import pytest

ACCEPTANCE_LINES = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance criteria")


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


@pytest.fixture
def record_criterion():
    """Collect one pass/fail line per acceptance criterion for the terminal summary."""
    def rec(number: int, title: str, ok: bool, detail: str = ""):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return rec


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
