from __future__ import annotations

import numpy as np
import pytest

from oscsim.model import build_system


@pytest.fixture
def two_body():
    return build_system("two-body")


@pytest.fixture(params=[("impl1-chain", 2), ("impl1-chain", 4), ("impl2-chain", 2), ("impl2-chain", 4)],
                ids=lambda p: f"{p[0]}-N{p[1]}")
def small_preset(request):
    return build_system(*request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_configure(config):
    config._criteria = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(n, name, ok, detail)``; asserts ``ok``."""
    def record(n: int, name: str, ok: bool, detail: str = ""):
        line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
        request.config._criteria.append((n, line))
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_criteria", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
