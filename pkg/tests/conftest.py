import sys
from pathlib import Path

import pytest

from colscan import kernels

TESTS_DIR = Path(__file__).parent
sys.path.insert(0, str(TESTS_DIR))

SCENARIOS = Path(__file__).parent.parent / "scenarios"


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # one-time JIT compile must not pollute any timed assertion
    kernels.warmup()


@pytest.fixture(scope="session")
def scenarios_dir() -> Path:
    return SCENARIOS


@pytest.fixture()
def center_world():
    from colscan.world import load_scenario

    world, start, params = load_scenario(SCENARIOS / "center.json")
    return world, start, params


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    rows = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call":
                continue
            if "test_acceptance" in rep.nodeid:
                name = rep.nodeid.split("::")[-1]
                rows.append((name, outcome == "passed"))
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, ok in sorted(rows):
            terminalreporter.write_line(("PASS  " if ok else "FAIL  ") + name)
