import sys

import pytest

from satlae.config import ScenarioConfig


@pytest.fixture
def cfg():
    return ScenarioConfig()


@pytest.fixture
def short_cfg():
    """Default scenario cut to a few slots, for fast pipeline checks."""
    return ScenarioConfig(horizon_slots=12)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.VERDICTS):
        terminalreporter.write_line(mod.VERDICTS[n])
