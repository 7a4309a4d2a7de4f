import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_LOG_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LOG_KEY] = []


@pytest.fixture
def acceptance_log(request):
    """Append (criterion, CheckResult) pairs; they are summarized at the end of the run."""
    return request.config.stash[_LOG_KEY]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LOG_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, result in sorted(lines, key=lambda t: t[0]):
        terminalreporter.write_line(f"criterion {number:2d}: {result.line()}")
