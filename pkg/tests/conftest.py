import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("gs", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("gs")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance")
        for n in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[n])
