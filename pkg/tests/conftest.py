import re

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "hermcurv", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("hermcurv")

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_outcomes: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = _CRITERION.match(item.name)
    if m is None:
        return
    key = (int(m.group(1)), m.group(2).replace("_", " "))
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _outcomes[key] = "PASS" if rep.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), status in sorted(_outcomes.items()):
        terminalreporter.write_line(f"criterion {num:2d} {status}  {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
