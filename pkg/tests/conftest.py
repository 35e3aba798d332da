import sys

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None:
        return
    terminalreporter.section("acceptance")
    for k in range(1, 13):
        terminalreporter.write_line(mod.RESULTS.get(k, f"[ACCEPT {k:2d}] FAIL  (not run or raised before reporting)"))
