import math
import sys

import pytest

from circlerenorm.circle_maps import arnold
from circlerenorm.tongues import tongue_point

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SILVER = math.sqrt(2.0) - 1.0


@pytest.fixture(scope="session")
def critical_golden():
    """Arnold map at b = 1 on the golden-mean tongue."""
    return arnold(tongue_point("golden", 1.0, 1e-13), 1.0)


@pytest.fixture(scope="session")
def golden_tongue_a():
    return lambda b: tongue_point("golden", b, 1e-13)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
