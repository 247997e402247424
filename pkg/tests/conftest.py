import json
import os

import pytest

from secsplit.core import SecularParams

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture
def p_ref():
    return SecularParams.normalized(1.0, 0.3)


@pytest.fixture(scope="session")
def oracles():
    with open(os.path.join(DATA, "oracles.json")) as fh:
        return json.load(fh)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
