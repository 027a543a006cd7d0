import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from orbifoldkit.qote import validate  # noqa: E402
from orbifoldkit.torus import AffineEndo, RotationGroup  # noqa: E402

settings.register_profile("exact", deadline=None, max_examples=80)
settings.load_profile("exact")

TWO = ((2, 0), (0, 2))


@pytest.fixture
def base_pair():
    return validate(RotationGroup(2), AffineEndo(TWO))


@pytest.fixture
def qf_pair():
    F = AffineEndo(TWO)
    return validate(RotationGroup(2), F, F)


def doubling(n, Q=None):
    F = AffineEndo(TWO)
    return validate(RotationGroup(n), F, Q)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
