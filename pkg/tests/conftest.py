import os
import sys

import numpy as np
import pytest

from unmixio import SeedSpec, gen_ampmod, gen_oscillators, gen_var5
from unmixio.generators import STREAM_AMPMOD, STREAM_OSCILLATORS, STREAM_VAR5

sys.path.insert(0, os.path.dirname(__file__))

DEFAULT_SEED = 0

# criterion label -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def var5():
    return gen_var5(25600, SeedSpec(DEFAULT_SEED, STREAM_VAR5))


@pytest.fixture(scope="session")
def oscillators():
    return gen_oscillators(seed=SeedSpec(DEFAULT_SEED, STREAM_OSCILLATORS))


@pytest.fixture(scope="session")
def ampmod():
    return gen_ampmod(seed=SeedSpec(DEFAULT_SEED, STREAM_AMPMOD))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE_RESULTS):
        status, detail = ACCEPTANCE_RESULTS[label]
        terminalreporter.write_line(f"{status:4s} {label}: {detail}")
