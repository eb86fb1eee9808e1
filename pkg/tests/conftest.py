import importlib.util
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from ammosched.milp import SolverConfig  # noqa: E402
from ammosched.params import load_params  # noqa: E402
from ammosched.resources import LULL_CONFIG, LULL_SCENARIO, data_path  # noqa: E402
from ammosched.sched import read_scenario  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def _highs_available() -> bool:
    return importlib.util.find_spec("highspy") is not None


requires_highs = pytest.mark.skipif(not _highs_available(), reason="highspy not installed")


@pytest.fixture(scope="session")
def lull_scenario():
    return read_scenario(data_path(LULL_SCENARIO))


@pytest.fixture(scope="session")
def lull_params():
    return load_params(data_path(LULL_CONFIG))


@pytest.fixture(scope="session")
def highs():
    return SolverConfig(time_limit=300.0, mip_gap=1e-7)


@pytest.fixture(scope="session")
def highs_fast():
    """Looser gap for the 48-step comparisons, where only structure is checked."""
    return SolverConfig(time_limit=300.0, mip_gap=1e-4)


@pytest.fixture(scope="session")
def tiny():
    return SolverConfig(tiny=True)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
