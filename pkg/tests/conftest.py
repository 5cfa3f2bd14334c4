import numpy as np
import pytest

from noq.optimizer import OptimizerConfig

# lighter search for unit tests; acceptance runs set their own effort
FAST = OptimizerConfig(restarts=2, refine_cells=2, qubit_grid_resolution=32)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
