import numpy as np
import pytest

from spdcmodes.materials import ktp_source
from spdcmodes.sweep import PRESETS, grid_sweep

DESK_STEP = PRESETS["desk"]["log_xi_step"]
TYPE0_PHIS = np.round(np.arange(-1.125, 2.3751, 0.25), 4)

# acceptance lines collected during the run, printed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def type2_sweep():
    return grid_sweep(ktp_source("type2", 0.04), (-2.0, 1.0, DESK_STEP))


@pytest.fixture(scope="session")
def apodized_sweep():
    return grid_sweep(ktp_source("type2", 0.04, poling="gaussian"), (-2.2, 0.8, DESK_STEP))


@pytest.fixture(scope="session")
def type0_sweep():
    return grid_sweep(ktp_source("type0", 0.005), (-2.0, 1.0, DESK_STEP), TYPE0_PHIS)
