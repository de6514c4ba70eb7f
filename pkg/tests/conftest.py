import numpy as np
import pytest

from spectralfactor.spectra import FrequencyGrid

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def grid4096():
    return FrequencyGrid(4096)


@pytest.fixture(scope="session")
def grid16():
    return FrequencyGrid(16)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        passed, line = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {key}: {line}")
