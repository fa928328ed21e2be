import numpy as np
import pytest

from vacuum_eos.config import packaged_config
from vacuum_eos.optics import TWO_PI, CrystalParams, DispersionModel


@pytest.fixture(scope="session")
def cfg300():
    return packaged_config("thermal_300k")


@pytest.fixture(scope="session")
def cfg4():
    return packaged_config("vacuum_4k")


@pytest.fixture(scope="session")
def model300(cfg300):
    return cfg300.material_model()


@pytest.fixture(scope="session")
def params(cfg300):
    return cfg300.crystal.params()


@pytest.fixture
def toy_model():
    """A ZnTe-like oscillator with textbook-sized damping, independent of the shipped defaults."""
    return DispersionModel(
        eps_inf=7.4,
        phonon_freq_to=TWO_PI * 5.3e12,
        oscillator_strength=2.7,
        damping_10k=TWO_PI * 0.02e12,
        damping_300k=TWO_PI * 0.09e12,
        temperature=300.0,
    )


@pytest.fixture
def thz():
    return TWO_PI * np.linspace(0.1e12, 4e12, 40)


@pytest.fixture
def plain_params():
    return CrystalParams()


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
