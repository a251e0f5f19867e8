import numpy as np
import pytest

from modesort.field import ComplexEnvelope, TimeFrequencyGrid, Units
from modesort.propagation import WaveguideSpec
from modesort.spdc import all_signals, build_jsa, schmidt_decompose


@pytest.fixture(scope="session")
def grid():
    return TimeFrequencyGrid.default()


@pytest.fixture(scope="session")
def small_grid():
    return TimeFrequencyGrid(256, 0.1)


@pytest.fixture(scope="session")
def schmidt_modes(grid):
    return schmidt_decompose(build_jsa(grid=grid), 4)


@pytest.fixture(scope="session")
def signals(schmidt_modes):
    """S1..S6."""
    return all_signals(schmidt_modes)


@pytest.fixture
def waveguide():
    return WaveguideSpec()


@pytest.fixture
def flat_waveguide():
    """No walk-off and no dispersion: every time sample converts on its own."""
    return WaveguideSpec(
        pump_walkoff_ps_per_mm=0.0,
        sf_walkoff_ps_per_mm=0.0,
        gvd_signal_ps2_per_mm=0.0,
        gvd_pump_ps2_per_mm=0.0,
        gvd_sf_ps2_per_mm=0.0,
    )


@pytest.fixture
def gaussian():
    def make(grid, width_ps=1.0, center_ps=0.0, wavelength_nm=1532.1, units=Units.QUANTUM):
        samples = np.exp(-0.5 * ((grid.t - center_ps) / width_ps) ** 2)
        return ComplexEnvelope(grid, samples, wavelength_nm, units).normalized()

    return make


@pytest.fixture
def random_envelope():
    def make(grid, seed=0):
        rng = np.random.default_rng(seed)
        samples = rng.normal(size=grid.n_samples) + 1j * rng.normal(size=grid.n_samples)
        return ComplexEnvelope(grid, samples, 1532.1).normalized()

    return make
