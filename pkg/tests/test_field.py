import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from modesort.errors import DomainError, GridMismatchError
from modesort.field import (
    ComplexEnvelope,
    TimeFrequencyGrid,
    Units,
    apply_delay,
    apply_spectral_phase,
    check_guard_band,
    inner_product,
)

SMALL = TimeFrequencyGrid(256, 0.1)

complex_scalars = st.builds(
    complex,
    st.floats(-10, 10, allow_nan=False, allow_infinity=False),
    st.floats(-10, 10, allow_nan=False, allow_infinity=False),
)


def _random(grid, seed):
    rng = np.random.default_rng(seed)
    return ComplexEnvelope(grid, rng.normal(size=grid.n_samples) + 1j * rng.normal(size=grid.n_samples), 1532.1)


def rms_width(grid, intensity):
    weights = intensity / intensity.sum()
    mean = np.sum(weights * grid.t)
    return float(np.sqrt(np.sum(weights * (grid.t - mean) ** 2)))


def test_grid_rejects_non_power_of_two():
    with pytest.raises(DomainError):
        TimeFrequencyGrid(1000, 0.1)
    with pytest.raises(DomainError):
        TimeFrequencyGrid(1024, 0.0)


def test_grid_time_frequency_product(grid):
    assert grid.n_samples * grid.dt * grid.df == pytest.approx(1.0, rel=1e-15)
    assert grid.window == pytest.approx(200.0)
    assert grid.t[grid.n_samples // 2] == 0.0
    assert grid.f[grid.n_samples // 2] == 0.0


def test_period_mask_keeps_one_comb_period(grid):
    assert np.count_nonzero(grid.period_mask(50.0)) == 1024


def test_frequency_round_trip(grid, random_envelope):
    e = random_envelope(grid)
    back = ComplexEnvelope.from_spectrum(grid, e.to_frequency(), e.wavelength_nm)
    assert np.max(np.abs(back.samples - e.samples)) <= 1e-12 * np.max(np.abs(e.samples))


def test_parseval(grid, random_envelope):
    e = random_envelope(grid, seed=3)
    spectral = np.sum(np.abs(e.to_frequency()) ** 2) * grid.df
    assert spectral == pytest.approx(e.norm2(), rel=1e-12)


def test_inner_product_of_normalized_envelope_is_one(grid, gaussian):
    e = gaussian(grid, 2.0)
    assert inner_product(e, e) == pytest.approx(1.0 + 0j, abs=1e-12)


def test_inner_product_is_conjugate_symmetric(grid, random_envelope):
    a, b = random_envelope(grid, 1), random_envelope(grid, 2)
    assert inner_product(a, b) == pytest.approx(np.conj(inner_product(b, a)), abs=1e-14)


def test_inner_product_rejects_other_grid(grid, small_grid, gaussian):
    with pytest.raises(GridMismatchError):
        inner_product(gaussian(grid), gaussian(small_grid))


@settings(max_examples=30, deadline=None)
@given(alpha=complex_scalars, beta=complex_scalars, seed=st.integers(0, 2**16))
def test_inner_product_is_sesquilinear(alpha, beta, seed):
    a, b, c = _random(SMALL, seed), _random(SMALL, seed + 1), _random(SMALL, seed + 2)
    combined = b.with_samples(alpha * b.samples + beta * c.samples)
    expected = alpha * inner_product(a, b) + beta * inner_product(a, c)
    assert inner_product(a, combined) == pytest.approx(expected, rel=1e-9, abs=1e-9)
    left = a.with_samples(alpha * a.samples)
    assert inner_product(left, b) == pytest.approx(np.conj(alpha) * inner_product(a, b), rel=1e-9, abs=1e-9)


def test_zero_delay_is_identity(grid, gaussian):
    e = gaussian(grid)
    assert apply_delay(e, 0.0) is e


def test_delay_moves_gaussian_peak(grid, gaussian):
    shifted = apply_delay(gaussian(grid, 1.0), 1.3)
    assert abs(shifted.peak_time() - 1.3) <= grid.dt / 10


@settings(max_examples=25, deadline=None)
@given(tau=st.floats(-6.0, 6.0, allow_nan=False), seed=st.integers(0, 2**16))
def test_delay_is_unitary_and_invertible(tau, seed):
    e = _random(SMALL, seed).normalized()
    shifted = apply_delay(e, tau)
    assert shifted.norm2() == pytest.approx(e.norm2(), abs=1e-12)
    back = apply_delay(shifted, -tau)
    assert np.max(np.abs(back.samples - e.samples)) <= 1e-12 * np.max(np.abs(e.samples)) + 1e-14


def test_delay_beyond_quarter_window_is_rejected(grid, gaussian):
    with pytest.raises(DomainError):
        apply_delay(gaussian(grid), 60.0)


def test_spectral_phase_zero_and_pi(grid, random_envelope):
    e = random_envelope(grid, 5)
    same = apply_spectral_phase(e, lambda f: np.zeros_like(f))
    assert_allclose(same.samples, e.samples, atol=1e-12)
    flipped = apply_spectral_phase(e, lambda f: np.pi)
    assert_allclose(flipped.samples, -e.samples, atol=1e-12)


def test_quadratic_spectral_phase_broadens_like_chirped_gaussian(grid, gaussian):
    phi2 = 10.0
    pulse = gaussian(grid, 1.0)
    chirped = apply_spectral_phase(pulse, lambda f: 0.5 * phi2 * (2.0 * np.pi * f) ** 2)
    # amplitude exp(-t^2 / 2 T0^2) -> intensity RMS width T0 sqrt(1 + (phi2 / T0^2)^2) / sqrt(2)
    expected = np.sqrt(1.0 + phi2**2) / np.sqrt(2.0)
    assert rms_width(grid, chirped.intensity()) == pytest.approx(expected, rel=0.01)
    assert chirped.norm2() == pytest.approx(pulse.norm2(), rel=1e-12)


def test_unit_conversion_keeps_photon_number(grid, gaussian):
    quantum = gaussian(grid, 3.0).scaled(np.sqrt(250.0))
    classical = quantum.to_units(Units.CLASSICAL)
    assert classical.units is Units.CLASSICAL
    assert classical.photon_number() == pytest.approx(quantum.photon_number(), rel=1e-12)
    assert_allclose(classical.to_units(Units.QUANTUM).samples, quantum.samples, rtol=1e-12)


def test_average_power_of_classical_envelope(grid):
    samples = np.where(grid.period_mask(50.0), np.sqrt(0.1), 0.0)
    pump = ComplexEnvelope(grid, samples, 1556.6, Units.CLASSICAL)
    assert pump.average_power_mw(50.0) == pytest.approx(100.0, rel=1e-12)


def test_guard_band(grid, gaussian):
    assert check_guard_band(gaussian(grid, 5.0))
    flat = ComplexEnvelope(grid, np.ones(grid.n_samples), 1532.1)
    assert not check_guard_band(flat)


def test_grid_dict_round_trip(grid):
    assert TimeFrequencyGrid.from_dict(grid.to_dict()) == grid
