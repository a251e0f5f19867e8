"""Complex field envelopes on a TimeFrequencyGrid.

Samples carry either classical units (sqrt(W)) or photon-flux units
(sqrt(photons/ps)); ``to_units`` converts between them at the envelope's
carrier wavelength.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

import numpy as np
from numpy.fft import fft, fftshift, ifft, ifftshift
from scipy import constants

from ..errors import DomainError, GridMismatchError, NumericError
from .grid import TimeFrequencyGrid

C_NM_THZ = constants.c * 1e-3  # nm * THz
PHOTON_ENERGY_J_NM = constants.h * constants.c * 1e9  # h c in J * nm


class Units(str, Enum):
    CLASSICAL = "sqrt_W"
    QUANTUM = "sqrt_photons_per_ps"


def to_spectrum(samples: np.ndarray, dt: float) -> np.ndarray:
    """Forward transform along the last axis, exp(-i 2 pi f t), centred."""
    return dt * fftshift(fft(ifftshift(samples, axes=-1), axis=-1), axes=-1)


def to_samples(spectrum: np.ndarray, dt: float) -> np.ndarray:
    return fftshift(ifft(ifftshift(spectrum, axes=-1), axis=-1), axes=-1) / dt


def sum_frequency_wavelength(signal_nm: float, pump_nm: float) -> float:
    return 1.0 / (1.0 / signal_nm + 1.0 / pump_nm)


@dataclass(frozen=True, eq=False)
class ComplexEnvelope:
    grid: TimeFrequencyGrid
    samples: np.ndarray
    wavelength_nm: float
    units: Units = Units.QUANTUM

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex)
        if samples.shape != (self.grid.n_samples,):
            raise GridMismatchError(
                f"expected {self.grid.n_samples} samples, got shape {samples.shape}"
            )
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "units", Units(self.units))

    @classmethod
    def from_spectrum(cls, grid, spectrum, wavelength_nm, units=Units.QUANTUM) -> "ComplexEnvelope":
        return cls(grid, to_samples(np.asarray(spectrum, dtype=complex), grid.dt), wavelength_nm, units)

    @classmethod
    def vacuum(cls, grid, wavelength_nm, units=Units.QUANTUM) -> "ComplexEnvelope":
        return cls(grid, np.zeros(grid.n_samples, dtype=complex), wavelength_nm, units)

    def to_frequency(self) -> np.ndarray:
        return to_spectrum(self.samples, self.grid.dt)

    def with_samples(self, samples: np.ndarray) -> "ComplexEnvelope":
        return replace(self, samples=samples)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.grid.dt)

    def normalized(self) -> "ComplexEnvelope":
        n2 = self.norm2()
        if not n2 > 0:
            raise DomainError("cannot normalize a vacuum envelope")
        return self.with_samples(self.samples / np.sqrt(n2))

    def scaled(self, factor: complex) -> "ComplexEnvelope":
        return self.with_samples(self.samples * factor)

    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def energy_pj(self) -> float:
        """Pulse energy for classical envelopes (W * ps = pJ)."""
        if self.units is not Units.CLASSICAL:
            return self.to_units(Units.CLASSICAL).energy_pj()
        return self.norm2()

    def average_power_mw(self, period_ps: float) -> float:
        return 1e3 * self.energy_pj() / period_ps

    def photon_number(self) -> float:
        if self.units is Units.QUANTUM:
            return self.norm2()
        return self.norm2() * 1e-12 * self.wavelength_nm / PHOTON_ENERGY_J_NM

    def unit_scale(self, units: Units) -> float:
        """Amplitude factor converting these samples into ``units``."""
        units = Units(units)
        if units is self.units:
            return 1.0
        photons_per_pj = 1e-12 * self.wavelength_nm / PHOTON_ENERGY_J_NM
        if units is Units.QUANTUM:
            return float(np.sqrt(photons_per_pj))
        return float(1.0 / np.sqrt(photons_per_pj))

    def to_units(self, units: Units) -> "ComplexEnvelope":
        units = Units(units)
        return replace(self, samples=self.samples * self.unit_scale(units), units=units)

    def peak_time(self) -> float:
        """Intensity peak location refined by quadratic interpolation."""
        intensity = self.intensity()
        i = int(np.argmax(intensity))
        n = self.grid.n_samples
        y0, y1, y2 = intensity[(i - 1) % n], intensity[i], intensity[(i + 1) % n]
        denom = y0 - 2.0 * y1 + y2
        offset = 0.0 if denom == 0 else 0.5 * (y0 - y2) / denom
        return float(self.grid.t[i] + offset * self.grid.dt)


def _require_same_grid(a: ComplexEnvelope, b: ComplexEnvelope) -> None:
    if not a.grid.compatible(b.grid):
        raise GridMismatchError("envelopes live on different grids")


def inner_product(a: ComplexEnvelope, b: ComplexEnvelope) -> complex:
    """<a, b> = sum(conj(a) * b) * dt; conjugate-linear in the first argument."""
    _require_same_grid(a, b)
    return complex(np.vdot(a.samples, b.samples) * a.grid.dt)


def apply_spectral_phase(e: ComplexEnvelope, phase: Callable[[np.ndarray], np.ndarray]) -> ComplexEnvelope:
    """Multiply the spectrum by exp(i * phase(f)), f being the offset in THz."""
    values = np.asarray(phase(e.grid.f), dtype=float)
    if values.shape == ():
        values = np.full(e.grid.n_samples, float(values))
    if not np.all(np.isfinite(values)):
        raise NumericError("spectral phase is not finite on the grid")
    return e.with_samples(to_samples(e.to_frequency() * np.exp(1j * values), e.grid.dt))


def apply_delay(e: ComplexEnvelope, tau: float) -> ComplexEnvelope:
    """Delay by ``tau`` ps through the linear spectral phase exp(-i 2 pi f tau)."""
    if abs(tau) >= e.grid.window / 4:
        raise DomainError(f"delay {tau} ps is beyond a quarter of the {e.grid.window} ps window")
    if tau == 0:
        return e
    return apply_spectral_phase(e, lambda f: -2.0 * np.pi * f * tau)


def check_guard_band(e: ComplexEnvelope, guard_db: float = 10.0, edge_fraction: float = 0.1) -> bool:
    """True when the outer ``edge_fraction`` of the window on each side stays
    ``guard_db`` below the intensity peak."""
    intensity = e.intensity()
    peak = intensity.max()
    if peak == 0:
        return True
    n_edge = max(1, int(edge_fraction * e.grid.n_samples))
    edges = np.concatenate([intensity[:n_edge], intensity[-n_edge:]])
    return bool(edges.max() <= peak * 10 ** (-guard_db / 10))
