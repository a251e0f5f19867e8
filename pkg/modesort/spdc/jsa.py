"""Joint spectral amplitude of the SPDC source."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from ..errors import DomainError
from ..field import C_NM_THZ, TimeFrequencyGrid, to_spectrum

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class JointSpectralAmplitude:
    """Amplitude sampled on signal/idler frequency offsets (THz).

    ``signal_index`` maps every signal row onto a bin of ``grid`` so that
    Schmidt vectors can be turned into time-domain envelopes.
    """

    grid: TimeFrequencyGrid
    signal_axis: np.ndarray
    idler_axis: np.ndarray
    amplitude: np.ndarray
    signal_index: np.ndarray
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        amplitude = np.array(self.amplitude, dtype=complex)
        if amplitude.shape != (len(self.signal_axis), len(self.idler_axis)):
            raise DomainError(
                f"amplitude shape {amplitude.shape} does not match axes "
                f"({len(self.signal_axis)}, {len(self.idler_axis)})"
            )
        norm = np.linalg.norm(amplitude)
        if not np.isfinite(norm) or norm == 0:
            raise DomainError("joint spectral amplitude must have a finite, non-zero norm")
        object.__setattr__(self, "amplitude", amplitude / norm)

    @classmethod
    def from_matrix(
        cls,
        grid: TimeFrequencyGrid,
        amplitude: np.ndarray,
        signal_axis: Optional[np.ndarray] = None,
        idler_axis: Optional[np.ndarray] = None,
    ) -> "JointSpectralAmplitude":
        """Wrap an explicit matrix whose signal rows sit on grid bins."""
        amplitude = np.asarray(amplitude)
        n_s, n_i = amplitude.shape
        if signal_axis is None:
            start = grid.n_samples // 2 - n_s // 2
            signal_axis = grid.f[start : start + n_s]
        signal_axis = np.asarray(signal_axis, dtype=float)
        if idler_axis is None:
            idler_axis = np.arange(n_i, dtype=float) * grid.df
        index = np.array([grid.index_of_frequency(f) for f in signal_axis])
        return cls(grid, signal_axis, np.asarray(idler_axis, dtype=float), amplitude, index)


def filter_bandwidth_thz(filter_bw_nm: float, wavelength_nm: float) -> float:
    return C_NM_THZ * filter_bw_nm / wavelength_nm**2


def super_gaussian_pulse(t: np.ndarray, width_ps: float, order: int) -> np.ndarray:
    """Amplitude whose intensity has FWHM ``width_ps``; order 1 is a Gaussian."""
    return np.exp(-0.5 * np.log(2.0) * np.abs(2.0 * t / width_ps) ** (2 * order))


def build_jsa(
    pump_width: float = 30.0,
    pump_sg_order: int = 4,
    filter_bw: float = 2.4,
    phasematch_bw: float = 2.0,
    *,
    grid: Optional[TimeFrequencyGrid] = None,
    signal_wavelength_nm: float = 1532.1,
    idler_margin_widths: float = 10.0,
) -> JointSpectralAmplitude:
    """Pump envelope (f_s + f_i) x phase matching (f_s - f_i) x square signal filter.

    ``phasematch_bw`` is the 1/sqrt(e) half width of the Gaussian phase
    matching in THz; ``np.inf`` switches phase matching off.
    """
    if min(pump_width, filter_bw, phasematch_bw) <= 0 or pump_sg_order < 1:
        raise DomainError("pump width, filter width and phase-matching bandwidth must be positive")
    grid = grid or TimeFrequencyGrid.default()
    nyquist = 0.5 * grid.n_samples * grid.df
    bandwidth = filter_bandwidth_thz(filter_bw, signal_wavelength_nm)
    if bandwidth >= nyquist:
        raise DomainError(f"{filter_bw} nm filter ({bandwidth:.3f} THz) is wider than the grid")

    f = grid.f
    signal_rows = np.nonzero(np.abs(f) <= 0.5 * bandwidth)[0]
    signal_axis = f[signal_rows]

    pump_spectrum = to_spectrum(super_gaussian_pulse(grid.t, pump_width, pump_sg_order), grid.dt)
    idler_reach = min(0.5 * bandwidth + idler_margin_widths / pump_width, nyquist - 0.5 * bandwidth - grid.df)
    idler_cols = np.nonzero(np.abs(f) <= idler_reach)[0]
    idler_axis = f[idler_cols]

    # f_s + f_i lands on the lattice: index arithmetic relative to the centre bin
    centre = grid.n_samples // 2
    sum_index = signal_rows[:, None] + idler_cols[None, :] - centre
    inside = (sum_index >= 0) & (sum_index < grid.n_samples)
    pump = np.where(inside, pump_spectrum[np.clip(sum_index, 0, grid.n_samples - 1)], 0.0)

    detuning = signal_axis[:, None] - idler_axis[None, :]
    phasematch = np.exp(-0.5 * (detuning / phasematch_bw) ** 2)

    params = {
        "pump_width_ps": pump_width,
        "pump_sg_order": pump_sg_order,
        "filter_bw_nm": filter_bw,
        "filter_bw_thz": bandwidth,
        "phasematch_bw_thz": phasematch_bw,
        "signal_wavelength_nm": signal_wavelength_nm,
    }
    logger.debug("JSA %dx%d built with %s", len(signal_axis), len(idler_axis), params)
    return JointSpectralAmplitude(grid, signal_axis, idler_axis, pump * phasematch, signal_rows, params)
