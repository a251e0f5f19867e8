"""Split-step Fourier solver for sum-frequency generation with an undepleted pump.

In the signal frame, with photon-flux normalised signal ``s`` and sum
frequency ``f`` and a classical pump ``p`` (sqrt(W)):

    ds/dz = D_s s - i kappa(z) conj(p) f
    df/dz = D_f f - i kappa(z) p s

The coupling sub-step is solved exactly at every time sample (a 2x2 unitary
rotation), the dispersive sub-steps exactly in the frequency domain, and the
two are combined by symmetric (Strang) splitting with the pump evaluated at
the step midpoint.
"""

import logging
import warnings
from typing import Optional, Tuple

import numpy as np
from numpy.fft import fft, fftfreq, ifft
from scipy.optimize import brentq

from ..errors import AccuracyWarning, ConservationError, ConvergenceError, DomainError, NumericError
from ..field import ComplexEnvelope, TimeFrequencyGrid, Units
from .waveguide import WaveguideSpec

logger = logging.getLogger(__name__)

MIN_STEPS = 100
MAX_WALKOFF_PER_STEP_PS = 0.5
EFFICIENCY_SLACK = 1e-6


class SplitStepPropagator:
    """Precomputed operators for one (grid, waveguide, step count) triple."""

    def __init__(self, grid: TimeFrequencyGrid, wg: WaveguideSpec, n_steps: int):
        if n_steps < 1:
            raise DomainError("n_steps must be positive")
        self.grid = grid
        self.wg = wg
        self.n_steps = int(n_steps)
        self.h = wg.length_mm / self.n_steps

        walk = max(abs(wg.sf_walkoff_ps_per_mm), abs(wg.pump_walkoff_ps_per_mm)) * self.h
        if self.n_steps < MIN_STEPS or walk > MAX_WALKOFF_PER_STEP_PS:
            warnings.warn(
                f"{self.n_steps} steps give {walk:.3f} ps walk-off per step; results may be inaccurate",
                AccuracyWarning,
                stacklevel=3,
            )

        w = 2.0 * np.pi * fftfreq(grid.n_samples, grid.dt)
        self._w = w
        signal_rate = 0.5j * wg.gvd_signal_ps2_per_mm * w**2
        sf_rate = 1j * (0.5 * wg.gvd_sf_ps2_per_mm * w**2 - wg.sf_walkoff_ps_per_mm * w - wg.delta_k0_per_mm)
        self._signal_half = np.exp(0.5 * self.h * signal_rate)
        self._signal_full = self._signal_half**2
        self._sf_half = np.exp(0.5 * self.h * sf_rate)
        self._sf_full = self._sf_half**2
        self._pump_rate = 1j * (0.5 * wg.gvd_pump_ps2_per_mm * w**2 - wg.pump_walkoff_ps_per_mm * w)

    def pump_at(self, pump_spectrum: np.ndarray, z: float) -> np.ndarray:
        return ifft(pump_spectrum * np.exp(self._pump_rate * z))

    def run(self, signal: np.ndarray, pump: np.ndarray, sf: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Propagate time-domain arrays of shape (..., N); returns (signal, sf)."""
        s_hat = fft(np.asarray(signal, dtype=complex), axis=-1)
        f_hat = np.zeros_like(s_hat) if sf is None else fft(np.asarray(sf, dtype=complex), axis=-1)
        pump = np.asarray(pump, dtype=complex)
        if not (np.all(np.isfinite(s_hat)) and np.all(np.isfinite(f_hat)) and np.all(np.isfinite(pump))):
            raise NumericError("non-finite input field")
        if not np.any(pump):
            # No coupling: only the linear operators act.
            return (
                ifft(s_hat * self._signal_full**self.n_steps, axis=-1),
                ifft(f_hat * self._sf_full**self.n_steps, axis=-1),
            )
        pump_hat = fft(pump)
        s_hat = s_hat * self._signal_half
        f_hat = f_hat * self._sf_half
        for k in range(self.n_steps):
            z_mid = (k + 0.5) * self.h
            p = self.pump_at(pump_hat, z_mid)
            magnitude = np.abs(p)
            theta = self.wg.coupling_at(z_mid) * magnitude * self.h
            phase = np.divide(p, magnitude, out=np.zeros_like(p), where=magnitude > 0)
            cos_t, sin_t = np.cos(theta), np.sin(theta)
            s = ifft(s_hat, axis=-1)
            f = ifft(f_hat, axis=-1)
            s, f = cos_t * s - 1j * np.conj(phase) * sin_t * f, -1j * phase * sin_t * s + cos_t * f
            last = k == self.n_steps - 1
            s_hat = fft(s, axis=-1) * (self._signal_half if last else self._signal_full)
            f_hat = fft(f, axis=-1) * (self._sf_half if last else self._sf_full)
        s_out = ifft(s_hat, axis=-1)
        f_out = ifft(f_hat, axis=-1)
        if not (np.all(np.isfinite(s_out)) and np.all(np.isfinite(f_out))):
            raise NumericError("non-finite field encountered during propagation")
        return s_out, f_out


def pump_samples(pump: ComplexEnvelope) -> np.ndarray:
    return pump.to_units(Units.CLASSICAL).samples


def propagate_sfg(
    signal: ComplexEnvelope,
    pump: ComplexEnvelope,
    wg: WaveguideSpec,
    n_steps: int = 1000,
) -> Tuple[ComplexEnvelope, ComplexEnvelope]:
    """Signal and sum-frequency envelopes after the waveguide.

    Outputs are in the signal's units; the SF carries the sum wavelength.
    """
    signal.grid.require_same(pump.grid)
    propagator = SplitStepPropagator(signal.grid, wg, n_steps)
    quantum = signal.to_units(Units.QUANTUM)
    s_out, f_out = propagator.run(quantum.samples, pump_samples(pump))
    signal_out = quantum.with_samples(s_out).to_units(signal.units)
    sf_out = ComplexEnvelope(signal.grid, f_out, wg.sf_wavelength_nm, Units.QUANTUM).to_units(signal.units)
    return signal_out, sf_out


def efficiency(signal_in: ComplexEnvelope, sf_out: ComplexEnvelope) -> float:
    """Photon-number conversion efficiency N_sf / N_sig.

    For classical envelopes this equals rho_sum * lambda_sum / (rho_sig * lambda_sig).
    """
    n_sig = signal_in.photon_number()
    if not n_sig > 0:
        raise DomainError("input signal carries no photons")
    eta = sf_out.photon_number() / n_sig
    if eta > 1.0 + EFFICIENCY_SLACK:
        raise ConservationError(f"conversion efficiency {eta:.9f} exceeds one")
    return float(eta)


def efficiency_from_powers(rho_sig: float, rho_sum: float, lambda_sig_nm: float, lambda_sum_nm: float) -> float:
    """Average-power form of the efficiency."""
    if not rho_sig > 0:
        raise DomainError("input signal power must be positive")
    return rho_sum * lambda_sum_nm / (rho_sig * lambda_sig_nm)


def batch_efficiencies(
    signals: np.ndarray,
    pump: np.ndarray,
    propagator: SplitStepPropagator,
) -> np.ndarray:
    """eta for each row of ``signals`` (quantum units) under one pump."""
    dt = propagator.grid.dt
    n_in = np.sum(np.abs(signals) ** 2, axis=-1) * dt
    _, f_out = propagator.run(signals, pump)
    eta = np.sum(np.abs(f_out) ** 2, axis=-1) * dt / n_in
    if np.any(eta > 1.0 + EFFICIENCY_SLACK):
        raise ConservationError(f"conversion efficiency {eta.max():.9f} exceeds one")
    return eta


def calibrate_kappa(
    wg: WaveguideSpec,
    target_eta: float = 0.936,
    peak_power_mw: float = 94.0,
    pump_duration_ps: float = 160.0,
    *,
    n_steps: int = 400,
    grid: Optional[TimeFrequencyGrid] = None,
) -> WaveguideSpec:
    """Fit kappa so a CW signal under a Gaussian pump of ``pump_duration_ps``
    (intensity FWHM) and ``peak_power_mw`` peaks at ``target_eta``."""
    if not 0 < target_eta < 1:
        raise DomainError("target efficiency must lie in (0, 1)")
    grid = grid or TimeFrequencyGrid(4096, 0.25)
    t = grid.t
    peak = np.sqrt(peak_power_mw * 1e-3)
    pump = peak * np.exp(-2.0 * np.log(2.0) * (t / pump_duration_ps) ** 2)
    signal = np.ones(grid.n_samples, dtype=complex)

    def peak_eta(kappa: float) -> float:
        trial = wg.with_kappa(kappa)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AccuracyWarning)
            _, f_out = SplitStepPropagator(grid, trial, n_steps).run(signal, pump)
        return float(np.max(np.abs(f_out) ** 2))

    kappa_full = 0.5 * np.pi / (wg.length_mm * peak)
    try:
        kappa = brentq(lambda k: peak_eta(k) - target_eta, 1e-9, kappa_full, xtol=1e-12)
    except ValueError as exc:
        raise ConvergenceError(f"no coupling constant reaches peak efficiency {target_eta}") from exc
    logger.info("calibrated kappa = %.6g /(mm sqrt(W)) for peak eta %.3f", kappa, target_eta)
    return wg.with_kappa(kappa)
