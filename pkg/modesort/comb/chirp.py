"""Pairwise-beat chirp measurement and correction.

Two comb lines selected on the waveshaper beat on a photodiode; the beat
sinusoid's shift against a reference sinusoid gives the phase difference of
the pair, because a delay in time is a linear phase across frequency.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ..errors import DomainError
from ..field import ComplexEnvelope, to_samples
from .spec import CombSpec, wrap_phase

logger = logging.getLogger(__name__)

REFERENCE_PAIR = (-8, -7)
BEAT_SAMPLES = 256


def _wrap_delay(delay: float, period: float) -> float:
    """Map onto (-period/2, period/2]."""
    return float(delay - period * np.ceil(delay / period - 0.5))


def beat_phase(comb: CombSpec, i: int, j: int) -> float:
    """Phase of the beat tone between lines i and j, read from the intensity trace."""
    if i == j:
        raise DomainError("a beat needs two different lines")
    pi, pj = comb.position(i), comb.position(j)
    beat_period = comb.period_ps / abs(j - i)
    t = np.arange(BEAT_SAMPLES) * beat_period / BEAT_SAMPLES
    two_lines = np.zeros(comb.n_lines, dtype=complex)
    two_lines[[pi, pj]] = comb.coefficients[[pi, pj]]
    pair = CombSpec.from_complex(two_lines, comb.center_wavelength_nm, comb.spacing_ghz)
    trace = np.abs(pair.field_at(t)) ** 2
    tone = np.sum(trace * np.exp(-2j * np.pi * np.sign(j - i) * t / beat_period))
    if tone == 0:
        raise DomainError(f"lines {i} and {j} do not produce a beat (dark line)")
    return float(np.angle(tone))


def beat_delay(comb: CombSpec, i: int, j: int, reference_delay: float = 0.0) -> float:
    """Shift (ps) of the i/j beat against the reference sinusoid.

    For adjacent lines the shift is (phi_j - phi_i) / (2 pi spacing), wrapped
    into half a beat period on either side.
    """
    psi = beat_phase(comb, i, j)
    spacing_thz = comb.spacing_ghz * 1e-3
    shift = psi / (2.0 * np.pi * spacing_thz * (j - i))
    return _wrap_delay(shift - reference_delay, comb.period_ps / abs(j - i))


def apply_phase_corrections(comb: CombSpec, corrections: np.ndarray) -> CombSpec:
    return comb.with_phases(comb.phases + np.asarray(corrections, dtype=float))


def chirp_correct(
    comb: CombSpec,
    *,
    reference: Tuple[int, int] = REFERENCE_PAIR,
    flatten_reference: bool = False,
) -> Tuple[np.ndarray, CombSpec]:
    """Per-line phase corrections that make every adjacent beat coincide
    with the reference pair's beat.

    Corrections build up line by line from the lowest line, each step
    assuming the true adjacent phase step is within (-pi, pi]. With
    ``flatten_reference`` the reference pair's own shift is removed too,
    leaving a flat phase profile instead of a pure time shift.
    """
    if comb.n_lines < 2:
        raise DomainError("chirp correction needs at least two lines")
    i_ref, j_ref = reference
    if abs(j_ref - i_ref) != 1:
        raise DomainError("the reference pair must be adjacent lines")
    half = comb.n_lines // 2
    if min(reference) < -half or max(reference) > half:
        # short combs fall back to their first two lines
        reference = (-half, -half + 1)
        i_ref, j_ref = reference
    spacing_thz = comb.spacing_ghz * 1e-3
    reference_delay = 0.0 if flatten_reference else beat_delay(comb, i_ref, j_ref)
    target_step = 2.0 * np.pi * spacing_thz * reference_delay

    corrections = np.zeros(comb.n_lines)
    for m in comb.indices[:-1]:
        measured = 2.0 * np.pi * spacing_thz * beat_delay(comb, m, m + 1)
        p = comb.position(m)
        corrections[p + 1] = corrections[p] + wrap_phase(target_step - measured)
    corrections = wrap_phase(corrections)
    corrected = apply_phase_corrections(comb, corrections)
    logger.debug(
        "chirp correction against lines %s: max |correction| %.4f rad", reference, np.abs(corrections).max()
    )
    return corrections, corrected


def unwrapped_phases(comb: CombSpec) -> np.ndarray:
    """Line phases made continuous by accumulating wrapped adjacent steps."""
    steps = wrap_phase(np.diff(comb.phases))
    return comb.phases[0] + np.concatenate([[0.0], np.cumsum(steps)])


def residual_nonlinear_phase(comb: CombSpec) -> float:
    """Largest deviation of the line phases from their least-squares linear fit."""
    phases = unwrapped_phases(comb)
    m = comb.indices.astype(float)
    weights = comb.amplitudes > 0
    if np.count_nonzero(weights) < 3:
        return 0.0
    slope, offset = np.polyfit(m[weights], phases[weights], 1)
    residual = phases[weights] - (slope * m[weights] + offset)
    return float(np.max(np.abs(residual)))


def emulate_shaping(
    envelope: ComplexEnvelope,
    spacing_ghz: float = 20.0,
    *,
    amplitude_error: float = 0.02,
    phase_error: float = 0.05,
    rng: Optional[np.random.Generator] = None,
) -> ComplexEnvelope:
    """Envelope as produced by an imperfect line-by-line shaper.

    Every 20-GHz line slot of the spectrum receives an independent relative
    amplitude error and phase error (Gaussian standard deviations).
    """
    if amplitude_error < 0 or phase_error < 0:
        raise DomainError("shaping errors must be non-negative")
    rng = rng or np.random.default_rng()
    grid = envelope.grid
    line = np.rint(grid.f / (spacing_ghz * 1e-3)).astype(int)
    slots, inverse = np.unique(line, return_inverse=True)
    gain = 1.0 + amplitude_error * rng.standard_normal(slots.size)
    phase = phase_error * rng.standard_normal(slots.size)
    transfer = np.clip(gain, 0.0, None)[inverse] * np.exp(1j * phase[inverse])
    return envelope.with_samples(to_samples(envelope.to_frequency() * transfer, grid.dt))
