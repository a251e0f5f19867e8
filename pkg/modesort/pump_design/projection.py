import logging
from dataclasses import dataclass

import numpy as np

from ..comb import DEFAULT_N_LINES, DEFAULT_SPACING_GHZ, CombSpec
from ..errors import DomainError, ProjectionLossError
from ..field import ComplexEnvelope, Units

logger = logging.getLogger(__name__)

MAX_DISCARDED_FRACTION = 0.10


@dataclass(frozen=True)
class CombProjection:
    comb: CombSpec
    discarded_fraction: float


def line_coefficients(
    pump: ComplexEnvelope,
    spacing_ghz: float = DEFAULT_SPACING_GHZ,
    n_lines: int = DEFAULT_N_LINES,
) -> np.ndarray:
    """Fourier-series coefficients (sqrt(mW)) of the pump over one comb period.

    c_m = (1/T) * sum over [-T/2, T/2) of p(t) exp(-i 2 pi m spacing t) dt
    """
    if n_lines < 1 or n_lines % 2 == 0:
        raise DomainError(f"n_lines must be odd and positive, got {n_lines}")
    grid = pump.grid
    period = 1e3 / spacing_ghz
    gate = grid.period_mask(period)
    t = grid.t[gate]
    samples = pump.to_units(Units.CLASSICAL).samples[gate] * np.sqrt(1e3)
    half = n_lines // 2
    offsets = np.arange(-half, half + 1) * spacing_ghz * 1e-3
    kernel = np.exp(-2j * np.pi * np.multiply.outer(offsets, t))
    return kernel @ samples * grid.dt / period


def project_to_comb(
    pump: ComplexEnvelope,
    spacing: float = DEFAULT_SPACING_GHZ,
    n_lines: int = DEFAULT_N_LINES,
    *,
    max_discarded: float = MAX_DISCARDED_FRACTION,
) -> CombProjection:
    """Closest ``n_lines``-line comb to ``pump`` and the energy fraction it loses.

    The pump is read over one period around t = 0; energy outside that period
    or outside the comb lines counts as discarded.
    """
    classical = pump.to_units(Units.CLASSICAL)
    energy = classical.energy_pj()
    if not energy > 0:
        raise DomainError("cannot project a vacuum pump")
    coefficients = line_coefficients(classical, spacing, n_lines)
    period = 1e3 / spacing
    kept = period * np.sum(np.abs(coefficients) ** 2) * 1e-3
    discarded = float(min(max(1.0 - kept / energy, 0.0), 1.0))
    if discarded > max_discarded:
        raise ProjectionLossError(
            f"{n_lines}-line comb at {spacing} GHz keeps only {100 * (1 - discarded):.1f}% of the pump energy"
        )
    comb = CombSpec.from_complex(coefficients, pump.wavelength_nm, spacing)
    logger.debug("projected pump onto %d lines, discarded fraction %.3e", n_lines, discarded)
    return CombProjection(comb, discarded)
