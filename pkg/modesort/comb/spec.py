"""Line-by-line description of an electro-optic frequency comb.

Line amplitudes are in sqrt(mW) so that the average power of the pulse
train is the sum of squared amplitudes. Line ``m`` sits at
``m * spacing`` from the carrier; a component at offset ``f`` evolves as
``exp(+i 2 pi f t)``, matching the forward transform of ``modesort.field``.
"""

import logging
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Sequence

import numpy as np

from ..errors import DomainError
from ..field import C_NM_THZ, ComplexEnvelope, TimeFrequencyGrid, Units

logger = logging.getLogger(__name__)

DEFAULT_SPACING_GHZ = 20.0
DEFAULT_N_LINES = 17


def wrap_phase(phase):
    """Map radians onto (-pi, pi]."""
    phase = np.asarray(phase, dtype=float)
    return phase - 2.0 * np.pi * np.ceil(phase / (2.0 * np.pi) - 0.5)


@dataclass(frozen=True, eq=False)
class CombSpec:
    center_wavelength_nm: float
    spacing_ghz: float
    amplitudes: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=float)
        phases = np.array(self.phases, dtype=float)
        if amplitudes.ndim != 1 or amplitudes.shape != phases.shape:
            raise DomainError("amplitudes and phases must be equal-length vectors")
        if amplitudes.size % 2 == 0:
            raise DomainError(f"a comb needs an odd number of lines, got {amplitudes.size}")
        if np.any(amplitudes < 0) or not np.all(np.isfinite(amplitudes)):
            raise DomainError("line amplitudes must be finite and non-negative")
        if not self.spacing_ghz > 0:
            raise DomainError("line spacing must be positive")
        phases = wrap_phase(phases)
        amplitudes.flags.writeable = False
        phases.flags.writeable = False
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "phases", phases)

    @classmethod
    def from_complex(
        cls,
        coefficients: Sequence[complex],
        center_wavelength_nm: float,
        spacing_ghz: float = DEFAULT_SPACING_GHZ,
    ) -> "CombSpec":
        coefficients = np.asarray(coefficients, dtype=complex)
        return cls(center_wavelength_nm, spacing_ghz, np.abs(coefficients), np.angle(coefficients))

    @property
    def n_lines(self) -> int:
        return int(self.amplitudes.size)

    @property
    def indices(self) -> np.ndarray:
        """Line numbers m, symmetric around the carrier (m = 0)."""
        half = self.n_lines // 2
        return np.arange(-half, half + 1)

    @property
    def period_ps(self) -> float:
        return 1e3 / self.spacing_ghz

    @property
    def offsets_thz(self) -> np.ndarray:
        return self.indices * self.spacing_ghz * 1e-3

    @property
    def line_frequencies_ghz(self) -> np.ndarray:
        return 1e3 * C_NM_THZ / self.center_wavelength_nm + self.indices * self.spacing_ghz

    @property
    def coefficients(self) -> np.ndarray:
        return self.amplitudes * np.exp(1j * self.phases)

    def position(self, m: int) -> int:
        """Array position of line ``m``."""
        half = self.n_lines // 2
        if not -half <= m <= half:
            raise DomainError(f"line {m} is not part of a {self.n_lines}-line comb")
        return int(m + half)

    def average_power_mw(self) -> float:
        return float(np.sum(self.amplitudes**2))

    def with_phases(self, phases: Sequence[float]) -> "CombSpec":
        return replace(self, phases=np.asarray(phases, dtype=float))

    def with_amplitudes(self, amplitudes: Sequence[float]) -> "CombSpec":
        return replace(self, amplitudes=np.asarray(amplitudes, dtype=float))

    def scaled_to(self, power_mw: float) -> "CombSpec":
        current = self.average_power_mw()
        if not current > 0:
            raise DomainError("cannot rescale a comb without power")
        return self.with_amplitudes(self.amplitudes * np.sqrt(power_mw / current))

    def field_at(self, t_ps: np.ndarray) -> np.ndarray:
        """Periodic time-domain field in sqrt(mW) at arbitrary times."""
        t_ps = np.asarray(t_ps, dtype=float)
        phase = 2.0 * np.pi * np.multiply.outer(t_ps, self.offsets_thz)
        return np.exp(1j * phase) @ self.coefficients

    def to_envelope(
        self,
        grid: Optional[TimeFrequencyGrid] = None,
        *,
        gated: bool = True,
        units: Units = Units.CLASSICAL,
    ) -> ComplexEnvelope:
        """Classical envelope of the pulse train; ``gated`` keeps one period
        ``[-T/2, T/2)`` around t = 0 and zeros the rest of the window."""
        grid = grid or TimeFrequencyGrid.default()
        samples = self.field_at(grid.t) * np.sqrt(1e-3)
        if gated:
            samples = np.where(grid.period_mask(self.period_ps), samples, 0.0)
        envelope = ComplexEnvelope(grid, samples, self.center_wavelength_nm, Units.CLASSICAL)
        return envelope.to_units(units)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "center_wavelength_nm": float(self.center_wavelength_nm),
            "spacing_ghz": float(self.spacing_ghz),
            "lines": [
                {"index": int(m), "amplitude": float(a), "phase": float(p)}
                for m, a, p in zip(self.indices, self.amplitudes, self.phases)
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CombSpec":
        lines = sorted(data["lines"], key=lambda line: line["index"])
        indices = [line["index"] for line in lines]
        half = len(lines) // 2
        if indices != list(range(-half, half + 1)):
            raise DomainError(f"comb line indices must run from {-half} to {half}")
        return cls(
            float(data["center_wavelength_nm"]),
            float(data.get("spacing_ghz", DEFAULT_SPACING_GHZ)),
            [line["amplitude"] for line in lines],
            [line["phase"] for line in lines],
        )


def generate_chirped_comb(
    center: float = 1556.6,
    n_lines: int = DEFAULT_N_LINES,
    spacing: float = DEFAULT_SPACING_GHZ,
    chirp_coeffs: Sequence[float] = (),
    *,
    amplitudes: Optional[Sequence[float]] = None,
) -> CombSpec:
    """Comb whose line ``m`` carries phase sum_p chirp_coeffs[p - 2] * m**p.

    ``chirp_coeffs[0]`` is the quadratic coefficient, ``chirp_coeffs[1]`` the
    cubic one, and so on. Amplitudes default to a flat 1 sqrt(mW) per line.
    """
    if n_lines < 1 or n_lines % 2 == 0:
        raise DomainError(f"n_lines must be odd and positive, got {n_lines}")
    half = n_lines // 2
    m = np.arange(-half, half + 1, dtype=float)
    phases = np.zeros(n_lines)
    for order, coeff in enumerate(chirp_coeffs, start=2):
        phases += coeff * m**order
    amps = np.ones(n_lines) if amplitudes is None else np.asarray(amplitudes, dtype=float)
    if amps.shape != (n_lines,):
        raise DomainError("one amplitude per line is required")
    return CombSpec(center, spacing, amps, phases)
