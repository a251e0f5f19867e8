"""Programmable waveshaper masks: attenuation and phase on a fixed frequency raster
across the C band, and their action on comb lines."""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Union

import numpy as np

from ..errors import CoverageError, DomainError
from .spec import CombSpec, wrap_phase

C_BAND_START_GHZ = 191250.0
C_BAND_STOP_GHZ = 196275.0
MASK_RESOLUTION_GHZ = 1.0
MAX_ATTENUATION_DB = 60.0


@dataclass(frozen=True, eq=False)
class WaveshaperMask:
    """Attenuation (dB) and phase (rad) per frequency bin.

    Bin ``i`` is centred on ``start_ghz + i * resolution_ghz``.
    """

    attenuation_db: np.ndarray
    phase_rad: np.ndarray
    start_ghz: float = C_BAND_START_GHZ
    resolution_ghz: float = MASK_RESOLUTION_GHZ

    def __post_init__(self):
        attenuation = np.array(self.attenuation_db, dtype=float)
        phase = np.array(self.phase_rad, dtype=float)
        if attenuation.ndim != 1 or attenuation.shape != phase.shape or attenuation.size == 0:
            raise DomainError("attenuation and phase must be equal-length, non-empty vectors")
        if np.any(attenuation < 0) or not np.all(np.isfinite(attenuation)):
            raise DomainError("mask attenuation must be finite and >= 0 dB")
        if not np.all(np.isfinite(phase)):
            raise DomainError("mask phase must be finite")
        if not self.resolution_ghz > 0:
            raise DomainError("mask resolution must be positive")
        attenuation.flags.writeable = False
        phase.flags.writeable = False
        object.__setattr__(self, "attenuation_db", attenuation)
        object.__setattr__(self, "phase_rad", phase)

    @classmethod
    def flat(
        cls,
        start_ghz: float = C_BAND_START_GHZ,
        stop_ghz: float = C_BAND_STOP_GHZ,
        resolution_ghz: float = MASK_RESOLUTION_GHZ,
    ) -> "WaveshaperMask":
        n_bins = int(round((stop_ghz - start_ghz) / resolution_ghz)) + 1
        return cls(np.zeros(n_bins), np.zeros(n_bins), start_ghz, resolution_ghz)

    @classmethod
    def uniform(cls, attenuation_db: float = 0.0, phase_rad: float = 0.0) -> "WaveshaperMask":
        mask = cls.flat()
        n_bins = mask.n_bins
        return cls(np.full(n_bins, attenuation_db), np.full(n_bins, phase_rad))

    @property
    def n_bins(self) -> int:
        return int(self.attenuation_db.size)

    @property
    def frequencies_ghz(self) -> np.ndarray:
        return self.start_ghz + self.resolution_ghz * np.arange(self.n_bins)

    def bin_index(self, frequency_ghz: np.ndarray) -> np.ndarray:
        """Nearest bin of each frequency; raises CoverageError outside the mask."""
        index = np.rint((np.asarray(frequency_ghz, dtype=float) - self.start_ghz) / self.resolution_ghz).astype(int)
        outside = (index < 0) | (index >= self.n_bins)
        if np.any(outside):
            missing = np.asarray(frequency_ghz, dtype=float)[outside]
            raise CoverageError(
                f"mask {self.start_ghz:.0f}-{self.frequencies_ghz[-1]:.0f} GHz does not cover {missing.tolist()} GHz"
            )
        return index

    def compatible(self, other: "WaveshaperMask") -> bool:
        return (
            self.n_bins == other.n_bins
            and np.isclose(self.start_ghz, other.start_ghz)
            and np.isclose(self.resolution_ghz, other.resolution_ghz)
        )

    def __add__(self, other: "WaveshaperMask") -> "WaveshaperMask":
        """Cascade two masks: dB attenuations and phases add."""
        if not self.compatible(other):
            raise DomainError("only masks with identical bins can be combined")
        return WaveshaperMask(
            self.attenuation_db + other.attenuation_db,
            self.phase_rad + other.phase_rad,
            self.start_ghz,
            self.resolution_ghz,
        )

    @classmethod
    def from_target(
        cls,
        comb: CombSpec,
        target: Union[CombSpec, np.ndarray],
        *,
        base: Optional["WaveshaperMask"] = None,
        max_attenuation_db: float = MAX_ATTENUATION_DB,
    ) -> "WaveshaperMask":
        """Mask that turns ``comb`` into the line shape of ``target``.

        ``target`` is a CombSpec or one complex coefficient per line. The
        result is only defined up to overall scale; the strongest line passes
        unattenuated. Bins between lines are blocked.
        """
        base = base or cls.flat()
        wanted = target.coefficients if isinstance(target, CombSpec) else np.asarray(target, dtype=complex)
        if wanted.shape != comb.amplitudes.shape:
            raise DomainError("target needs one coefficient per comb line")
        if np.any(comb.amplitudes == 0) and np.any(wanted[comb.amplitudes == 0] != 0):
            raise DomainError("a mask cannot create light on a dark comb line")
        ratio = np.divide(np.abs(wanted), comb.amplitudes, out=np.zeros(comb.n_lines), where=comb.amplitudes > 0)
        if not ratio.max() > 0:
            raise DomainError("target comb carries no power")
        with np.errstate(divide="ignore"):
            line_att = -20.0 * np.log10(ratio / ratio.max())
        line_att = np.minimum(line_att, max_attenuation_db)
        line_phase = wrap_phase(np.angle(wanted) - comb.phases)

        attenuation = np.full(base.n_bins, max_attenuation_db)
        phase = np.zeros(base.n_bins)
        bins = base.bin_index(comb.line_frequencies_ghz)
        attenuation[bins] = line_att
        phase[bins] = line_phase
        return cls(attenuation, phase, base.start_ghz, base.resolution_ghz)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "start_ghz": float(self.start_ghz),
            "resolution_ghz": float(self.resolution_ghz),
            "attenuation_db": self.attenuation_db.tolist(),
            "phase_rad": self.phase_rad.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WaveshaperMask":
        return cls(
            data["attenuation_db"],
            data["phase_rad"],
            float(data.get("start_ghz", C_BAND_START_GHZ)),
            float(data.get("resolution_ghz", MASK_RESOLUTION_GHZ)),
        )


def apply_mask(comb: CombSpec, mask: WaveshaperMask) -> CombSpec:
    """Scale each line by 10**(-att/20) and add the phase of its nearest bin."""
    bins = mask.bin_index(comb.line_frequencies_ghz)
    amplitudes = comb.amplitudes * 10.0 ** (-mask.attenuation_db[bins] / 20.0)
    phases = comb.phases + mask.phase_rad[bins]
    return CombSpec(comb.center_wavelength_nm, comb.spacing_ghz, amplitudes, phases)
