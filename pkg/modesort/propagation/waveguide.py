"""Waveguide parameters for the sum-frequency stage."""

from dataclasses import dataclass, replace
from typing import Any, Dict, Optional

import numpy as np

from ..errors import DomainError
from ..field import sum_frequency_wavelength

SINC_FWHM_FACTOR = 0.8859  # FWHM of sinc^2(pi x) in x


@dataclass(frozen=True)
class WaveguideSpec:
    """PPLN waveguide in the frame co-moving with the signal.

    Walk-offs are group delays per mm relative to the signal, GVD values are
    beta_2 in ps^2/mm. ``kappa`` (1/(mm sqrt(W))) defaults to the value fixed
    by the small-signal SHG efficiency, kappa^2 L^2 = eta_SHG.
    """

    length_mm: float = 52.0
    shg_efficiency_pct_per_w: float = 1600.0
    signal_wavelength_nm: float = 1532.1
    pump_wavelength_nm: float = 1556.6
    pump_walkoff_ps_per_mm: float = 0.002
    sf_walkoff_ps_per_mm: float = 1.0
    gvd_signal_ps2_per_mm: float = 1.0e-4
    gvd_pump_ps2_per_mm: float = 1.0e-4
    gvd_sf_ps2_per_mm: float = 3.5e-4
    delta_k0_per_mm: float = 0.0
    pm_ripple: float = 0.0
    pm_ripple_period_mm: float = 5.0
    kappa: Optional[float] = None

    def __post_init__(self):
        if not self.length_mm > 0:
            raise DomainError("waveguide length must be positive")
        if not self.shg_efficiency_pct_per_w > 0:
            raise DomainError("SHG efficiency must be positive")
        if self.kappa is not None and self.kappa < 0:
            raise DomainError("coupling constant must be non-negative")
        if not 0 <= self.pm_ripple < 1:
            raise DomainError("phase-matching ripple must lie in [0, 1)")

    @property
    def coupling(self) -> float:
        if self.kappa is not None:
            return self.kappa
        return float(np.sqrt(self.shg_efficiency_pct_per_w / 100.0) / self.length_mm)

    @property
    def sf_wavelength_nm(self) -> float:
        return sum_frequency_wavelength(self.signal_wavelength_nm, self.pump_wavelength_nm)

    @property
    def phasematch_fwhm_ghz(self) -> float:
        walkoff = abs(self.sf_walkoff_ps_per_mm) * self.length_mm
        return float("inf") if walkoff == 0 else 1e3 * SINC_FWHM_FACTOR / walkoff

    @classmethod
    def from_phasematch_bandwidth(cls, fwhm_ghz: float, **kwargs) -> "WaveguideSpec":
        """Choose the SF walk-off so the CW phase-matching peak has ``fwhm_ghz``."""
        length = kwargs.get("length_mm", cls.length_mm)
        if not fwhm_ghz > 0:
            raise DomainError("phase-matching bandwidth must be positive")
        return cls(sf_walkoff_ps_per_mm=1e3 * SINC_FWHM_FACTOR / (fwhm_ghz * length), **kwargs)

    def with_kappa(self, kappa: float) -> "WaveguideSpec":
        return replace(self, kappa=float(kappa))

    def coupling_at(self, z_mm: float) -> float:
        ripple = self.pm_ripple * np.sin(2.0 * np.pi * z_mm / self.pm_ripple_period_mm)
        return self.coupling * (1.0 + ripple)

    def to_dict(self) -> Dict[str, Any]:
        data = dict(self.__dict__)
        data["coupling"] = self.coupling
        data["phasematch_fwhm_ghz"] = self.phasematch_fwhm_ghz
        return data
