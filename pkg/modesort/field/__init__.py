from .grid import TimeFrequencyGrid
from .envelope import (
    C_NM_THZ,
    ComplexEnvelope,
    Units,
    apply_delay,
    apply_spectral_phase,
    check_guard_band,
    inner_product,
    sum_frequency_wavelength,
    to_samples,
    to_spectrum,
)

__all__ = [
    "TimeFrequencyGrid",
    "ComplexEnvelope",
    "Units",
    "C_NM_THZ",
    "inner_product",
    "apply_delay",
    "apply_spectral_phase",
    "check_guard_band",
    "to_spectrum",
    "to_samples",
    "sum_frequency_wavelength",
]
