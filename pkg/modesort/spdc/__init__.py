from .jsa import JointSpectralAmplitude, build_jsa, filter_bandwidth_thz, super_gaussian_pulse
from .modes import (
    TemporalModeSet,
    alphabets,
    all_signals,
    count_lobes,
    mode_overlap,
    schmidt_decompose,
    schmidt_spectra,
    superpose,
)

__all__ = [
    "JointSpectralAmplitude",
    "TemporalModeSet",
    "build_jsa",
    "schmidt_decompose",
    "schmidt_spectra",
    "superpose",
    "alphabets",
    "all_signals",
    "count_lobes",
    "mode_overlap",
    "filter_bandwidth_thz",
    "super_gaussian_pulse",
]
