from .photon_counting import (
    CountingConfig,
    CountRecord,
    NoiseCorrectedSigma,
    noise_corrected_sigma,
    simulate_count_matrix,
    simulate_counts,
)

__all__ = [
    "CountingConfig",
    "CountRecord",
    "NoiseCorrectedSigma",
    "simulate_counts",
    "simulate_count_matrix",
    "noise_corrected_sigma",
]
