from .spec import DEFAULT_N_LINES, DEFAULT_SPACING_GHZ, CombSpec, generate_chirped_comb, wrap_phase
from .mask import (
    C_BAND_START_GHZ,
    C_BAND_STOP_GHZ,
    MAX_ATTENUATION_DB,
    WaveshaperMask,
    apply_mask,
)
from .chirp import (
    REFERENCE_PAIR,
    apply_phase_corrections,
    beat_delay,
    beat_phase,
    chirp_correct,
    emulate_shaping,
    residual_nonlinear_phase,
    unwrapped_phases,
)

__all__ = [
    "CombSpec",
    "WaveshaperMask",
    "generate_chirped_comb",
    "wrap_phase",
    "apply_mask",
    "beat_delay",
    "beat_phase",
    "chirp_correct",
    "apply_phase_corrections",
    "residual_nonlinear_phase",
    "unwrapped_phases",
    "emulate_shaping",
    "DEFAULT_SPACING_GHZ",
    "DEFAULT_N_LINES",
    "C_BAND_START_GHZ",
    "C_BAND_STOP_GHZ",
    "MAX_ATTENUATION_DB",
    "REFERENCE_PAIR",
]
