from .optimizer import SPSAConfig, SPSAResult, calibrate_gain, find_plateau, spsa_optimize
from .feedback import (
    CrosstalkResult,
    FeedbackResult,
    PowerMeter,
    perturb_phases,
    pump_phase_feedback,
    suppress_crosstalk,
)

__all__ = [
    "SPSAConfig",
    "SPSAResult",
    "spsa_optimize",
    "calibrate_gain",
    "find_plateau",
    "pump_phase_feedback",
    "perturb_phases",
    "PowerMeter",
    "FeedbackResult",
    "suppress_crosstalk",
    "CrosstalkResult",
]
