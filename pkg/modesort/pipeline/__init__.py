from .experiment import (
    ALPHABETS,
    SIGNAL_LABELS,
    AlphabetMeasurement,
    SweepResult,
    measure_alphabet,
    sweep_delay_power,
)
from .commands import (
    COMMANDS,
    CommandResult,
    cmd_align,
    cmd_chirp,
    cmd_counts,
    cmd_matrix,
    cmd_modes,
    cmd_pumps,
    cmd_spsa,
)

__all__ = [
    "sweep_delay_power",
    "measure_alphabet",
    "SweepResult",
    "AlphabetMeasurement",
    "ALPHABETS",
    "SIGNAL_LABELS",
    "COMMANDS",
    "CommandResult",
    "cmd_modes",
    "cmd_pumps",
    "cmd_matrix",
    "cmd_spsa",
    "cmd_counts",
    "cmd_align",
    "cmd_chirp",
]
