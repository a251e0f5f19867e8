__version__ = "0.1.0"

from .field import ComplexEnvelope, TimeFrequencyGrid, Units
from .spdc import TemporalModeSet, build_jsa, schmidt_decompose
from .propagation import ConversionReport, WaveguideSpec, eta_matrix, propagate_sfg
from .metrics import qkd_figures, selectivity, separability

__all__ = [
    "__version__",
    "TimeFrequencyGrid",
    "ComplexEnvelope",
    "Units",
    "TemporalModeSet",
    "build_jsa",
    "schmidt_decompose",
    "WaveguideSpec",
    "propagate_sfg",
    "eta_matrix",
    "ConversionReport",
    "separability",
    "selectivity",
    "qkd_figures",
]
