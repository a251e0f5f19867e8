from .waveguide import WaveguideSpec
from .solver import (
    SplitStepPropagator,
    batch_efficiencies,
    calibrate_kappa,
    efficiency,
    efficiency_from_powers,
    propagate_sfg,
)
from .transfer import TransferMatrix, transfer_matrix
from .report import COMB_PERIOD_PS, ConversionReport, eta_matrix, eta_row, prepare_pump

__all__ = [
    "WaveguideSpec",
    "SplitStepPropagator",
    "propagate_sfg",
    "efficiency",
    "efficiency_from_powers",
    "batch_efficiencies",
    "calibrate_kappa",
    "TransferMatrix",
    "transfer_matrix",
    "ConversionReport",
    "eta_matrix",
    "eta_row",
    "prepare_pump",
    "COMB_PERIOD_PS",
]
