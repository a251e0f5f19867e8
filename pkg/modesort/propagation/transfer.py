"""Mode-space input/output map of the converter for a fixed pump."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..field import ComplexEnvelope, Units
from ..spdc import TemporalModeSet
from .solver import SplitStepPropagator, pump_samples
from .waveguide import WaveguideSpec

RESIDUAL_RANK_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Columns are input signal modes.

    ``signal_block`` projects the transmitted signal back onto the input
    basis, ``signal_residual`` holds what leaves that span, and ``sf_block``
    expresses the generated SF in its own Schmidt basis (``sf_basis``).
    """

    labels: Tuple[str, ...]
    signal_block: np.ndarray
    signal_residual: np.ndarray
    sf_block: np.ndarray
    sf_singular_values: np.ndarray
    sf_basis: np.ndarray

    def stacked(self) -> np.ndarray:
        return np.vstack([self.signal_block, self.signal_residual, self.sf_block])

    def unitarity_error(self) -> float:
        u = self.stacked()
        return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))

    def efficiencies(self) -> np.ndarray:
        """Column norms squared of the SF block: eta_j for this pump."""
        return np.sum(np.abs(self.sf_block) ** 2, axis=0)


def transfer_matrix(
    pump: ComplexEnvelope,
    wg: WaveguideSpec,
    basis: TemporalModeSet,
    n_steps: int = 1000,
    *,
    orthonormal_tol: float = 1e-8,
) -> TransferMatrix:
    basis.require_orthonormal(orthonormal_tol)
    grid = basis.grid
    grid.require_same(pump.grid)
    scale = np.sqrt(grid.dt)
    rows = np.stack([m.to_units(Units.QUANTUM).samples for m in basis.modes])
    s_out, f_out = SplitStepPropagator(grid, wg, n_steps).run(rows, pump_samples(pump))

    b_cols = rows.T * scale
    s_cols = s_out.T * scale
    f_cols = f_out.T * scale

    signal_block = b_cols.conj().T @ s_cols
    residual = s_cols - b_cols @ signal_block
    u_r, sv_r, _ = np.linalg.svd(residual, full_matrices=False)
    keep = sv_r > RESIDUAL_RANK_TOLERANCE
    signal_residual = u_r[:, keep].conj().T @ s_cols

    u_f, sv_f, vh_f = np.linalg.svd(f_cols, full_matrices=False)
    sf_block = sv_f[:, None] * vh_f
    return TransferMatrix(
        labels=basis.labels,
        signal_block=signal_block,
        signal_residual=signal_residual,
        sf_block=sf_block,
        sf_singular_values=sv_f,
        sf_basis=(u_f / scale).T,
    )
