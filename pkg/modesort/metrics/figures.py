"""Separability, selectivity and the BB84-style receiver figures.

Indices are zero-based: ``separability(row, 0)`` is sigma_1.
"""

from dataclasses import asdict, dataclass
from typing import Dict, Sequence

import numpy as np

from ..errors import DomainError, UndefinedSeparabilityError


def _row(eta_row: Sequence[float]) -> np.ndarray:
    row = np.asarray(eta_row, dtype=float)
    if row.ndim != 1 or row.size == 0:
        raise DomainError("an efficiency row must be a non-empty 1-D sequence")
    if np.any(row < 0) or not np.all(np.isfinite(row)):
        raise DomainError("efficiencies must be finite and non-negative")
    return row


def separability(eta_row: Sequence[float], k: int) -> float:
    """sigma_k = eta_kk / sum_j eta_kj."""
    row = _row(eta_row)
    total = row.sum()
    if total == 0 or row[k] == 0:
        raise UndefinedSeparabilityError(f"separability undefined for row {row.tolist()} at index {k}")
    return float(row[k] / total)


def selectivity(eta_row: Sequence[float], k: int) -> float:
    """varsigma_k = eta_kk * sigma_k."""
    row = _row(eta_row)
    return float(row[k] * separability(row, k))


def separabilities(eta: np.ndarray) -> np.ndarray:
    """Per-row sigma for a square matrix whose diagonal holds the intended pairs."""
    eta = np.asarray(eta, dtype=float)
    return np.array([separability(eta[k], k) for k in range(eta.shape[0])])


def selectivities(eta: np.ndarray) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    return np.array([selectivity(eta[k], k) for k in range(eta.shape[0])])


def sub_matrix(eta: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    """Explicit sub-alphabet extraction."""
    return np.asarray(eta, dtype=float)[np.ix_(list(rows), list(cols))]


@dataclass(frozen=True)
class QKDFigures:
    sigma2_key: float
    sigma2_check: float
    eta_ov: float
    qber: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def qkd_figures(eta_2x2_keybasis: np.ndarray, eta_2x2_checkbasis: np.ndarray) -> QKDFigures:
    """Two-mode separabilities, overall receiver efficiency and QBER.

    Row 0 of each matrix is the pump used for that basis (P5 for the key,
    P1 for the check), columns are the two signals with the intended one first.
    """
    key = np.asarray(eta_2x2_keybasis, dtype=float)
    check = np.asarray(eta_2x2_checkbasis, dtype=float)
    for m in (key, check):
        if m.shape != (2, 2):
            raise DomainError("QKD figures need 2x2 efficiency matrices")
        if np.any(m < 0) or np.any(m > 1):
            raise DomainError("efficiencies must lie in [0, 1]")
    sigma_key = separability(key[0], 0)
    sigma_check = separability(check[0], 0)
    return QKDFigures(
        sigma2_key=sigma_key,
        sigma2_check=sigma_check,
        eta_ov=float(key[0, 0] * sigma_key),
        qber=float(1.0 - sigma_check),
    )
