import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import DomainError, RangeError
from ..field import ComplexEnvelope, apply_delay
from ..spdc import TemporalModeSet
from .visibility import visibility_scan

logger = logging.getLogger(__name__)

DEFAULT_TAU_GRID = np.round(np.arange(-5.0, 5.0 + 1e-9, 0.1), 10)
SIMILAR_MODE_THRESHOLD = 0.5


@dataclass
class AlignmentResult:
    """Measured timing offsets; a mode is corrected by delaying it by ``-offset``."""

    labels: List[str]
    offsets: np.ndarray
    tau_grid: np.ndarray
    curves: np.ndarray
    methods: List[str]

    def corrected(self, signals: TemporalModeSet) -> TemporalModeSet:
        modes = [apply_delay(mode, -offset) for mode, offset in zip(signals.modes, self.offsets)]
        return TemporalModeSet.from_envelopes(modes, signals.labels, **signals.metadata)


def _parabolic_vertex(y: np.ndarray, i: int) -> float:
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    return 0.0 if denom == 0 else 0.5 * (y0 - y2) / denom


def _extremum_offset(curve: np.ndarray, taus: np.ndarray, label: str):
    if curve.max() > SIMILAR_MODE_THRESHOLD:
        y, method = curve, "max"
    else:
        y, method = -curve**2, "min"
    i = int(np.argmax(y))
    if i == 0 or i == len(taus) - 1:
        raise RangeError(f"visibility {method} of {label} lies on the delay-grid boundary; widen the grid")
    step = taus[1] - taus[0]
    return -(taus[i] + _parabolic_vertex(y, i) * step), method


def _matched_offset(
    curve: np.ndarray,
    taus: np.ndarray,
    reference: ComplexEnvelope,
    ideal: ComplexEnvelope,
    label: str,
) -> float:
    """Shift s minimising sum (V_measured(tau) - V_ideal(tau + s))^2."""

    def mismatch(s: float) -> float:
        return float(np.sum((curve - visibility_scan(reference, ideal, taus + s)) ** 2))

    coarse = np.array([mismatch(s) for s in taus])
    i = int(np.argmin(coarse))
    if i == 0 or i == len(taus) - 1:
        raise RangeError(f"best shift for {label} lies on the delay-grid boundary; widen the grid")
    step = taus[1] - taus[0]
    fine = minimize_scalar(mismatch, bounds=(taus[i] - step, taus[i] + step), method="bounded", options={"xatol": 1e-6})
    return float(fine.x) if fine.fun <= coarse[i] else float(taus[i])


def align_set(
    signals: TemporalModeSet,
    reference: ComplexEnvelope,
    tau_grid: Optional[Sequence[float]] = None,
    *,
    ideal: Optional[TemporalModeSet] = None,
    ideal_reference: Optional[ComplexEnvelope] = None,
) -> AlignmentResult:
    """Timing offset of every mode from its visibility-versus-delay curve
    against ``reference``.

    With ``ideal`` modes (same order as ``signals``) each measured curve is
    matched against the ideal curve. Without them the curve extremum is
    used: its maximum for modes similar to the reference, the minimum of
    V^2 for orthogonal ones.
    """
    taus = DEFAULT_TAU_GRID if tau_grid is None else np.asarray(tau_grid, dtype=float)
    if taus.size < 3 or np.any(np.diff(taus) <= 0) or not np.allclose(np.diff(taus), taus[1] - taus[0]):
        raise DomainError("the delay grid must be uniform, increasing and hold at least three points")
    if ideal is not None and len(ideal) != len(signals):
        raise DomainError("ideal modes must pair one-to-one with the measured modes")
    ideal_reference = ideal_reference or reference

    offsets, curves, methods = [], [], []
    for j, (label, mode) in enumerate(zip(signals.labels, signals.modes)):
        curve = visibility_scan(reference, mode, taus)
        if ideal is None:
            offset, method = _extremum_offset(curve, taus, label)
        else:
            offset, method = _matched_offset(curve, taus, ideal_reference, ideal[j], label), "ideal"
        offsets.append(offset)
        curves.append(curve)
        methods.append(method)
        logger.info("%s offset %.3f ps (%s)", label, offset, method)
    return AlignmentResult(list(signals.labels), np.array(offsets), taus, np.stack(curves), methods)
