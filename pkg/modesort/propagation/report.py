"""Efficiency matrices over pump and signal sets, and the report that carries them."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..errors import DomainError
from ..field import ComplexEnvelope, Units, apply_delay
from ..metrics import selectivities, separabilities
from ..spdc import TemporalModeSet
from .solver import EFFICIENCY_SLACK, SplitStepPropagator, batch_efficiencies, pump_samples
from .waveguide import WaveguideSpec

logger = logging.getLogger(__name__)

COMB_PERIOD_PS = 50.0


@dataclass
class ConversionReport:
    pump_labels: List[str]
    signal_labels: List[str]
    eta: np.ndarray
    separabilities: np.ndarray
    selectivities: np.ndarray
    optimal_delay: np.ndarray
    optimal_power: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=float)
        if np.any(eta < -EFFICIENCY_SLACK) or np.any(eta > 1 + EFFICIENCY_SLACK):
            raise DomainError("efficiencies must lie in [0, 1]")
        # solver round-off may leave eta a hair outside [0, 1]
        self.eta = np.clip(eta, 0.0, 1.0)


def prepare_pump(
    pump: ComplexEnvelope,
    delay_ps: float = 0.0,
    power_mw: Optional[float] = None,
    period_ps: float = COMB_PERIOD_PS,
) -> ComplexEnvelope:
    """Delay the pump relative to the signal and scale it to an average power."""
    pump = apply_delay(pump.to_units(Units.CLASSICAL), delay_ps)
    if power_mw is None:
        return pump
    current = pump.average_power_mw(period_ps)
    if not current > 0:
        raise DomainError("cannot rescale a vacuum pump")
    return pump.scaled(np.sqrt(power_mw / current))


def eta_row(
    pump: ComplexEnvelope,
    signals: TemporalModeSet,
    wg: WaveguideSpec,
    n_steps: int = 400,
    propagator: Optional[SplitStepPropagator] = None,
) -> np.ndarray:
    signals.grid.require_same(pump.grid)
    propagator = propagator or SplitStepPropagator(signals.grid, wg, n_steps)
    rows = np.stack([m.to_units(Units.QUANTUM).samples for m in signals.modes])
    return batch_efficiencies(rows, pump_samples(pump), propagator)


def eta_matrix(
    pumps: Sequence[ComplexEnvelope],
    signals: TemporalModeSet,
    wg: WaveguideSpec,
    delays: Optional[Sequence[float]] = None,
    powers: Optional[Sequence[float]] = None,
    *,
    n_steps: int = 400,
    period_ps: float = COMB_PERIOD_PS,
    pump_labels: Optional[Sequence[str]] = None,
    max_workers: Optional[int] = None,
) -> ConversionReport:
    """eta_kj for every pump k and signal j; pump k is meant for signal k."""
    n = len(pumps)
    if n != len(signals):
        raise DomainError("eta_matrix pairs pump k with signal k and needs as many pumps as signals")
    delays = np.zeros(n) if delays is None else np.asarray(delays, dtype=float)
    prepared = [
        prepare_pump(p, d, None if powers is None else powers[k], period_ps)
        for k, (p, d) in enumerate(zip(pumps, delays))
    ]
    propagator = SplitStepPropagator(signals.grid, wg, n_steps)

    def row(pump: ComplexEnvelope) -> np.ndarray:
        return eta_row(pump, signals, wg, propagator=propagator)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        eta = np.stack(list(pool.map(row, prepared)))

    labels = list(pump_labels) if pump_labels else [f"P{label[1:]}" if label.startswith("S") else f"P{k + 1}" for k, label in enumerate(signals.labels)]
    report = ConversionReport(
        pump_labels=labels,
        signal_labels=list(signals.labels),
        eta=eta,
        separabilities=separabilities(eta),
        selectivities=selectivities(eta),
        optimal_delay=delays,
        optimal_power=np.array([p.average_power_mw(period_ps) for p in prepared]),
        metadata={"n_steps": n_steps, "period_ps": period_ps},
    )
    logger.info("eta matrix for %s: sigma = %s", labels, np.round(report.separabilities, 4).tolist())
    return report
