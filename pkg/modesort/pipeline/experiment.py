"""Delay/power sweeps and the two-alphabet efficiency measurement."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from ..errors import DomainError, UndefinedSeparabilityError
from ..field import ComplexEnvelope
from ..metrics import QKDFigures, qkd_figures, selectivities, separabilities, separability, sub_matrix
from ..propagation import COMB_PERIOD_PS, ConversionReport, SplitStepPropagator, WaveguideSpec, eta_row, prepare_pump
from ..spdc import TemporalModeSet

logger = logging.getLogger(__name__)

SIGNAL_LABELS = ("S1", "S2", "S3", "S4", "S5", "S6")
ALPHABETS = {"A": ("S1", "S2", "S3", "S4"), "B": ("S3", "S4", "S5", "S6")}
DEFAULT_DELAY_GRID = np.round(np.arange(-1.0, 1.0 + 1e-9, 0.2), 10)
DEFAULT_POWER_OFFSETS = np.arange(-10.0, 10.0 + 1e-9, 5.0)


@dataclass
class SweepResult:
    label: str
    target_index: int
    delays: np.ndarray
    powers: np.ndarray
    eta: np.ndarray  # (delays, powers, signals)
    optimal_delay: float
    optimal_power: float
    final_delay: float
    final_power: float

    @property
    def eta_target(self) -> np.ndarray:
        return self.eta[:, :, self.target_index]

    def sigma(self) -> np.ndarray:
        sigma = np.zeros(self.eta.shape[:2])
        for i in range(sigma.shape[0]):
            for p in range(sigma.shape[1]):
                try:
                    sigma[i, p] = separability(self.eta[i, p], self.target_index)
                except UndefinedSeparabilityError:
                    sigma[i, p] = 0.0
        return sigma


def sweep_delay_power(
    pump: ComplexEnvelope,
    signals: TemporalModeSet,
    k: int,
    wg: WaveguideSpec,
    delay_grid: Sequence[float] = DEFAULT_DELAY_GRID,
    power_grid: Sequence[float] = (),
    *,
    n_steps: int = 200,
    period_ps: float = COMB_PERIOD_PS,
    label: Optional[str] = None,
    max_workers: Optional[int] = None,
) -> SweepResult:
    """eta_kj over a delay x average-power grid.

    The optimum maximises eta_kk; the final operating point maximises sigma_k.
    """
    delays = np.asarray(delay_grid, dtype=float)
    powers = np.asarray(power_grid, dtype=float)
    if powers.size == 0:
        powers = np.array([pump.average_power_mw(period_ps)])
    if delays.size == 0 or np.any(powers <= 0):
        raise DomainError("sweeps need at least one delay and positive powers")
    propagator = SplitStepPropagator(signals.grid, wg, n_steps)
    grid_points = [(d, p) for d in delays for p in powers]

    def one(point):
        d, p = point
        return eta_row(prepare_pump(pump, d, p, period_ps), signals, wg, propagator=propagator)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        rows = list(pool.map(one, grid_points))
    eta = np.stack(rows).reshape(delays.size, powers.size, len(signals))

    result = SweepResult(label or f"P{k + 1}", k, delays, powers, eta, 0.0, 0.0, 0.0, 0.0)
    i, p = np.unravel_index(np.argmax(result.eta_target), result.eta_target.shape)
    result.optimal_delay, result.optimal_power = float(delays[i]), float(powers[p])
    i, p = np.unravel_index(np.argmax(result.sigma()), result.eta_target.shape)
    result.final_delay, result.final_power = float(delays[i]), float(powers[p])
    logger.info(
        "%s sweep: optimum %.2f ps / %.1f mW, final %.2f ps / %.1f mW",
        result.label,
        result.optimal_delay,
        result.optimal_power,
        result.final_delay,
        result.final_power,
    )
    return result


@dataclass
class AlphabetMeasurement:
    eta: np.ndarray  # P1..P6 x S1..S6
    reports: Dict[str, ConversionReport]
    qkd: QKDFigures
    sweeps: Dict[str, SweepResult]


def _alphabet_report(eta_full: np.ndarray, name: str, sweeps: Mapping[str, SweepResult]) -> ConversionReport:
    labels = ALPHABETS[name]
    index = [SIGNAL_LABELS.index(s) for s in labels]
    eta = sub_matrix(eta_full, index, index)
    pumps = [f"P{s[1:]}" for s in labels]
    return ConversionReport(
        pump_labels=pumps,
        signal_labels=list(labels),
        eta=eta,
        separabilities=separabilities(eta),
        selectivities=selectivities(eta),
        optimal_delay=np.array([sweeps[p].final_delay for p in pumps]),
        optimal_power=np.array([sweeps[p].final_power for p in pumps]),
        metadata={"alphabet": name},
    )


def measure_alphabet(
    pumps: Mapping[str, ComplexEnvelope],
    signals: TemporalModeSet,
    wg: WaveguideSpec,
    *,
    delay_grid: Sequence[float] = DEFAULT_DELAY_GRID,
    power_offsets: Sequence[float] = DEFAULT_POWER_OFFSETS,
    n_steps: int = 200,
    period_ps: float = COMB_PERIOD_PS,
    max_workers: Optional[int] = None,
) -> AlphabetMeasurement:
    """Sweep every pump P1..P6 against its alphabet, then measure it against
    all six signals at its final delay and power.

    ``signals`` holds S1..S6; ``power_offsets`` are added to each pump's own
    average power to form its power grid.
    """
    if tuple(signals.labels) != SIGNAL_LABELS:
        raise DomainError(f"signals must be labelled {SIGNAL_LABELS}, got {signals.labels}")
    missing = [f"P{k}" for k in range(1, 7) if f"P{k}" not in pumps]
    if missing:
        raise DomainError(f"pumps {missing} are missing")

    sweeps: Dict[str, SweepResult] = {}
    rows: List[np.ndarray] = []
    for k in range(1, 7):
        label = f"P{k}"
        alphabet = "A" if k <= 4 else "B"
        basis = signals.subset(ALPHABETS[alphabet])
        pump = pumps[label]
        base = pump.average_power_mw(period_ps)
        powers = base + np.asarray(power_offsets, dtype=float)
        powers = powers[powers > 0]
        sweep = sweep_delay_power(
            pump,
            basis,
            ALPHABETS[alphabet].index(f"S{k}"),
            wg,
            delay_grid,
            powers,
            n_steps=n_steps,
            period_ps=period_ps,
            label=label,
            max_workers=max_workers,
        )
        sweeps[label] = sweep
        final = prepare_pump(pump, sweep.final_delay, sweep.final_power, period_ps)
        rows.append(eta_row(final, signals, wg, n_steps))

    eta_full = np.stack(rows)
    reports = {name: _alphabet_report(eta_full, name, sweeps) for name in ALPHABETS}
    key = sub_matrix(eta_full, [4, 5], [4, 5])
    check = sub_matrix(eta_full, [0, 1], [0, 1])
    figures = qkd_figures(key, check)
    logger.info("QKD figures: %s", figures.to_dict())
    return AlphabetMeasurement(eta_full, reports, figures, sweeps)
