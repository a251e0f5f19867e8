"""Pump waveform design on the comb-line parameterisation.

A design starts from a warm-start direction in the space of comb line
coefficients, picks the pump power within the budget that maximises the
selectivity of the target mode, and refines the line coefficients at that
fixed power with Nelder-Mead plus seeded restarts.
"""

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import minimize, minimize_scalar

from ..comb import DEFAULT_N_LINES, DEFAULT_SPACING_GHZ, CombSpec
from ..errors import ConvergenceWarning, DomainError, UndefinedSeparabilityError
from ..field import ComplexEnvelope, Units
from ..metrics import separability, selectivity
from ..propagation import SplitStepPropagator, WaveguideSpec, batch_efficiencies
from ..spdc import TemporalModeSet
from .projection import line_coefficients

logger = logging.getLogger(__name__)

DEFAULT_POWER_BUDGET_MW = 300.0
LOW_GAIN_POWER_MW = 0.01


class DesignProblem:
    """Everything needed to evaluate one pump on one signal basis."""

    def __init__(
        self,
        target_index: int,
        signals: TemporalModeSet,
        wg: WaveguideSpec,
        *,
        n_lines: int = DEFAULT_N_LINES,
        spacing_ghz: float = DEFAULT_SPACING_GHZ,
        n_steps: int = 200,
    ):
        if not 0 <= target_index < len(signals):
            raise DomainError(f"target index {target_index} is outside a {len(signals)}-mode set")
        self.target_index = target_index
        self.signals = signals
        self.wg = wg
        self.grid = signals.grid
        self.n_lines = n_lines
        self.spacing_ghz = spacing_ghz
        self.propagator = SplitStepPropagator(self.grid, wg, n_steps)
        self.rows = np.stack([m.to_units(Units.QUANTUM).samples for m in signals.modes])
        unit = CombSpec(wg.pump_wavelength_nm, spacing_ghz, np.zeros(n_lines), np.zeros(n_lines))
        # time-domain pump (sqrt(W)) of each line at 1 sqrt(mW), gated to one period
        gate = self.grid.period_mask(unit.period_ps)
        phase = 2.0 * np.pi * np.multiply.outer(unit.offsets_thz, self.grid.t)
        self.line_basis = np.where(gate, np.exp(1j * phase), 0.0) * np.sqrt(1e-3)
        self.n_evaluations = 0

    def comb(self, coefficients: np.ndarray) -> CombSpec:
        return CombSpec.from_complex(coefficients, self.wg.pump_wavelength_nm, self.spacing_ghz)

    def pump(self, coefficients: np.ndarray) -> ComplexEnvelope:
        return ComplexEnvelope(self.grid, coefficients @ self.line_basis, self.wg.pump_wavelength_nm, Units.CLASSICAL)

    def eta_row(self, coefficients: np.ndarray) -> np.ndarray:
        self.n_evaluations += 1
        return batch_efficiencies(self.rows, coefficients @ self.line_basis, self.propagator)

    def selectivity(self, coefficients: np.ndarray) -> float:
        try:
            return selectivity(self.eta_row(coefficients), self.target_index)
        except UndefinedSeparabilityError:
            return 0.0

    def linear_kernels(self, low_gain_power_mw: float = LOW_GAIN_POWER_MW) -> np.ndarray:
        """SF response per unit line amplitude at low conversion, shape (lines, modes, N)."""
        amplitude = np.sqrt(low_gain_power_mw)
        kernels = []
        for basis in self.line_basis:
            _, sf = self.propagator.run(self.rows, basis * amplitude)
            kernels.append(sf / amplitude)
        return np.stack(kernels)


class RayleighWarmStart:
    """Line coefficients maximising the low-gain separability.

    At low conversion eta_j is the quadratic form c^H M_j c, so maximising
    eta_k / sum_j eta_j is a generalised Hermitian eigenproblem.
    """

    name = "rayleigh"

    def __init__(self, low_gain_power_mw: float = LOW_GAIN_POWER_MW, ridge: float = 1e-9):
        self.low_gain_power_mw = low_gain_power_mw
        self.ridge = ridge

    def __call__(self, problem: DesignProblem) -> np.ndarray:
        kernels = problem.linear_kernels(self.low_gain_power_mw)
        forms = np.einsum("mjt,njt->jmn", kernels.conj(), kernels) * problem.grid.dt
        total = forms.sum(axis=0)
        total = total + self.ridge * np.trace(total).real * np.eye(problem.n_lines)
        _, vectors = eigh(forms[problem.target_index], total)
        coefficients = vectors[:, -1]
        return coefficients / np.linalg.norm(coefficients)


class TimeReversedWarmStart:
    """Pump proportional to the time-reversed, conjugated target mode."""

    name = "time_reversed"

    def __call__(self, problem: DesignProblem) -> np.ndarray:
        target = problem.signals[problem.target_index]
        reversed_samples = np.conj(np.roll(target.samples[::-1], 1))
        pump = ComplexEnvelope(problem.grid, reversed_samples, problem.wg.pump_wavelength_nm, Units.CLASSICAL)
        coefficients = line_coefficients(pump, problem.spacing_ghz, problem.n_lines)
        norm = np.linalg.norm(coefficients)
        if not norm > 0:
            raise DomainError("target mode has no overlap with the comb lines")
        return coefficients / norm


WARM_STARTS: Dict[str, Callable[[], Callable[[DesignProblem], np.ndarray]]] = {
    RayleighWarmStart.name: RayleighWarmStart,
    TimeReversedWarmStart.name: TimeReversedWarmStart,
}


class NelderMeadRefinement:
    """Fixed-power Nelder-Mead over the real and imaginary line coefficients."""

    def __init__(self, maxiter: int = 200, restarts: int = 5, restart_scale: float = 0.1, tol: float = 1e-4):
        self.maxiter = maxiter
        self.restarts = restarts
        self.restart_scale = restart_scale
        self.tol = tol

    def __call__(
        self,
        objective: Callable[[np.ndarray], float],
        coefficients: np.ndarray,
        rng: np.random.Generator,
    ) -> np.ndarray:
        scale = np.linalg.norm(coefficients)

        def to_coefficients(x: np.ndarray) -> np.ndarray:
            c = x[: x.size // 2] + 1j * x[x.size // 2 :]
            norm = np.linalg.norm(c)
            return c * (scale / norm) if norm > 0 else c

        def loss(x: np.ndarray) -> float:
            return -objective(to_coefficients(x))

        best_x = np.concatenate([coefficients.real, coefficients.imag])
        best = -loss(best_x)
        for attempt in range(self.restarts):
            start = best_x
            if attempt:
                start = best_x + rng.normal(scale=self.restart_scale * scale / np.sqrt(best_x.size), size=best_x.size)
            result = minimize(
                loss,
                start,
                method="Nelder-Mead",
                options={"maxiter": self.maxiter, "xatol": 1e-5, "fatol": 1e-7, "adaptive": True},
            )
            value = -float(result.fun)
            gain = value - best
            if gain > 0:
                best, best_x = value, result.x
            logger.debug("refinement pass %d: selectivity %.5f (gain %.2e)", attempt, value, gain)
            if attempt and gain < self.tol:
                break
        return to_coefficients(best_x)


@dataclass
class DesignResult:
    label: str
    target_index: int
    pump: ComplexEnvelope
    comb: CombSpec
    eta_row: np.ndarray
    separability: float
    selectivity: float
    power_mw: float
    warm_start: str
    warm_start_selectivity: float
    history: List[float] = field(default_factory=list)
    n_evaluations: int = 0
    converged: bool = True

    def summary(self) -> Dict[str, object]:
        return {
            "label": self.label,
            "target_index": self.target_index,
            "eta_row": [float(x) for x in self.eta_row],
            "separability": self.separability,
            "selectivity": self.selectivity,
            "power_mw": self.power_mw,
            "warm_start": self.warm_start,
            "warm_start_selectivity": self.warm_start_selectivity,
            "n_evaluations": self.n_evaluations,
            "converged": self.converged,
        }


def design_pump(
    target_index: int,
    signals: TemporalModeSet,
    wg: WaveguideSpec,
    power_budget: float = DEFAULT_POWER_BUDGET_MW,
    init: Optional[ComplexEnvelope] = None,
    *,
    warm_start: str = RayleighWarmStart.name,
    n_lines: int = DEFAULT_N_LINES,
    spacing_ghz: float = DEFAULT_SPACING_GHZ,
    n_steps: int = 200,
    maxiter: int = 200,
    restarts: int = 5,
    seed: int = 0,
    label: Optional[str] = None,
) -> DesignResult:
    """Comb pump maximising the selectivity of ``signals[target_index]``.

    ``init`` replaces the warm start by the comb projection of a given pump.
    The selectivity history is best-so-far over all objective evaluations.
    """
    if not power_budget > 0:
        raise DomainError("power budget must be positive")
    problem = DesignProblem(target_index, signals, wg, n_lines=n_lines, spacing_ghz=spacing_ghz, n_steps=n_steps)
    label = label or f"P{target_index + 1}"
    rng = np.random.default_rng(seed)
    history: List[float] = []

    def tracked(coefficients: np.ndarray) -> float:
        value = problem.selectivity(coefficients)
        history.append(max(value, history[-1]) if history else value)
        return value

    if init is not None:
        direction = line_coefficients(init, spacing_ghz, n_lines)
        direction = direction / np.linalg.norm(direction)
        start_name = "init"
    else:
        if warm_start not in WARM_STARTS:
            raise DomainError(f"unknown warm start {warm_start!r}; choose from {sorted(WARM_STARTS)}")
        direction = WARM_STARTS[warm_start]()(problem)
        start_name = warm_start

    top = np.sqrt(power_budget)
    scan = minimize_scalar(
        lambda s: -tracked(s * direction),
        bounds=(1e-3 * top, top),
        method="bounded",
        options={"xatol": 1e-3 * top},
    )
    start = scan.x * direction
    start_value = -float(scan.fun)
    logger.info("%s warm start (%s): selectivity %.4f at %.1f mW", label, start_name, start_value, scan.x**2)

    coefficients = NelderMeadRefinement(maxiter=maxiter, restarts=restarts)(tracked, start, rng)
    eta_row = problem.eta_row(coefficients)
    try:
        final = selectivity(eta_row, target_index)
        sigma = separability(eta_row, target_index)
    except UndefinedSeparabilityError:
        final, sigma = 0.0, 0.0
    if final < start_value:
        coefficients, eta_row = start, problem.eta_row(start)
        final, sigma = start_value, separability(eta_row, target_index)

    converged = final > start_value
    if not converged:
        warnings.warn(
            f"{label}: refinement did not improve on the warm start (selectivity {start_value:.4f})",
            ConvergenceWarning,
            stacklevel=2,
        )
    result = DesignResult(
        label=label,
        target_index=target_index,
        pump=problem.pump(coefficients),
        comb=problem.comb(coefficients),
        eta_row=eta_row,
        separability=float(sigma),
        selectivity=float(final),
        power_mw=float(np.sum(np.abs(coefficients) ** 2)),
        warm_start=start_name,
        warm_start_selectivity=start_value,
        history=history,
        n_evaluations=problem.n_evaluations,
        converged=converged,
    )
    logger.info(
        "%s designed: eta %s, sigma %.4f, selectivity %.4f, %.1f mW",
        label,
        np.round(eta_row, 4).tolist(),
        result.separability,
        result.selectivity,
        result.power_mw,
    )
    return result


def design_pumps(
    signals: TemporalModeSet,
    wg: WaveguideSpec,
    targets: Optional[Sequence[int]] = None,
    labels: Optional[Sequence[str]] = None,
    *,
    max_workers: Optional[int] = None,
    **kwargs,
) -> List[DesignResult]:
    """Independent designs for several targets, run concurrently."""
    targets = list(range(len(signals))) if targets is None else list(targets)
    labels = list(labels) if labels is not None else [f"P{k + 1}" for k in targets]

    def one(item):
        k, label = item
        return design_pump(k, signals, wg, label=label, **kwargs)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(one, zip(targets, labels)))
