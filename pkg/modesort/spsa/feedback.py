import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..comb import CombSpec, wrap_phase
from ..errors import DomainError
from ..field import ComplexEnvelope, Units
from ..metrics import separability
from ..propagation import SplitStepPropagator, WaveguideSpec, batch_efficiencies, eta_row
from ..spdc import TemporalModeSet
from .optimizer import SPSAConfig, SPSAResult, spsa_optimize

logger = logging.getLogger(__name__)

DEFAULT_SIGNAL_POWER_UW = 120.0


@dataclass
class FeedbackResult:
    comb: CombSpec
    spsa: SPSAResult
    eta_before: float
    eta_after: float
    sf_power_before_uw: float
    sf_power_after_uw: float


class PowerMeter:
    """Noisy SF power reading (uW) for a given pump phase vector."""

    def __init__(
        self,
        pump: CombSpec,
        signal: ComplexEnvelope,
        wg: WaveguideSpec,
        *,
        noise_frac: float = 0.01,
        signal_power_uw: float = DEFAULT_SIGNAL_POWER_UW,
        n_steps: int = 200,
        seed: int = 0,
    ):
        if noise_frac < 0:
            raise DomainError("meter noise must be non-negative")
        self.pump = pump
        self.grid = signal.grid
        self.row = signal.to_units(Units.QUANTUM).normalized().samples[None, :]
        self.propagator = SplitStepPropagator(self.grid, wg, n_steps)
        self.noise_frac = noise_frac
        self.scale = signal_power_uw * wg.signal_wavelength_nm / wg.sf_wavelength_nm
        self.rng = np.random.default_rng(seed)

    def efficiency(self, phases: np.ndarray) -> float:
        pump = self.pump.with_phases(phases).to_envelope(self.grid).samples
        return float(batch_efficiencies(self.row, pump, self.propagator)[0])

    def __call__(self, phases: np.ndarray) -> float:
        reading = self.efficiency(phases) * self.scale
        if self.noise_frac:
            reading *= 1.0 + self.noise_frac * self.rng.standard_normal()
        return reading


def perturb_phases(comb: CombSpec, sigma_rad: float, rng: np.random.Generator) -> CombSpec:
    """Add independent Gaussian phase errors with standard deviation ``sigma_rad`` to every line."""
    if sigma_rad < 0:
        raise DomainError("perturbation width must be non-negative")
    return comb.with_phases(comb.phases + rng.normal(0.0, sigma_rad, comb.n_lines))


def pump_phase_feedback(
    pump_k: CombSpec,
    signal_j: ComplexEnvelope,
    wg: WaveguideSpec,
    cfg: Optional[SPSAConfig] = None,
    meter_noise_frac: float = 0.01,
    *,
    signal_power_uw: float = DEFAULT_SIGNAL_POWER_UW,
    n_steps: int = 200,
) -> FeedbackResult:
    """Tune only the line phases of ``pump_k`` against the simulated SF power
    of ``signal_j``; amplitudes are left untouched."""
    cfg = cfg or SPSAConfig()
    meter = PowerMeter(
        pump_k,
        signal_j,
        wg,
        noise_frac=meter_noise_frac,
        signal_power_uw=signal_power_uw,
        n_steps=n_steps,
        seed=cfg.seed + 1,
    )
    eta_before = meter.efficiency(pump_k.phases)
    result = spsa_optimize(meter, pump_k.phases, cfg)
    optimized = pump_k.with_phases(wrap_phase(result.theta_best))
    eta_after = meter.efficiency(optimized.phases)
    logger.info(
        "pump phase feedback (%s): eta %.4f -> %.4f after %d iterations",
        cfg.direction,
        eta_before,
        eta_after,
        len(result.trace),
    )
    return FeedbackResult(
        comb=optimized,
        spsa=result,
        eta_before=eta_before,
        eta_after=eta_after,
        sf_power_before_uw=eta_before * meter.scale,
        sf_power_after_uw=eta_after * meter.scale,
    )


@dataclass
class CrosstalkResult:
    comb: CombSpec
    feedback: FeedbackResult
    eta_row_before: np.ndarray
    eta_row_after: np.ndarray
    sigma_before: float
    sigma_after: float
    accepted: bool


def suppress_crosstalk(
    pump_k: CombSpec,
    basis: TemporalModeSet,
    k: int,
    j: int,
    wg: WaveguideSpec,
    cfg: Optional[SPSAConfig] = None,
    meter_noise_frac: float = 0.01,
    *,
    signal_power_uw: float = DEFAULT_SIGNAL_POWER_UW,
    n_steps: int = 200,
) -> CrosstalkResult:
    """Minimise eta_kj by phase feedback, then re-measure the whole row.

    The new phases are kept only when the separability of mode ``k`` did not
    drop; otherwise ``pump_k`` is returned unchanged.
    """
    if k == j:
        raise DomainError("cross-talk suppression needs two different modes")
    if not (0 <= k < len(basis) and 0 <= j < len(basis)):
        raise DomainError(f"modes {k}, {j} are outside a {len(basis)}-mode basis")
    cfg = (cfg or SPSAConfig()).model_copy(update={"direction": "minimize"})
    propagator = SplitStepPropagator(basis.grid, wg, n_steps)
    before = eta_row(pump_k.to_envelope(basis.grid), basis, wg, propagator=propagator)
    feedback = pump_phase_feedback(
        pump_k,
        basis[j],
        wg,
        cfg,
        meter_noise_frac,
        signal_power_uw=signal_power_uw,
        n_steps=n_steps,
    )
    after = eta_row(feedback.comb.to_envelope(basis.grid), basis, wg, propagator=propagator)
    sigma_before, sigma_after = separability(before, k), separability(after, k)
    accepted = sigma_after >= sigma_before
    logger.info(
        "cross-talk %d->%d: eta %.4g -> %.4g, sigma %.4f -> %.4f (%s)",
        k,
        j,
        before[j],
        after[j],
        sigma_before,
        sigma_after,
        "kept" if accepted else "reverted",
    )
    return CrosstalkResult(
        comb=feedback.comb if accepted else pump_k,
        feedback=feedback,
        eta_row_before=before,
        eta_row_after=after if accepted else before,
        sigma_before=sigma_before,
        sigma_after=sigma_after if accepted else sigma_before,
        accepted=accepted,
    )
