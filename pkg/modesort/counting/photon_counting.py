"""Photon-counting emulation for weak coherent signal pulses.

Detected rates follow rep_rate * photons_per_pulse * 10**(-att/10) * eta_det,
with the converted signal contributing mu * eta photons per pulse and
pump-induced noise ``noise_per_mw * pump_power_mw`` photons per pulse.
"""

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import DataQualityWarning, DomainError, SaturationError
from ..metrics import separability

logger = logging.getLogger(__name__)


class CountingConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mu: float = Field(0.15, gt=0)
    rep_rate_ghz: float = Field(20.0, gt=0)
    extra_attenuation_db: float = Field(18.0, ge=0)
    detector_efficiency: float = Field(0.2, ge=0, le=1)
    noise_per_mw: float = Field(2.7e-6, ge=0)
    pump_power_mw: float = Field(25.0, ge=0)
    noise_rate: Optional[float] = Field(None, ge=0)
    max_count_rate: float = Field(1e7, gt=0)
    integration_time_s: float = Field(1.0, gt=0)
    seed: int = 0

    @property
    def noise_photons_per_pulse(self) -> float:
        if self.noise_rate is not None:
            return self.noise_rate
        return self.noise_per_mw * self.pump_power_mw

    @property
    def detection_factor(self) -> float:
        """Counts per second per photon per pulse."""
        return self.rep_rate_ghz * 1e9 * 10 ** (-self.extra_attenuation_db / 10) * self.detector_efficiency

    def expected_rates(self, eta: float):
        """(signal-on rate, noise-only rate) in counts per second."""
        noise = self.noise_photons_per_pulse * self.detection_factor
        return self.mu * eta * self.detection_factor + noise, noise


@dataclass
class CountRecord:
    signal_counts: int
    noise_counts: int
    duration_s: float
    eta: float
    config: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.signal_counts < 0 or self.noise_counts < 0:
            raise DomainError("counts cannot be negative")


@dataclass(frozen=True)
class NoiseCorrectedSigma:
    sigma: np.ndarray
    stderr: np.ndarray
    eta_proxy: np.ndarray


def simulate_counts(eta: float, cfg: CountingConfig, rng: Optional[np.random.Generator] = None) -> CountRecord:
    """Counts with the signal present and, separately, with it blocked."""
    if not 0 <= eta <= 1:
        raise DomainError(f"efficiency {eta} is outside [0, 1]")
    total, noise = cfg.expected_rates(eta)
    if total > cfg.max_count_rate:
        raise SaturationError(
            f"expected {total:.3g} counts/s exceeds the {cfg.max_count_rate:.3g} limit; add attenuation"
        )
    rng = rng or np.random.default_rng(cfg.seed)
    t = cfg.integration_time_s
    return CountRecord(
        signal_counts=int(rng.poisson(total * t)),
        noise_counts=int(rng.poisson(noise * t)),
        duration_s=t,
        eta=float(eta),
        config=cfg.model_dump(),
    )


def simulate_count_matrix(
    eta: np.ndarray,
    cfg: CountingConfig,
    *,
    max_workers: Optional[int] = None,
) -> List[List[CountRecord]]:
    """One record per (k, j); each task draws from its own stream seeded by (seed, k, j)."""
    eta = np.asarray(eta, dtype=float)
    tasks = [(k, j) for k in range(eta.shape[0]) for j in range(eta.shape[1])]

    def one(task):
        k, j = task
        return simulate_counts(eta[k, j], cfg, np.random.default_rng([cfg.seed, k, j]))

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        flat = list(pool.map(one, tasks))
    n = eta.shape[1]
    return [flat[k * n : (k + 1) * n] for k in range(eta.shape[0])]


def noise_corrected_sigma(records: Sequence[Sequence[CountRecord]]) -> NoiseCorrectedSigma:
    """Separabilities from background-subtracted count rates with Poisson errors."""
    signal = np.array([[r.signal_counts for r in row] for row in records], dtype=float)
    noise = np.array([[r.noise_counts for r in row] for row in records], dtype=float)
    duration = np.array([[r.duration_s for r in row] for row in records], dtype=float)
    if signal.ndim != 2 or signal.shape[0] > signal.shape[1]:
        raise DomainError("records must form a K x J grid with K <= J")

    difference = signal - noise
    spread = np.sqrt(signal + noise)
    suspicious = difference < -3.0 * spread
    if np.any(suspicious):
        pairs = [tuple(int(v) for v in idx) for idx in np.argwhere(suspicious)]
        warnings.warn(
            f"noise-corrected counts are negative beyond 3 sigma for (k, j) = {pairs}",
            DataQualityWarning,
            stacklevel=2,
        )
    proxy = np.clip(difference, 0.0, None) / duration
    variance = (signal + noise) / duration**2

    sigma = np.empty(proxy.shape[0])
    stderr = np.empty(proxy.shape[0])
    for k, row in enumerate(proxy):
        sigma[k] = separability(row, k)
        total = row.sum()
        gradient = -row[k] / total**2 * np.ones_like(row)
        gradient[k] = (total - row[k]) / total**2
        stderr[k] = np.sqrt(np.sum(gradient**2 * variance[k]))
    logger.info("noise-corrected separabilities %s", np.round(sigma, 4).tolist())
    return NoiseCorrectedSigma(sigma, stderr, proxy)
