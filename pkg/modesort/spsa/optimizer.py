"""Simultaneous-perturbation stochastic approximation on a circle of phases."""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..comb import wrap_phase
from ..errors import SPSAAbortError

logger = logging.getLogger(__name__)


class SPSAConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    a0: float = Field(0.2, gt=0)
    c0: float = Field(0.15, gt=0)
    alpha: float = Field(0.602, gt=0.5, le=1.0)
    gamma: float = Field(0.101, gt=0.0, le=0.5)
    stability: float = Field(0.0, ge=0)
    target_step: Optional[float] = Field(None, gt=0)
    calibration_samples: int = Field(4, ge=1)
    max_iters: int = Field(100, ge=0)
    seed: int = 0
    direction: Literal["maximize", "minimize"] = "maximize"
    plateau_window: int = Field(10, ge=1)
    plateau_tol: float = Field(0.005, ge=0)
    stop_on_plateau: bool = False

    @field_validator("direction", mode="before")
    @classmethod
    def lower_direction(cls, value):
        return value.lower() if isinstance(value, str) else value

    @property
    def sign(self) -> float:
        return 1.0 if self.direction == "maximize" else -1.0

    def gain(self, k: int, a0: Optional[float] = None) -> float:
        return (self.a0 if a0 is None else a0) / (k + 1 + self.stability) ** self.alpha

    def perturbation(self, k: int) -> float:
        return self.c0 / (k + 1) ** self.gamma


@dataclass
class SPSAResult:
    theta_best: np.ndarray
    best_value: float
    trace: List[float] = field(default_factory=list)
    best_trace: List[float] = field(default_factory=list)
    plateau_iteration: Optional[int] = None
    a0: Optional[float] = None
    theta_trace: List[np.ndarray] = field(default_factory=list)


def _evaluate(objective: Callable[[np.ndarray], float], theta: np.ndarray, trace: List[float]) -> float:
    value = float(objective(theta))
    if not np.isfinite(value):
        raise SPSAAbortError(f"objective returned {value} after {len(trace)} iterations", trace=list(trace))
    return value


def _gradient(objective, theta, c, rng, trace) -> np.ndarray:
    delta = rng.choice([-1.0, 1.0], size=theta.size)
    plus = _evaluate(objective, wrap_phase(theta + c * delta), trace)
    minus = _evaluate(objective, wrap_phase(theta - c * delta), trace)
    return (plus - minus) / (2.0 * c) * delta


def calibrate_gain(
    objective: Callable[[np.ndarray], float],
    theta: np.ndarray,
    cfg: SPSAConfig,
    rng: np.random.Generator,
) -> float:
    """a0 such that the first step moves each phase by about ``target_step``."""
    c = cfg.perturbation(0)
    magnitudes = [np.mean(np.abs(_gradient(objective, theta, c, rng, []))) for _ in range(cfg.calibration_samples)]
    mean = float(np.mean(magnitudes))
    if not mean > 0:
        return cfg.a0
    return cfg.target_step * (1.0 + cfg.stability) ** cfg.alpha / mean


def find_plateau(best_trace: List[float], window: int, tol: float) -> Optional[int]:
    """First iteration whose best-so-far changed by less than ``tol`` (relative)
    over the preceding ``window`` iterations."""
    for k in range(window, len(best_trace)):
        before = best_trace[k - window]
        scale = abs(before) if before != 0 else 1.0
        if abs(best_trace[k] - before) <= tol * scale:
            return k
    return None


def spsa_optimize(
    objective: Callable[[np.ndarray], float],
    theta0: np.ndarray,
    cfg: Optional[SPSAConfig] = None,
) -> SPSAResult:
    """Two-sided SPSA with Rademacher perturbations.

    Each iteration evaluates the objective at theta +/- c_k delta and once
    more at the updated theta; that last value is the trace entry. The best
    value is the largest (maximize) or smallest (minimize) one seen.
    """
    cfg = cfg or SPSAConfig()
    rng = np.random.default_rng(cfg.seed)
    sign = cfg.sign
    theta = wrap_phase(np.asarray(theta0, dtype=float))
    trace: List[float] = []
    best_trace: List[float] = []
    theta_trace: List[np.ndarray] = []
    best_theta = theta.copy()
    best_value = _evaluate(objective, theta, trace)

    a0 = calibrate_gain(objective, theta, cfg, rng) if cfg.target_step and cfg.max_iters else cfg.a0
    plateau = None
    for k in range(cfg.max_iters):
        g = _gradient(objective, theta, cfg.perturbation(k), rng, trace)
        theta = wrap_phase(theta + sign * cfg.gain(k, a0) * g)
        value = _evaluate(objective, theta, trace)
        trace.append(value)
        theta_trace.append(theta.copy())
        if sign * value > sign * best_value:
            best_value, best_theta = value, theta.copy()
        best_trace.append(best_value)
        logger.debug("SPSA iteration %d: objective %.6g, best %.6g", k, value, best_value)
        if plateau is None:
            plateau = find_plateau(best_trace, cfg.plateau_window, cfg.plateau_tol)
            if plateau is not None and cfg.stop_on_plateau:
                break
    return SPSAResult(best_theta, best_value, trace, best_trace, plateau, a0, theta_trace)
