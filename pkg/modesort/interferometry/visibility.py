"""Mach-Zehnder visibility between two pulse envelopes.

One arm carries ``a``, the other ``b`` delayed by ``tau``; sweeping the
relative phase produces fringes in the average detected power whose
visibility is 2 |<a, b_tau>| / (|a|^2 + |b|^2).
"""

from typing import Optional, Sequence

import numpy as np

from ..errors import DomainError
from ..field import ComplexEnvelope, apply_delay, inner_product


def _norms(a: ComplexEnvelope, b: ComplexEnvelope) -> float:
    a.grid.require_same(b.grid)
    total = a.norm2() + b.norm2()
    if not (a.norm2() > 0 and b.norm2() > 0):
        raise DomainError("visibility needs light in both arms")
    return total


def visibility(a: ComplexEnvelope, b: ComplexEnvelope, tau: float = 0.0) -> float:
    total = _norms(a, b)
    return float(min(2.0 * abs(inner_product(a, apply_delay(b, tau))) / total, 1.0))


def visibility_scan(a: ComplexEnvelope, b: ComplexEnvelope, taus: Sequence[float]) -> np.ndarray:
    """V(tau) for many delays at once, evaluated through the cross spectrum."""
    total = _norms(a, b)
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if np.any(np.abs(taus) >= a.grid.window / 4):
        raise DomainError(f"delays must stay within a quarter of the {a.grid.window} ps window")
    cross = np.conj(a.to_frequency()) * b.to_frequency() * a.grid.df
    overlaps = np.exp(-2j * np.pi * np.multiply.outer(taus, a.grid.f)) @ cross
    return np.minimum(2.0 * np.abs(overlaps) / total, 1.0)


def fringe_powers(a: ComplexEnvelope, b: ComplexEnvelope, tau: float, phases: np.ndarray) -> np.ndarray:
    """Average power at one output port for each relative phase."""
    delayed = apply_delay(b, tau)
    fields = a.samples[None, :] + np.exp(1j * phases)[:, None] * delayed.samples[None, :]
    return 0.5 * np.sum(np.abs(fields) ** 2, axis=1) * a.grid.dt


def fringe_visibility(
    a: ComplexEnvelope,
    b: ComplexEnvelope,
    tau: float = 0.0,
    n_phase: int = 64,
    *,
    method: str = "minmax",
    noise_sigma: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Visibility read from a simulated fringe-stretcher sweep.

    ``minmax`` forms (max - min) / (max + min) of the sampled powers; ``fit``
    fits A + B cos(phi) + C sin(phi) and returns sqrt(B^2 + C^2) / A.
    ``noise_sigma`` adds Gaussian detector noise relative to the mean power.
    """
    _norms(a, b)
    if n_phase < 3:
        raise DomainError("a fringe needs at least three phase samples")
    phases = 2.0 * np.pi * np.arange(n_phase) / n_phase
    powers = fringe_powers(a, b, tau, phases)
    if noise_sigma > 0:
        rng = rng or np.random.default_rng()
        powers = powers + noise_sigma * powers.mean() * rng.standard_normal(n_phase)
    if method == "minmax":
        high, low = powers.max(), powers.min()
        return float(np.clip((high - low) / (high + low), 0.0, 1.0))
    if method == "fit":
        design = np.column_stack([np.ones(n_phase), np.cos(phases), np.sin(phases)])
        (offset, c, s), *_ = np.linalg.lstsq(design, powers, rcond=None)
        return float(np.clip(np.hypot(c, s) / offset, 0.0, 1.0))
    raise DomainError(f"unknown fringe method {method!r}")
