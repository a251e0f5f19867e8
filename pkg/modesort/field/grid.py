"""Uniform time/frequency lattice shared by every envelope.

FFT convention: the forward transform uses exp(-i 2 pi f t). Time samples are
centred, ``t_n = (n - N/2) dt``, and so are frequency offsets,
``f_k = (k - N/2) df`` with ``df = 1 / (N dt)``. Frequencies are in THz and
times in ps throughout the package.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict

import numpy as np

from ..errors import DomainError, GridMismatchError

DEFAULT_N_SAMPLES = 4096
DEFAULT_DT_PS = 200.0 / 4096


@dataclass(frozen=True)
class TimeFrequencyGrid:
    n_samples: int = DEFAULT_N_SAMPLES
    dt: float = DEFAULT_DT_PS
    f_center: float = 0.0

    def __post_init__(self):
        n = int(self.n_samples)
        if n < 2 or n & (n - 1):
            raise DomainError(f"n_samples must be a power of two, got {self.n_samples}")
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")

    @classmethod
    def default(cls, f_center: float = 0.0) -> "TimeFrequencyGrid":
        return cls(DEFAULT_N_SAMPLES, DEFAULT_DT_PS, f_center)

    @property
    def df(self) -> float:
        return 1.0 / (self.n_samples * self.dt)

    @property
    def window(self) -> float:
        return self.n_samples * self.dt

    @cached_property
    def t(self) -> np.ndarray:
        t = (np.arange(self.n_samples) - self.n_samples // 2) * self.dt
        t.flags.writeable = False
        return t

    @cached_property
    def f(self) -> np.ndarray:
        f = (np.arange(self.n_samples) - self.n_samples // 2) * self.df
        f.flags.writeable = False
        return f

    @cached_property
    def omega(self) -> np.ndarray:
        w = 2.0 * np.pi * self.f
        w.flags.writeable = False
        return w

    def index_of_frequency(self, f: float) -> int:
        """Lattice index of an exact frequency offset (THz)."""
        k = int(round(f / self.df)) + self.n_samples // 2
        if not 0 <= k < self.n_samples:
            raise DomainError(f"frequency offset {f} THz is outside the grid")
        return k

    def period_mask(self, period_ps: float) -> np.ndarray:
        """Boolean gate selecting one period ``[-T/2, T/2)`` around t = 0."""
        half = 0.5 * period_ps
        tol = 1e-9 * self.dt
        return (self.t >= -half - tol) & (self.t < half - tol)

    def compatible(self, other: "TimeFrequencyGrid") -> bool:
        return (
            self.n_samples == other.n_samples
            and np.isclose(self.dt, other.dt, rtol=1e-12, atol=0.0)
            and np.isclose(self.f_center, other.f_center, rtol=1e-12, atol=1e-12)
        )

    def require_same(self, other: "TimeFrequencyGrid") -> None:
        if not self.compatible(other):
            raise GridMismatchError(f"grid mismatch: {self.to_dict()} vs {other.to_dict()}")

    def to_dict(self) -> Dict[str, Any]:
        return {"n_samples": int(self.n_samples), "dt_ps": float(self.dt), "f_center_thz": float(self.f_center)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TimeFrequencyGrid":
        return cls(int(data["n_samples"]), float(data["dt_ps"]), float(data.get("f_center_thz", 0.0)))
