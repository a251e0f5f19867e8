"""Schmidt decomposition of the JSA into signal temporal modes."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import BasisError, DomainError, NormalizationError, RankError
from ..field import ComplexEnvelope, TimeFrequencyGrid, Units, inner_product, to_samples
from .jsa import JointSpectralAmplitude

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10
ORTHONORMAL_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class TemporalModeSet:
    modes: Tuple[ComplexEnvelope, ...]
    labels: Tuple[str, ...]
    schmidt_coefficients: Optional[np.ndarray] = None
    captured_weight: Optional[float] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.modes) != len(self.labels):
            raise DomainError("every mode needs exactly one label")
        if not self.modes:
            raise DomainError("a mode set needs at least one mode")
        grid = self.modes[0].grid
        for mode in self.modes[1:]:
            grid.require_same(mode.grid)

    @classmethod
    def from_envelopes(cls, modes: Iterable[ComplexEnvelope], labels: Iterable[str], **metadata) -> "TemporalModeSet":
        return cls(tuple(modes), tuple(labels), metadata=dict(metadata))

    def __len__(self) -> int:
        return len(self.modes)

    def __getitem__(self, key: Union[int, str]) -> ComplexEnvelope:
        if isinstance(key, str):
            return self.modes[self.labels.index(key)]
        return self.modes[key]

    @property
    def grid(self) -> TimeFrequencyGrid:
        return self.modes[0].grid

    def subset(self, labels: Sequence[str]) -> "TemporalModeSet":
        return TemporalModeSet.from_envelopes([self[label] for label in labels], labels, **self.metadata)

    def samples_matrix(self) -> np.ndarray:
        """Modes as rows, shape (n_modes, n_samples)."""
        return np.stack([m.samples for m in self.modes])

    def gram(self) -> np.ndarray:
        rows = self.samples_matrix()
        return rows.conj() @ rows.T * self.grid.dt

    def orthonormality_error(self) -> float:
        return float(np.max(np.abs(self.gram() - np.eye(len(self)))))

    def require_orthonormal(self, tol: float = 1e-6) -> None:
        err = self.orthonormality_error()
        if err > tol:
            raise BasisError(f"mode set is not orthonormal (max |G - I| = {err:.3e})")


def schmidt_spectra(jsa: JointSpectralAmplitude, n_modes: int):
    """Top ``n_modes`` singular triplets (coefficients, signal vectors, idler vectors)."""
    u, s, vh = np.linalg.svd(jsa.amplitude, full_matrices=False)
    rank = int(np.sum(s > RANK_TOLERANCE * s[0]))
    if n_modes < 1 or n_modes > rank:
        raise RankError(f"requested {n_modes} modes but the discretized JSA has rank {rank}")
    return s[:n_modes], u[:, :n_modes], vh[:n_modes].conj().T


def _pin_phase(spectrum: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(spectrum)))
    return spectrum * np.exp(-1j * np.angle(spectrum[k]))


def schmidt_decompose(
    jsa: JointSpectralAmplitude,
    n_modes: int = 4,
    *,
    wavelength_nm: Optional[float] = None,
    label_prefix: str = "S",
) -> TemporalModeSet:
    """Signal-side Schmidt modes as unit-norm, quantum-normalised envelopes.

    Each mode's global phase is fixed so that its largest spectral sample is
    real and positive; real JSAs then give real (0 / pi) mode spectra.
    """
    coefficients, u, _ = schmidt_spectra(jsa, n_modes)
    grid = jsa.grid
    wavelength_nm = wavelength_nm or jsa.params.get("signal_wavelength_nm", 1532.1)
    modes: List[ComplexEnvelope] = []
    for j in range(n_modes):
        spectrum = np.zeros(grid.n_samples, dtype=complex)
        spectrum[jsa.signal_index] = _pin_phase(u[:, j]) / np.sqrt(grid.df)
        modes.append(ComplexEnvelope(grid, to_samples(spectrum, grid.dt), wavelength_nm, Units.QUANTUM))
    captured = float(np.sum(coefficients**2))
    labels = [f"{label_prefix}{j + 1}" for j in range(n_modes)]
    result = TemporalModeSet(
        tuple(modes),
        tuple(labels),
        schmidt_coefficients=coefficients / np.sqrt(captured),
        captured_weight=captured,
        metadata={"jsa": dict(jsa.params)},
    )
    logger.info(
        "Schmidt decomposition: %d modes, relative coefficients %s",
        n_modes,
        np.round(coefficients / coefficients[0], 4).tolist(),
    )
    return result


def superpose(
    modes: TemporalModeSet,
    coeffs: Sequence[complex],
    indices: Optional[Sequence[int]] = None,
) -> ComplexEnvelope:
    """sum_j c_j * mode_j over the first ``len(coeffs)`` modes (or ``indices``)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    indices = list(range(len(coeffs))) if indices is None else list(indices)
    if len(indices) != len(coeffs) or max(indices) >= len(modes):
        raise DomainError("coefficient count does not match the modes used")
    weight = float(np.sum(np.abs(coeffs) ** 2))
    if abs(weight - 1.0) > 1e-12:
        raise NormalizationError(f"superposition coefficients have sum |c|^2 = {weight!r}, expected 1")
    samples = sum(c * modes[i].samples for c, i in zip(coeffs, indices))
    return modes[indices[0]].with_samples(samples)


def alphabets(modes: TemporalModeSet) -> Dict[str, TemporalModeSet]:
    """The two four-mode bases: {S1..S4} and {S3, S4, S5, S6}."""
    if len(modes) < 4:
        raise RankError("the two alphabets need at least four Schmidt modes")
    s5 = superpose(modes, [1 / np.sqrt(2), 1 / np.sqrt(2)])
    s6 = superpose(modes, [1 / np.sqrt(2), -1 / np.sqrt(2)])
    first = TemporalModeSet.from_envelopes(modes.modes[:4], ("S1", "S2", "S3", "S4"))
    second = TemporalModeSet.from_envelopes(
        (modes[2], modes[3], s5, s6), ("S3", "S4", "S5", "S6")
    )
    return {"A": first, "B": second}


def all_signals(modes: TemporalModeSet) -> TemporalModeSet:
    """S1..S6 in one set (not mutually orthogonal: S5, S6 span S1, S2)."""
    sets = alphabets(modes)
    return TemporalModeSet.from_envelopes(
        sets["A"].modes + sets["B"].modes[2:], ("S1", "S2", "S3", "S4", "S5", "S6")
    )


def count_lobes(envelope: ComplexEnvelope, threshold: float = 0.05) -> int:
    """Number of intensity maxima above ``threshold`` times the peak."""
    intensity = envelope.intensity()
    floor = threshold * intensity.max()
    mid = intensity[1:-1]
    peaks = (mid > intensity[:-2]) & (mid >= intensity[2:]) & (mid > floor)
    return int(np.count_nonzero(peaks))


def mode_overlap(a: ComplexEnvelope, b: ComplexEnvelope) -> float:
    """Normalised fidelity |<a|b>|^2 / (|a|^2 |b|^2)."""
    return abs(inner_product(a, b)) ** 2 / (a.norm2() * b.norm2())
