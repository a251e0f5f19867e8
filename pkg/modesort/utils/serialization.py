"""CSV and JSON readers/writers for envelopes, mode sets, combs, masks and tables."""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import numpy as np

from ..comb import CombSpec, WaveshaperMask
from ..errors import ArtifactMissingError, DomainError
from ..field import ComplexEnvelope, TimeFrequencyGrid, Units
from ..spdc import TemporalModeSet

PathLike = Union[str, Path]
FLOAT_FORMAT = "%.17g"


def _require(path: Path, hint: str = "") -> Path:
    if not path.exists():
        raise ArtifactMissingError(f"{path} not found{'; ' + hint if hint else ''}")
    return path


def write_text(path: PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    return path


def write_json(path: PathLike, data: Any) -> Path:
    return write_text(path, json.dumps(data, indent=2, sort_keys=True))


def read_json(path: PathLike, hint: str = "") -> Any:
    return json.loads(_require(Path(path), hint).read_text(encoding="utf-8"))


def write_table(path: PathLike, columns: Sequence[str], rows: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.atleast_2d(rows), delimiter=",", header=",".join(columns), comments="", fmt=FLOAT_FORMAT)
    return path


def read_table(path: PathLike, hint: str = "") -> Dict[str, np.ndarray]:
    path = _require(Path(path), hint)
    with path.open(encoding="utf-8") as handle:
        columns = handle.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, i] for i, name in enumerate(columns)}


def write_envelope_csv(path: PathLike, envelope: ComplexEnvelope) -> Path:
    """``# {json header}`` line, then ``t_ps,re,im`` columns."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "grid": envelope.grid.to_dict(),
        "wavelength_nm": float(envelope.wavelength_nm),
        "units": envelope.units.value,
    }
    rows = np.column_stack([envelope.grid.t, envelope.samples.real, envelope.samples.imag])
    with path.open("w", encoding="utf-8") as handle:
        handle.write("# " + json.dumps(header, sort_keys=True) + "\n")
        handle.write("t_ps,re,im\n")
        np.savetxt(handle, rows, delimiter=",", fmt=FLOAT_FORMAT)
    return path


def read_envelope_csv(path: PathLike) -> ComplexEnvelope:
    path = _require(Path(path))
    with path.open(encoding="utf-8") as handle:
        first = handle.readline()
    if not first.startswith("# "):
        raise DomainError(f"{path}: missing envelope header line")
    header = json.loads(first[2:])
    data = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
    grid = TimeFrequencyGrid.from_dict(header["grid"])
    return ComplexEnvelope(grid, data[:, 1] + 1j * data[:, 2], header["wavelength_nm"], Units(header["units"]))


def write_mode_set(
    directory: PathLike,
    modes: TemporalModeSet,
    manifest_text: str,
    manifest_name: str = "modes_manifest.json",
) -> List[Path]:
    """One envelope CSV per mode, a combined ``modes.csv`` and the manifest."""
    directory = Path(directory)
    paths = [write_envelope_csv(directory / f"{label}.csv", mode) for label, mode in zip(modes.labels, modes.modes)]
    columns = ["t_ps"] + [f"{part}_{label}" for label in modes.labels for part in ("re", "im")]
    parts = [modes.grid.t] + [p for mode in modes.modes for p in (mode.samples.real, mode.samples.imag)]
    paths.append(write_table(directory / "modes.csv", columns, np.column_stack(parts)))
    paths.append(write_text(directory / manifest_name, manifest_text))
    return paths


def read_mode_set(directory: PathLike, labels: Iterable[str]) -> TemporalModeSet:
    directory = Path(directory)
    labels = list(labels)
    envelopes = []
    for label in labels:
        path = directory / f"{label}.csv"
        _require(path, "run the 'modes' command first")
        envelopes.append(read_envelope_csv(path))
    return TemporalModeSet.from_envelopes(envelopes, labels)


def write_comb_json(path: PathLike, comb: CombSpec) -> Path:
    return write_json(path, comb.to_dict())


def read_comb_json(path: PathLike) -> CombSpec:
    return CombSpec.from_dict(read_json(path))


def write_mask_csv(path: PathLike, mask: WaveshaperMask) -> Path:
    rows = np.column_stack([mask.frequencies_ghz, mask.attenuation_db, mask.phase_rad])
    return write_table(path, ["freq_GHz", "att_dB", "phase_rad"], rows)


def read_mask_csv(path: PathLike) -> WaveshaperMask:
    table = read_table(path)
    freq = table["freq_GHz"]
    steps = np.diff(freq)
    if freq.size < 1 or (steps.size and not np.allclose(steps, steps[0])):
        raise DomainError(f"{path}: mask bins must be uniformly spaced")
    resolution = float(steps[0]) if steps.size else 1.0
    return WaveshaperMask(table["att_dB"], table["phase_rad"], float(freq[0]), resolution)


def write_mask_json(path: PathLike, mask: WaveshaperMask) -> Path:
    return write_json(path, mask.to_dict())


def read_mask_json(path: PathLike) -> WaveshaperMask:
    return WaveshaperMask.from_dict(read_json(path))


def write_matrix_csv(path: PathLike, matrix: np.ndarray, row_labels: Sequence[str], col_labels: Sequence[str]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["pump," + ",".join(col_labels)]
    for label, row in zip(row_labels, np.asarray(matrix, dtype=float)):
        lines.append(label + "," + ",".join(FLOAT_FORMAT % v for v in row))
    return write_text(path, "\n".join(lines))
