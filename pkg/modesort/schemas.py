"""Pydantic document models for the JSON artifacts written by the pipeline."""

import json
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, model_validator


class Document(BaseModel):
    model_config = ConfigDict(extra="forbid")

    def canonical_json(self) -> str:
        return self.model_dump_json(indent=2)


class ModesManifest(Document):
    labels: List[str]
    files: List[str]
    schmidt_coefficients: List[float]
    schmidt_ratios: List[float]
    captured_weight: Optional[float] = None
    gram_offdiag_max: float
    grid: Dict[str, float]
    parameters: Dict[str, Any]


class PumpEntry(Document):
    label: str
    target: str
    basis: List[str]
    eta_row: List[float]
    separability: float
    selectivity: float
    power_mw: float
    warm_start: str
    warm_start_selectivity: float
    converged: bool
    comb: Dict[str, Any]


class PumpsManifest(Document):
    pumps: List[PumpEntry]

    def by_label(self) -> Dict[str, PumpEntry]:
        return {p.label: p for p in self.pumps}


class ConversionReportDocument(Document):
    alphabet: str
    pump_labels: List[str]
    signal_labels: List[str]
    eta: List[List[float]]
    separabilities: List[float]
    selectivities: List[float]
    optimal_delay_ps: List[float]
    optimal_power_mw: List[float]
    qkd: Optional[Dict[str, float]] = None
    photon_counting_sigma: Optional[List[float]] = None
    photon_counting_stderr: Optional[List[float]] = None
    metadata: Dict[str, Any] = {}

    @model_validator(mode="after")
    def check_shapes(self) -> "ConversionReportDocument":
        rows, cols = len(self.pump_labels), len(self.signal_labels)
        if len(self.eta) != rows or any(len(row) != cols for row in self.eta):
            raise ValueError(f"eta must be {rows}x{cols}")
        for name in ("separabilities", "selectivities", "optimal_delay_ps", "optimal_power_mw"):
            if len(getattr(self, name)) != rows:
                raise ValueError(f"{name} needs one entry per pump")
        return self


class RunManifest(Document):
    command: str
    config_sha256: str
    seed: int
    versions: Dict[str, str]
    outputs: List[str]


def load_document(model, payload: Any):
    """Validate a JSON string or an already-parsed mapping against ``model``."""
    data = json.loads(payload) if isinstance(payload, str) else payload
    return model.model_validate(data)
