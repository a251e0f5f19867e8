"""Pipeline configuration: one JSON document per run, validated by pydantic.

Environment defaults (also read from a local ``.env``):
  MODESORT_OUTPUT_DIR  default output directory
  MODESORT_WORKERS     default size of the worker pools
"""

import hashlib
import json
import os
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .counting import CountingConfig
from .errors import ConfigError
from .field import TimeFrequencyGrid
from .propagation import WaveguideSpec
from .spsa import SPSAConfig

try:
    from dotenv import load_dotenv  # type: ignore
    load_dotenv()
except Exception:
    pass

SCHEMA_VERSION = 1


def default_output_dir() -> str:
    return os.getenv("MODESORT_OUTPUT_DIR", "runs")


def default_workers() -> Optional[int]:
    value = os.getenv("MODESORT_WORKERS")
    return int(value) if value else None


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridSection(Section):
    n_samples: int = 4096
    dt_ps: float = Field(200.0 / 4096, gt=0)

    def build(self) -> TimeFrequencyGrid:
        return TimeFrequencyGrid(self.n_samples, self.dt_ps)


class SPDCSection(Section):
    pump_width_ps: float = Field(30.0, gt=0)
    pump_sg_order: int = Field(4, ge=1)
    filter_bw_nm: float = Field(2.4, gt=0)
    phasematch_bw_thz: float = Field(2.0, gt=0)
    signal_wavelength_nm: float = Field(1532.1, gt=0)
    n_modes: int = Field(4, ge=1)


class WaveguideSection(Section):
    length_mm: float = 52.0
    shg_efficiency_pct_per_w: float = 1600.0
    signal_wavelength_nm: float = 1532.1
    pump_wavelength_nm: float = 1556.6
    pump_walkoff_ps_per_mm: float = 0.002
    sf_walkoff_ps_per_mm: float = 1.0
    gvd_signal_ps2_per_mm: float = 1.0e-4
    gvd_pump_ps2_per_mm: float = 1.0e-4
    gvd_sf_ps2_per_mm: float = 3.5e-4
    delta_k0_per_mm: float = 0.0
    pm_ripple: float = 0.0
    pm_ripple_period_mm: float = 5.0
    kappa: Optional[float] = None
    calibrate_kappa: bool = False

    def build(self) -> WaveguideSpec:
        return WaveguideSpec(**self.model_dump(exclude={"calibrate_kappa"}))


class DesignSection(Section):
    power_budget_mw: float = Field(300.0, gt=0)
    warm_start: Literal["rayleigh", "time_reversed"] = "rayleigh"
    n_lines: int = 17
    spacing_ghz: float = Field(20.0, gt=0)
    n_steps: int = Field(200, ge=1)
    maxiter: int = Field(200, ge=0)
    restarts: int = Field(5, ge=1)


class CombSection(Section):
    center_wavelength_nm: float = 1556.6
    n_lines: int = 17
    spacing_ghz: float = Field(20.0, gt=0)
    chirp_coeffs: List[float] = Field(default_factory=lambda: [0.05, 0.004])
    reference_pair: Tuple[int, int] = (-8, -7)
    flatten_reference: bool = False


class AlignSection(Section):
    reference: str = "S1"
    shifts_ps: Dict[str, float] = Field(default_factory=lambda: {"S3": 1.3, "S6": 1.8})
    tau_min_ps: float = -5.0
    tau_max_ps: float = 5.0
    tau_step_ps: float = Field(0.1, gt=0)
    use_ideal: bool = True
    shaping_amplitude_error: float = Field(0.0, ge=0)
    shaping_phase_error: float = Field(0.0, ge=0)

    def tau_grid(self):
        n = int(round((self.tau_max_ps - self.tau_min_ps) / self.tau_step_ps))
        return self.tau_min_ps + self.tau_step_ps * np.arange(n + 1)


class FeedbackSection(Section):
    pump: str = "P3"
    signal: str = "S3"
    meter_noise_frac: float = Field(0.01, ge=0)
    perturbation_rad: float = Field(0.4, ge=0)
    signal_power_uw: float = Field(120.0, gt=0)
    n_steps: int = Field(200, ge=1)


class SweepSection(Section):
    delay_step_ps: float = Field(0.2, gt=0)
    delay_span_ps: float = Field(1.0, ge=0)
    power_step_mw: float = Field(5.0, gt=0)
    power_span_mw: float = Field(10.0, ge=0)
    n_steps: int = Field(200, ge=1)

    def delay_grid(self):
        n = int(round(self.delay_span_ps / self.delay_step_ps))
        return self.delay_step_ps * np.arange(-n, n + 1)

    def power_offsets(self):
        n = int(round(self.power_span_mw / self.power_step_mw))
        return self.power_step_mw * np.arange(-n, n + 1)


def _feedback_spsa() -> SPSAConfig:
    return SPSAConfig(max_iters=40, target_step=0.1, stability=5.0)


class ModesortConfig(Section):
    schema_version: int = SCHEMA_VERSION
    seed: int = 0
    output_dir: str = Field(default_factory=default_output_dir)
    workers: Optional[int] = Field(default_factory=default_workers)
    grid: GridSection = Field(default_factory=GridSection)
    spdc: SPDCSection = Field(default_factory=SPDCSection)
    waveguide: WaveguideSection = Field(default_factory=WaveguideSection)
    design: DesignSection = Field(default_factory=DesignSection)
    comb: CombSection = Field(default_factory=CombSection)
    align: AlignSection = Field(default_factory=AlignSection)
    spsa: SPSAConfig = Field(default_factory=_feedback_spsa)
    feedback: FeedbackSection = Field(default_factory=FeedbackSection)
    counting: CountingConfig = Field(default_factory=CountingConfig)
    sweep: SweepSection = Field(default_factory=SweepSection)

    @field_validator("schema_version")
    @classmethod
    def supported_version(cls, value: int) -> int:
        if value != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {value}; this release reads version {SCHEMA_VERSION}")
        return value

    def canonical_json(self) -> str:
        return self.model_dump_json(indent=2, exclude={"output_dir", "workers"})

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def _line_of(text: str, loc: Sequence[Union[str, int]]) -> Optional[int]:
    """1-based line where the key path ``loc`` appears in the JSON text."""
    position = 0
    found = None
    for key in loc:
        if not isinstance(key, str):
            continue
        index = text.find(json.dumps(key), position)
        if index < 0:
            break
        position = found = index
    return None if found is None else text.count("\n", 0, found) + 1


def parse_config(text: str, source: str = "<config>") -> ModesortConfig:
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}, line {exc.lineno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{source}, line 1: the configuration must be a JSON object")
    try:
        return ModesortConfig.model_validate(data)
    except ValidationError as exc:
        messages = []
        for error in exc.errors():
            path = ".".join(str(part) for part in error["loc"]) or "<root>"
            line = _line_of(text, error["loc"])
            where = f"line {line}" if line else "line ?"
            messages.append(f"{source}, {where}: {path}: {error['msg']}")
        raise ConfigError("\n".join(messages)) from exc


def load_config(path: Optional[Union[str, Path]] = None) -> ModesortConfig:
    """Read a config file; ``None`` gives the built-in defaults."""
    if path is None:
        return ModesortConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigError(f"{path}: configuration file not found") from exc
    return parse_config(text, str(path))
