"""Batch commands. Each reads a ModesortConfig, writes its artifacts into the
output directory together with ``run_manifest_<command>.json`` and returns a CommandResult."""

import logging
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from .. import __version__
from ..comb import CombSpec, WaveshaperMask, beat_delay, chirp_correct, emulate_shaping, generate_chirped_comb
from ..comb import residual_nonlinear_phase
from ..config import ModesortConfig
from ..counting import noise_corrected_sigma, simulate_count_matrix
from ..errors import ArtifactMissingError
from ..field import apply_delay
from ..interferometry import align_set, visibility
from ..plots import draw_eta_heatmap, draw_modes, draw_spsa_trace, draw_visibility_scan
from ..propagation import ConversionReport, WaveguideSpec, calibrate_kappa, eta_row
from ..pump_design import design_pumps
from ..schemas import (
    ConversionReportDocument,
    ModesManifest,
    PumpEntry,
    PumpsManifest,
    RunManifest,
    load_document,
)
from ..spdc import TemporalModeSet, all_signals, build_jsa, schmidt_decompose
from ..spsa import perturb_phases, pump_phase_feedback, suppress_crosstalk
from ..utils import (
    read_json,
    read_mode_set,
    write_comb_json,
    write_envelope_csv,
    write_json,
    write_mask_csv,
    write_matrix_csv,
    write_mode_set,
    write_table,
    write_text,
)
from .experiment import ALPHABETS, SIGNAL_LABELS, measure_alphabet

logger = logging.getLogger(__name__)

LIBRARIES = ("numpy", "scipy", "pydantic", "matplotlib")
PUMP_TARGETS = {"P1": ("A", "S1"), "P2": ("A", "S2"), "P3": ("A", "S3"), "P4": ("A", "S4"), "P5": ("B", "S5"), "P6": ("B", "S6")}


@dataclass
class CommandResult:
    command: str
    outputs: List[Path] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    exit_code: int = 0


def _versions() -> Dict[str, str]:
    versions = {"modesort": __version__}
    for name in LIBRARIES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def _finish(cfg: ModesortConfig, result: CommandResult) -> CommandResult:
    out = Path(cfg.output_dir)
    names = sorted(str(p.relative_to(out)) if p.is_relative_to(out) else str(p) for p in result.outputs)
    manifest = RunManifest(
        command=result.command,
        config_sha256=cfg.sha256(),
        seed=cfg.seed,
        versions=_versions(),
        outputs=names,
    )
    result.outputs.append(write_text(out / f"run_manifest_{result.command}.json", manifest.canonical_json()))
    logger.info("%s finished: %d artifacts in %s", result.command, len(result.outputs), out)
    return result


def build_waveguide(cfg: ModesortConfig) -> WaveguideSpec:
    wg = cfg.waveguide.build()
    if cfg.waveguide.calibrate_kappa and cfg.waveguide.kappa is None:
        wg = calibrate_kappa(wg)
    return wg


def simulate_modes(cfg: ModesortConfig) -> TemporalModeSet:
    jsa = build_jsa(
        cfg.spdc.pump_width_ps,
        cfg.spdc.pump_sg_order,
        cfg.spdc.filter_bw_nm,
        cfg.spdc.phasematch_bw_thz,
        grid=cfg.grid.build(),
        signal_wavelength_nm=cfg.spdc.signal_wavelength_nm,
    )
    return schmidt_decompose(jsa, cfg.spdc.n_modes)


def load_signals(cfg: ModesortConfig) -> TemporalModeSet:
    return read_mode_set(cfg.output_dir, SIGNAL_LABELS)


def load_pump_combs(cfg: ModesortConfig) -> Dict[str, CombSpec]:
    manifest = load_document(PumpsManifest, read_json(Path(cfg.output_dir) / "pumps.json", "run the 'pumps' command first"))
    return {entry.label: CombSpec.from_dict(entry.comb) for entry in manifest.pumps}


def cmd_modes(cfg: ModesortConfig) -> CommandResult:
    schmidt = simulate_modes(cfg)
    modes = all_signals(schmidt) if len(schmidt) >= 4 else schmidt
    coefficients = schmidt.schmidt_coefficients
    manifest = ModesManifest(
        labels=list(modes.labels),
        files=[f"{label}.csv" for label in modes.labels],
        schmidt_coefficients=[float(c) for c in coefficients],
        schmidt_ratios=[float(c / coefficients[0]) for c in coefficients],
        captured_weight=schmidt.captured_weight,
        gram_offdiag_max=float(np.max(np.abs(schmidt.gram() - np.eye(len(schmidt))))),
        grid=schmidt.grid.to_dict(),
        parameters=cfg.spdc.model_dump(),
    )
    out = Path(cfg.output_dir)
    result = CommandResult("modes", write_mode_set(out, modes, manifest.canonical_json()))
    result.outputs.append(Path(draw_modes(schmidt, str(out / "modes.svg"))))
    result.summary = {"labels": manifest.labels, "schmidt_ratios": manifest.schmidt_ratios}
    return _finish(cfg, result)


def cmd_pumps(cfg: ModesortConfig) -> CommandResult:
    signals = load_signals(cfg)
    wg = build_waveguide(cfg)
    options = dict(
        power_budget=cfg.design.power_budget_mw,
        warm_start=cfg.design.warm_start,
        n_lines=cfg.design.n_lines,
        spacing_ghz=cfg.design.spacing_ghz,
        n_steps=cfg.design.n_steps,
        maxiter=cfg.design.maxiter,
        restarts=cfg.design.restarts,
        seed=cfg.seed,
    )
    designs = []
    for name, labels in ALPHABETS.items():
        basis = signals.subset(labels)
        wanted = [p for p, (alphabet, _) in PUMP_TARGETS.items() if alphabet == name]
        targets = [labels.index(PUMP_TARGETS[p][1]) for p in wanted]
        designs.extend(design_pumps(basis, wg, targets, wanted, max_workers=cfg.workers, **options))

    out = Path(cfg.output_dir)
    result = CommandResult("pumps")
    entries = []
    for design in designs:
        alphabet, target = PUMP_TARGETS[design.label]
        result.outputs.append(write_envelope_csv(out / f"{design.label}.csv", design.pump))
        result.outputs.append(write_comb_json(out / f"{design.label}_comb.json", design.comb))
        entries.append(
            PumpEntry(
                label=design.label,
                target=target,
                basis=list(ALPHABETS[alphabet]),
                eta_row=[float(x) for x in design.eta_row],
                separability=design.separability,
                selectivity=design.selectivity,
                power_mw=design.power_mw,
                warm_start=design.warm_start,
                warm_start_selectivity=design.warm_start_selectivity,
                converged=design.converged,
                comb=design.comb.to_dict(),
            )
        )
    result.outputs.append(write_text(out / "pumps.json", PumpsManifest(pumps=entries).canonical_json()))
    result.summary = {d.label: {"sigma": d.separability, "selectivity": d.selectivity} for d in designs}
    if not all(d.converged for d in designs):
        result.exit_code = 3
    return _finish(cfg, result)


def _report_document(report: ConversionReport, name: str, qkd: Optional[Dict[str, float]]) -> ConversionReportDocument:
    return ConversionReportDocument(
        alphabet=name,
        pump_labels=report.pump_labels,
        signal_labels=report.signal_labels,
        eta=report.eta.tolist(),
        separabilities=[float(x) for x in report.separabilities],
        selectivities=[float(x) for x in report.selectivities],
        optimal_delay_ps=[float(x) for x in report.optimal_delay],
        optimal_power_mw=[float(x) for x in report.optimal_power],
        qkd=qkd,
        metadata=dict(report.metadata),
    )


def cmd_matrix(cfg: ModesortConfig) -> CommandResult:
    signals = load_signals(cfg)
    combs = load_pump_combs(cfg)
    wg = build_waveguide(cfg)
    pumps = {label: comb.to_envelope(signals.grid) for label, comb in combs.items()}
    measurement = measure_alphabet(
        pumps,
        signals,
        wg,
        delay_grid=cfg.sweep.delay_grid(),
        power_offsets=cfg.sweep.power_offsets(),
        n_steps=cfg.sweep.n_steps,
        max_workers=cfg.workers,
    )
    out = Path(cfg.output_dir)
    result = CommandResult("matrix")
    qkd = measurement.qkd.to_dict()
    for name, report in measurement.reports.items():
        document = _report_document(report, name, qkd)
        result.outputs.append(write_text(out / f"report_{name}.json", document.canonical_json()))
        result.outputs.append(write_matrix_csv(out / f"eta_{name}.csv", report.eta, report.pump_labels, report.signal_labels))
        result.outputs.append(Path(draw_eta_heatmap(report, str(out / f"eta_{name}.svg"), f"alphabet {name}")))
    pump_labels = [f"P{k}" for k in range(1, 7)]
    result.outputs.append(write_matrix_csv(out / "eta_full.csv", measurement.eta, pump_labels, list(SIGNAL_LABELS)))
    rows = []
    for k, label in enumerate(pump_labels):
        sweep = measurement.sweeps[label]
        sigma = sweep.sigma()
        for i, d in enumerate(sweep.delays):
            for p, power in enumerate(sweep.powers):
                rows.append([k + 1, d, power, sweep.eta_target[i, p], sigma[i, p]])
    result.outputs.append(write_table(out / "sweeps.csv", ["pump", "delay_ps", "power_mw", "eta_kk", "sigma_k"], np.array(rows)))
    result.summary = {
        name: [float(x) for x in report.separabilities] for name, report in measurement.reports.items()
    }
    result.summary["qkd"] = qkd
    return _finish(cfg, result)


def cmd_spsa(cfg: ModesortConfig) -> CommandResult:
    signals = load_signals(cfg)
    combs = load_pump_combs(cfg)
    wg = build_waveguide(cfg)
    fb = cfg.feedback
    if fb.pump not in combs:
        raise ArtifactMissingError(f"pump {fb.pump} is not in pumps.json")
    rng = np.random.default_rng(cfg.seed)
    perturbed = perturb_phases(combs[fb.pump], fb.perturbation_rad, rng)
    spsa_cfg = cfg.spsa.model_copy(update={"seed": cfg.spsa.seed + cfg.seed})

    alphabet, target = PUMP_TARGETS.get(fb.pump, ("A", fb.signal))
    basis = signals.subset(ALPHABETS[alphabet])
    k = ALPHABETS[alphabet].index(target) if target in basis.labels else 0
    crosstalk = None
    if spsa_cfg.direction == "minimize" and fb.signal in basis.labels and fb.signal != target:
        crosstalk = suppress_crosstalk(
            perturbed,
            basis,
            k,
            basis.labels.index(fb.signal),
            wg,
            spsa_cfg,
            fb.meter_noise_frac,
            signal_power_uw=fb.signal_power_uw,
            n_steps=fb.n_steps,
        )
        feedback = crosstalk.feedback
        optimized = crosstalk.comb
    else:
        feedback = pump_phase_feedback(
            perturbed,
            signals[fb.signal],
            wg,
            spsa_cfg,
            fb.meter_noise_frac,
            signal_power_uw=fb.signal_power_uw,
            n_steps=fb.n_steps,
        )
        optimized = feedback.comb
    rows = {
        name: eta_row(comb.to_envelope(signals.grid), basis, wg, fb.n_steps)
        for name, comb in (("reference", combs[fb.pump]), ("perturbed", perturbed), ("optimized", optimized))
    }

    out = Path(cfg.output_dir)
    result = CommandResult("spsa")
    spsa = feedback.spsa
    n_iter = len(spsa.trace)
    thetas = np.array(spsa.theta_trace).reshape(n_iter, perturbed.n_lines)
    trace = np.column_stack([np.arange(1, n_iter + 1), spsa.trace, spsa.best_trace, thetas])
    columns = ["iter", "objective_uw", "best_uw"] + [f"theta_{int(m)}" for m in perturbed.indices]
    result.outputs.append(write_table(out / "spsa_trace.csv", columns, trace))
    result.outputs.append(Path(draw_spsa_trace(feedback.spsa, str(out / "spsa_trace.svg"))))
    result.outputs.append(write_comb_json(out / f"{fb.pump}_spsa_comb.json", optimized))
    summary = {
        "pump": fb.pump,
        "signal": fb.signal,
        "direction": spsa_cfg.direction,
        "sf_power_before_uw": feedback.sf_power_before_uw,
        "sf_power_after_uw": feedback.sf_power_after_uw,
        "plateau_iteration": feedback.spsa.plateau_iteration,
        "eta_rows": {name: [float(x) for x in row] for name, row in rows.items()},
        "sigma": {name: float(row[k] / row.sum()) for name, row in rows.items()},
    }
    if crosstalk is not None:
        summary["crosstalk_kept"] = crosstalk.accepted
    result.outputs.append(write_json(out / "spsa_summary.json", summary))
    result.summary = summary
    return _finish(cfg, result)


def cmd_counts(cfg: ModesortConfig) -> CommandResult:
    out = Path(cfg.output_dir)
    result = CommandResult("counts")
    summary: Dict[str, Any] = {}
    for index, name in enumerate(ALPHABETS):
        path = out / f"report_{name}.json"
        document = load_document(ConversionReportDocument, read_json(path, "run the 'matrix' command first"))
        counting = cfg.counting.model_copy(update={"seed": cfg.counting.seed + cfg.seed + index})
        records = simulate_count_matrix(np.asarray(document.eta), counting, max_workers=cfg.workers)
        corrected = noise_corrected_sigma(records)
        table = [
            [k + 1, j + 1, r.signal_counts, r.noise_counts, r.duration_s]
            for k, row in enumerate(records)
            for j, r in enumerate(row)
        ]
        result.outputs.append(
            write_table(out / f"counts_{name}.csv", ["pump", "signal", "signal_counts", "noise_counts", "duration_s"], np.array(table))
        )
        snr = [
            (records[k][k].signal_counts - records[k][k].noise_counts) / max(records[k][k].noise_counts, 1)
            for k in range(len(records))
        ]
        updated = document.model_copy(
            update={
                "photon_counting_sigma": [float(x) for x in corrected.sigma],
                "photon_counting_stderr": [float(x) for x in corrected.stderr],
            }
        )
        result.outputs.append(write_text(out / f"report_{name}_counts.json", updated.canonical_json()))
        summary[name] = {
            "sigma_counting": [float(x) for x in corrected.sigma],
            "sigma_classical": document.separabilities,
            "snr": [float(x) for x in snr],
        }
    result.outputs.append(write_json(out / "counts_summary.json", summary))
    result.summary = summary
    return _finish(cfg, result)


def _cross_visibilities(modes: TemporalModeSet) -> Dict[str, float]:
    worst = {}
    for name, labels in ALPHABETS.items():
        present = [label for label in labels if label in modes.labels]
        values = [
            visibility(modes[a], modes[b], 0.0)
            for i, a in enumerate(present)
            for b in present[i + 1 :]
        ]
        if values:
            worst[name] = float(max(values))
    return worst


def cmd_align(cfg: ModesortConfig) -> CommandResult:
    try:
        ideal = load_signals(cfg)
    except ArtifactMissingError:
        schmidt = simulate_modes(cfg)
        ideal = all_signals(schmidt) if len(schmidt) >= 4 else schmidt
    settings = cfg.align
    rng = np.random.default_rng(cfg.seed)
    measured = []
    for label, mode in zip(ideal.labels, ideal.modes):
        mode = apply_delay(mode, settings.shifts_ps.get(label, 0.0))
        if settings.shaping_amplitude_error or settings.shaping_phase_error:
            mode = emulate_shaping(
                mode,
                amplitude_error=settings.shaping_amplitude_error,
                phase_error=settings.shaping_phase_error,
                rng=rng,
            )
        measured.append(mode)
    measured_set = TemporalModeSet.from_envelopes(measured, ideal.labels)
    reference = ideal[settings.reference]
    alignment = align_set(
        measured_set,
        reference,
        settings.tau_grid(),
        ideal=ideal if settings.use_ideal else None,
    )
    corrected = alignment.corrected(measured_set)

    out = Path(cfg.output_dir)
    result = CommandResult("align")
    columns = ["tau_ps"] + [f"V_{label}" for label in alignment.labels]
    result.outputs.append(write_table(out / "visibility_scan.csv", columns, np.column_stack([alignment.tau_grid, alignment.curves.T])))
    result.outputs.append(Path(draw_visibility_scan(alignment, str(out / "visibility.svg"), settings.reference)))
    summary = {
        "reference": settings.reference,
        "offsets_ps": {label: float(v) for label, v in zip(alignment.labels, alignment.offsets)},
        "methods": dict(zip(alignment.labels, alignment.methods)),
        "cross_visibility_before": _cross_visibilities(measured_set),
        "cross_visibility_after": _cross_visibilities(corrected),
    }
    result.outputs.append(write_json(out / "alignment.json", summary))
    result.summary = summary
    return _finish(cfg, result)


def cmd_chirp(cfg: ModesortConfig) -> CommandResult:
    settings = cfg.comb
    comb = generate_chirped_comb(settings.center_wavelength_nm, settings.n_lines, settings.spacing_ghz, settings.chirp_coeffs)
    corrections, corrected = chirp_correct(
        comb, reference=settings.reference_pair, flatten_reference=settings.flatten_reference
    )
    mask = WaveshaperMask.from_target(comb, corrected)

    def delays(c: CombSpec) -> List[float]:
        i, j = settings.reference_pair
        reference = 0.0 if settings.flatten_reference else beat_delay(c, i, j)
        return [beat_delay(c, int(m), int(m) + 1, reference) for m in c.indices[:-1]]

    out = Path(cfg.output_dir)
    result = CommandResult("chirp")
    result.outputs.append(write_comb_json(out / "comb_chirped.json", comb))
    result.outputs.append(write_comb_json(out / "comb_corrected.json", corrected))
    result.outputs.append(write_mask_csv(out / "chirp_mask.csv", mask))
    summary = {
        "corrections_rad": [float(x) for x in corrections],
        "beat_delays_before_ps": delays(comb),
        "beat_delays_after_ps": delays(corrected),
        "residual_before_rad": residual_nonlinear_phase(comb),
        "residual_after_rad": residual_nonlinear_phase(corrected),
    }
    result.outputs.append(write_json(out / "chirp_summary.json", summary))
    result.summary = summary
    return _finish(cfg, result)


COMMANDS = {
    "modes": cmd_modes,
    "pumps": cmd_pumps,
    "matrix": cmd_matrix,
    "spsa": cmd_spsa,
    "counts": cmd_counts,
    "align": cmd_align,
    "chirp": cmd_chirp,
}
