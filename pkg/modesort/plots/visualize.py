"""SVG figures. Rendering is headless (Agg) and hash-salted so reruns are identical."""

import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..interferometry import AlignmentResult  # noqa: E402
from ..propagation import ConversionReport  # noqa: E402
from ..spdc import TemporalModeSet  # noqa: E402
from ..spsa import SPSAResult  # noqa: E402

plt.rcParams["svg.hashsalt"] = "modesort"
SVG_METADATA = {"Date": None, "Creator": None}


def _save(fig, output_path: str) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(output_path)), exist_ok=True)
    fig.savefig(output_path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return output_path


def draw_eta_heatmap(report: ConversionReport, output_path: str, title: str = "") -> str:
    fig, ax = plt.subplots(figsize=(4.8, 4.0))
    image = ax.imshow(report.eta, cmap="viridis", vmin=0.0, vmax=1.0)
    ax.set_xticks(range(len(report.signal_labels)), report.signal_labels)
    ax.set_yticks(range(len(report.pump_labels)), report.pump_labels)
    for (k, j), value in np.ndenumerate(report.eta):
        ax.text(j, k, f"{100 * value:.1f}", ha="center", va="center", color="w" if value < 0.5 else "k", fontsize=8)
    for k, sigma in enumerate(report.separabilities):
        ax.text(len(report.signal_labels) - 0.4, k, f"σ={sigma:.2f}", va="center", fontsize=8)
    ax.set_xlabel("signal")
    ax.set_ylabel("pump")
    if title:
        ax.set_title(title)
    fig.colorbar(image, ax=ax, label="η", pad=0.15)
    fig.tight_layout()
    return _save(fig, output_path)


def draw_visibility_scan(result: AlignmentResult, output_path: str, reference: str = "") -> str:
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    for label, curve in zip(result.labels, result.curves):
        ax.plot(result.tau_grid, curve, label=label)
    ax.set_xlabel("delay τ (ps)")
    ax.set_ylabel("visibility")
    ax.set_ylim(0.0, 1.05)
    if reference:
        ax.set_title(f"visibility against {reference}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, output_path)


def draw_spsa_trace(result: SPSAResult, output_path: str, ylabel: str = "SF power (µW)") -> str:
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    iterations = np.arange(1, len(result.trace) + 1)
    ax.plot(iterations, result.trace, color="tab:blue", label="reading")
    ax.plot(iterations, result.best_trace, color="tab:red", linestyle="--", label="best so far")
    if result.plateau_iteration is not None:
        ax.axvline(result.plateau_iteration + 1, color="grey", linestyle=":", label="plateau")
    ax.set_xlabel("iteration")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, output_path)


def draw_modes(modes: TemporalModeSet, output_path: str, window_ps: Sequence[float] = (-40.0, 40.0)) -> str:
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(5.5, 5.0), sharex=True)
    t = modes.grid.t
    for label, mode in zip(modes.labels, modes.modes):
        top.plot(t, mode.intensity(), label=label)
        phase = np.where(mode.intensity() > 1e-3 * mode.intensity().max(), np.angle(mode.samples), np.nan)
        bottom.plot(t, phase, label=label)
    top.set_ylabel("|E|²")
    bottom.set_ylabel("phase (rad)")
    bottom.set_xlabel("time (ps)")
    bottom.set_xlim(*window_ps)
    top.legend(fontsize=8, ncol=3)
    fig.tight_layout()
    return _save(fig, output_path)
