import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from modesort.cli import main
from modesort.config import ModesortConfig, load_config, parse_config
from modesort.errors import ArtifactMissingError, ConfigError, DomainError
from modesort.pipeline import COMMANDS
from modesort.comb import WaveshaperMask, generate_chirped_comb
from modesort.utils.serialization import (
    read_comb_json,
    read_envelope_csv,
    read_json,
    read_mask_csv,
    read_mask_json,
    write_comb_json,
    write_envelope_csv,
    write_mask_csv,
    write_mask_json,
)


def test_validation_errors_name_the_line():
    text = '{\n  "seed": 1,\n  "spsa": {"alpha": 0.2}\n}\n'
    with pytest.raises(ConfigError, match="line 3"):
        parse_config(text, "run.json")


@pytest.mark.parametrize(
    "text",
    ['{"seed": 1,', '{"bogus": 1}', '{"schema_version": 2}', "[1, 2]"],
)
def test_bad_documents_are_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")


def test_empty_document_gives_defaults():
    cfg = parse_config("")
    assert cfg.grid.n_samples == 4096
    assert cfg.spsa.target_step == 0.1
    assert cfg.sha256() == ModesortConfig(output_dir="elsewhere").sha256()


def test_output_dir_comes_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("MODESORT_OUTPUT_DIR", str(tmp_path))
    assert ModesortConfig().output_dir == str(tmp_path)


def test_chirp_command_is_reproducible(tmp_path):
    assert main(["chirp", "--output-dir", str(tmp_path)]) == 0
    summary = read_json(tmp_path / "chirp_summary.json")
    assert summary["residual_after_rad"] <= 1e-9
    assert summary["residual_before_rad"] > 0.1
    first = {path.name: path.read_bytes() for path in tmp_path.iterdir()}
    manifest = read_json(tmp_path / "run_manifest_chirp.json")
    assert manifest["command"] == "chirp"
    assert "chirp_summary.json" in manifest["outputs"]

    assert main(["chirp", "--output-dir", str(tmp_path)]) == 0
    second = {path.name: path.read_bytes() for path in tmp_path.iterdir()}
    assert second == first


def test_modes_command_writes_six_signals(tmp_path):
    assert main(["modes", "--output-dir", str(tmp_path)]) == 0
    assert sorted(p.name for p in tmp_path.glob("S*.csv")) == [f"S{i}.csv" for i in range(1, 7)]
    manifest = read_json(tmp_path / "modes_manifest.json")
    assert manifest["gram_offdiag_max"] < 1e-10
    assert min(manifest["schmidt_ratios"]) > 0.9
    assert (tmp_path / "modes.svg").exists()
    header = (tmp_path / "modes.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("t_ps,re_S1,im_S1,re_S2")


@pytest.mark.slow
def test_align_command_recovers_offsets(tmp_path):
    assert main(["modes", "--output-dir", str(tmp_path)]) == 0
    assert main(["align", "--output-dir", str(tmp_path)]) == 0
    offsets = read_json(tmp_path / "alignment.json")["offsets_ps"]
    assert offsets["S3"] == pytest.approx(1.3, abs=0.05)
    assert offsets["S6"] == pytest.approx(1.8, abs=0.05)


@pytest.mark.parametrize("command", ["spsa", "counts"])
def test_missing_upstream_artifacts_exit_with_five(tmp_path, command):
    assert main([command, "--output-dir", str(tmp_path)]) == 5


def test_bad_config_file_exits_with_two(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"grid": {"n_samples": "many"}}', encoding="utf-8")
    assert main(["chirp", str(path), "--output-dir", str(tmp_path)]) == 2
    assert main(["chirp", str(tmp_path / "absent.json")]) == 2


def test_invalid_inputs_exit_with_two(tmp_path, monkeypatch):
    def reject(cfg):
        raise DomainError("efficiencies must lie in [0, 1]")

    monkeypatch.setitem(COMMANDS, "chirp", reject)
    assert main(["chirp", "--output-dir", str(tmp_path)]) == 2


def test_each_command_keeps_its_own_run_manifest(tmp_path):
    assert main(["chirp", "--output-dir", str(tmp_path)]) == 0
    assert main(["modes", "--output-dir", str(tmp_path)]) == 0
    assert read_json(tmp_path / "run_manifest_chirp.json")["command"] == "chirp"
    assert read_json(tmp_path / "run_manifest_modes.json")["command"] == "modes"
    assert not (tmp_path / "run_manifest.json").exists()


def test_envelope_csv_round_trip(tmp_path, grid, gaussian):
    envelope = gaussian(grid, 3.0, center_ps=1.5)
    again = read_envelope_csv(write_envelope_csv(tmp_path / "g.csv", envelope))
    assert again.grid == grid
    assert again.units is envelope.units
    assert again.wavelength_nm == envelope.wavelength_nm
    assert_allclose(again.samples, envelope.samples, rtol=0, atol=0)


def test_missing_json_artifact(tmp_path):
    with pytest.raises(ArtifactMissingError, match="run it first"):
        read_json(tmp_path / "pumps.json", "run it first")
    (tmp_path / "doc.json").write_text(json.dumps({"a": [1, 2]}), encoding="utf-8")
    assert read_json(tmp_path / "doc.json") == {"a": [1, 2]}
    assert np.array(read_json(tmp_path / "doc.json")["a"]).sum() == 3


def test_comb_and_mask_files(tmp_path):
    comb = generate_chirped_comb(chirp_coeffs=(0.05, 0.004))
    again = read_comb_json(write_comb_json(tmp_path / "comb.json", comb))
    assert_allclose(again.coefficients, comb.coefficients, rtol=0, atol=0)

    mask = WaveshaperMask.from_target(comb, comb.coefficients[::-1])
    from_csv = read_mask_csv(write_mask_csv(tmp_path / "mask.csv", mask))
    from_json = read_mask_json(write_mask_json(tmp_path / "mask.json", mask))
    for loaded in (from_csv, from_json):
        assert_allclose(loaded.attenuation_db, mask.attenuation_db)
        assert_allclose(loaded.phase_rad, mask.phase_rad)
        assert loaded.start_ghz == pytest.approx(mask.start_ghz)
        assert loaded.resolution_ghz == pytest.approx(mask.resolution_ghz)


PIPELINE_CONFIG = {"sweep": {"delay_span_ps": 0.2, "power_span_mw": 5.0}}


@pytest.fixture(scope="module")
def pipeline_run(tmp_path_factory):
    """modes, pumps and matrix run once into a shared directory."""
    out = tmp_path_factory.mktemp("pipeline")
    config = out / "run.json"
    config.write_text(json.dumps(PIPELINE_CONFIG), encoding="utf-8")
    for command in ("modes", "pumps", "matrix"):
        assert main([command, str(config), "--output-dir", str(out)]) == 0
    return out, config


@pytest.mark.slow
def test_pumps_command_sorts_s1(pipeline_run):
    out, _ = pipeline_run
    pumps = {entry["label"]: entry for entry in read_json(out / "pumps.json")["pumps"]}
    assert sorted(pumps) == [f"P{k}" for k in range(1, 7)]
    assert pumps["P1"]["separability"] >= 0.85
    assert pumps["P1"]["eta_row"][0] >= 0.90
    assert pumps["P5"]["basis"] == ["S3", "S4", "S5", "S6"]
    assert read_json(out / "run_manifest_pumps.json")["outputs"].count("pumps.json") == 1


@pytest.mark.slow
def test_matrix_command_is_deterministic(pipeline_run):
    out, config = pipeline_run
    names = ("report_A.json", "report_B.json", "eta_full.csv", "sweeps.csv", "run_manifest_matrix.json")
    before = {name: (out / name).read_bytes() for name in names}
    assert main(["matrix", str(config), "--output-dir", str(out)]) == 0
    assert {name: (out / name).read_bytes() for name in names} == before

    report = read_json(out / "report_A.json")
    assert report["pump_labels"] == ["P1", "P2", "P3", "P4"]
    assert report["separabilities"][0] >= 0.85
    assert len(report["eta"]) == 4


@pytest.mark.slow
def test_counts_command_reports_high_signal_to_noise(pipeline_run):
    out, config = pipeline_run
    report = (out / "report_A.json").read_bytes()
    assert main(["counts", str(config), "--output-dir", str(out)]) == 0
    summary = read_json(out / "counts_summary.json")
    assert summary["A"]["snr"][0] > 1e3
    for name in ("A", "B"):
        assert_allclose(summary[name]["sigma_counting"], summary[name]["sigma_classical"], atol=0.05)
    assert (out / "report_A.json").read_bytes() == report
    counted = read_json(out / "report_A_counts.json")
    assert_allclose(counted["photon_counting_sigma"], summary["A"]["sigma_counting"], rtol=1e-12)


@pytest.mark.slow
def test_spsa_command_tunes_phases_only(pipeline_run):
    out, config = pipeline_run
    assert main(["spsa", str(config), "--output-dir", str(out)]) == 0
    summary = read_json(out / "spsa_summary.json")
    assert summary["pump"] == "P3" and summary["direction"] == "maximize"
    assert summary["sf_power_after_uw"] > 0
    reference = {entry["label"]: entry for entry in read_json(out / "pumps.json")["pumps"]}["P3"]["comb"]
    tuned = read_comb_json(out / "P3_spsa_comb.json")
    assert_allclose(tuned.amplitudes, [line["amplitude"] for line in reference["lines"]])
    header = (out / "spsa_trace.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("iter,objective_uw,best_uw,theta_-8")
    assert len((out / "spsa_trace.csv").read_text(encoding="utf-8").splitlines()) == 41
