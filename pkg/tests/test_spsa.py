import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from modesort.comb import generate_chirped_comb, wrap_phase
from modesort.errors import DomainError, SPSAAbortError
from modesort.propagation import WaveguideSpec
from modesort.pump_design import DesignProblem
from modesort.spdc import alphabets
from modesort.spsa import (
    PowerMeter,
    SPSAConfig,
    calibrate_gain,
    find_plateau,
    perturb_phases,
    pump_phase_feedback,
    spsa_optimize,
    suppress_crosstalk,
)


def quadratic(target):
    def objective(theta):
        return -float(np.sum(wrap_phase(theta - target) ** 2))

    return objective


def test_spsa_finds_the_top_of_a_quadratic():
    rng = np.random.default_rng(8)
    target = rng.uniform(-np.pi, np.pi, 5)
    theta0 = target + rng.uniform(-1.0, 1.0, 5)
    cfg = SPSAConfig(a0=1.92, stability=1000, max_iters=200, seed=3)
    result = spsa_optimize(quadratic(target), theta0, cfg)
    assert np.linalg.norm(wrap_phase(result.theta_best - target)) < 0.05
    assert len(result.trace) == 200
    assert len(result.theta_trace) == 200
    assert result.best_trace == sorted(result.best_trace)


def test_minimize_direction_descends():
    target = np.zeros(3)
    cfg = SPSAConfig(a0=1.92, stability=1000, max_iters=150, direction="minimize", seed=1)
    result = spsa_optimize(lambda th: -quadratic(target)(th), np.array([0.8, -0.6, 0.5]), cfg)
    assert result.best_value < 0.01
    assert result.best_trace == sorted(result.best_trace, reverse=True)


def test_zero_iterations_returns_the_wrapped_start():
    theta0 = np.array([4.0, -4.0, 0.5])
    result = spsa_optimize(quadratic(np.zeros(3)), theta0, SPSAConfig(max_iters=0))
    assert_allclose(result.theta_best, wrap_phase(theta0))
    assert result.trace == []
    assert result.plateau_iteration is None


def test_nan_objective_aborts_with_partial_trace():
    calls = {"n": 0}

    def objective(theta):
        calls["n"] += 1
        return float("nan") if calls["n"] > 7 else 1.0

    with pytest.raises(SPSAAbortError) as info:
        spsa_optimize(objective, np.zeros(4), SPSAConfig(max_iters=10))
    assert isinstance(info.value.trace, list)
    assert len(info.value.trace) == 2


def test_gain_calibration_on_linear_objective():
    cfg = SPSAConfig(target_step=0.1, stability=5.0)
    a0 = calibrate_gain(lambda th: 3.0 * th[0], np.zeros(1), cfg, np.random.default_rng(0))
    assert a0 == pytest.approx(0.1 * 6.0**0.602 / 3.0, rel=1e-9)


def test_calibrated_gain_is_reported():
    cfg = SPSAConfig(target_step=0.1, stability=5.0, max_iters=3)
    result = spsa_optimize(lambda th: 3.0 * th[0], np.zeros(1), cfg)
    assert result.a0 == pytest.approx(0.1 * 6.0**0.602 / 3.0, rel=1e-9)


def test_plateau_detection():
    assert find_plateau([1, 2, 3, 3, 3], 2, 0.0) == 4
    assert find_plateau([1, 2, 3, 4, 5], 2, 0.0) is None
    assert find_plateau([100.0, 100.2, 100.3], 2, 0.005) == 2


def test_config_validation():
    with pytest.raises(ValidationError):
        SPSAConfig(alpha=0.4)
    with pytest.raises(ValidationError):
        SPSAConfig(bogus=1)
    assert SPSAConfig(direction="Maximize").direction == "maximize"
    assert SPSAConfig(direction="MINIMIZE").sign == -1.0


def test_noiseless_meter_reads_scaled_efficiency(schmidt_modes, waveguide):
    comb = generate_chirped_comb(amplitudes=np.full(17, np.sqrt(100.0 / 17)))
    meter = PowerMeter(comb, schmidt_modes[0], waveguide, noise_frac=0.0, n_steps=120)
    assert meter(comb.phases) == pytest.approx(meter.efficiency(comb.phases) * meter.scale, rel=1e-12)
    assert meter.scale == pytest.approx(120.0 * 1532.1 / waveguide.sf_wavelength_nm)


def test_perturbations_are_gaussian_line_phase_errors():
    comb = generate_chirped_comb(chirp_coeffs=(0.05,))
    differences = []
    for seed in range(200):
        perturbed = perturb_phases(comb, 0.4, np.random.default_rng(seed))
        assert_allclose(perturbed.amplitudes, comb.amplitudes)
        differences.append(wrap_phase(perturbed.phases - comb.phases))
    differences = np.concatenate(differences)
    assert abs(differences.mean()) < 0.03
    assert differences.std() == pytest.approx(0.4, rel=0.05)
    assert np.mean(np.abs(differences) > 0.4) == pytest.approx(0.317, abs=0.04)


def test_negative_perturbation_width_is_rejected():
    with pytest.raises(DomainError):
        perturb_phases(generate_chirped_comb(), -0.1, np.random.default_rng(0))


@pytest.mark.slow
def test_feedback_does_not_lose_conversion(schmidt_modes, waveguide):
    comb = generate_chirped_comb(amplitudes=np.full(17, np.sqrt(100.0 / 17)))
    perturbed = perturb_phases(comb, 0.4, np.random.default_rng(9))
    cfg = SPSAConfig(max_iters=30, target_step=0.1, stability=5.0, seed=3)
    result = pump_phase_feedback(perturbed, schmidt_modes[0], waveguide, cfg, 0.0, n_steps=120)
    assert result.eta_after >= result.eta_before - 1e-12
    assert_allclose(result.comb.amplitudes, perturbed.amplitudes)
    assert result.sf_power_after_uw == pytest.approx(result.eta_after * 120.0 * 1532.1 / waveguide.sf_wavelength_nm)


def test_meter_reading_ignores_whole_turns_of_phase(schmidt_modes, waveguide):
    comb = generate_chirped_comb(chirp_coeffs=(0.05,), amplitudes=np.full(17, np.sqrt(100.0 / 17)))
    meter = PowerMeter(comb, schmidt_modes[2], waveguide, noise_frac=0.0, n_steps=120)
    turns = 2.0 * np.pi * np.random.default_rng(4).integers(-3, 4, comb.n_lines)
    assert meter.efficiency(comb.phases + turns) == pytest.approx(meter.efficiency(comb.phases), rel=1e-9)


@pytest.fixture(scope="module")
def matched_p3(schmidt_modes):
    """P3 whose line coefficients maximise eta_33 at low conversion, at 10 mW."""
    problem = DesignProblem(2, alphabets(schmidt_modes)["A"], WaveguideSpec(), n_steps=120)
    kernels = problem.linear_kernels()[:, 2]
    form = np.einsum("mt,nt->mn", kernels.conj(), kernels) * problem.grid.dt
    _, vectors = np.linalg.eigh(form)
    return problem.comb(vectors[:, -1] * np.sqrt(10.0))


def feedback_cfg(seed):
    return SPSAConfig(max_iters=40, target_step=0.1, stability=5.0, seed=seed)


@pytest.mark.slow
def test_feedback_recovers_perturbed_p3(matched_p3, schmidt_modes, waveguide):
    s3 = schmidt_modes[2]
    baseline = PowerMeter(matched_p3, s3, waveguide, noise_frac=0.0, n_steps=120).efficiency(matched_p3.phases)
    recoveries, gains, plateaus = [], [], []
    for seed in range(20):
        perturbed = perturb_phases(matched_p3, 0.4, np.random.default_rng(seed))
        result = pump_phase_feedback(perturbed, s3, waveguide, feedback_cfg(seed), 0.01, n_steps=120)
        assert len(result.spsa.trace) == 40
        recoveries.append(result.eta_after / baseline)
        gains.append(result.eta_after / result.eta_before)
        plateaus.append(result.spsa.plateau_iteration)
    assert np.median(recoveries) >= 0.95
    assert max(gains) >= 1.2
    found = [p for p in plateaus if p is not None]
    assert len(found) >= 5
    assert all(10 <= p < 40 for p in found)


@pytest.mark.slow
def test_optimal_pump_gains_nothing_beyond_noise(matched_p3, schmidt_modes, waveguide):
    result = pump_phase_feedback(matched_p3, schmidt_modes[2], waveguide, feedback_cfg(1), 0.01, n_steps=120)
    assert result.eta_after <= result.eta_before * 1.02


@pytest.mark.slow
def test_crosstalk_suppression_keeps_separability(matched_p3, schmidt_modes, waveguide):
    basis = alphabets(schmidt_modes)["A"]
    result = suppress_crosstalk(matched_p3, basis, 2, 3, waveguide, feedback_cfg(2), 0.01, n_steps=120)
    assert result.feedback.spsa.best_trace == sorted(result.feedback.spsa.best_trace, reverse=True)
    assert result.sigma_after >= result.sigma_before
    assert result.eta_row_before[3] > 0
    if result.accepted:
        assert_allclose(result.comb.amplitudes, matched_p3.amplitudes)
    else:
        assert result.comb is matched_p3


def test_crosstalk_needs_two_modes_of_the_basis(schmidt_modes, waveguide):
    comb = generate_chirped_comb()
    with pytest.raises(DomainError):
        suppress_crosstalk(comb, schmidt_modes, 2, 2, waveguide)
    with pytest.raises(DomainError):
        suppress_crosstalk(comb, schmidt_modes, 2, 7, waveguide)
