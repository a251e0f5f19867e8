import numpy as np
import pytest
from numpy.testing import assert_allclose

from modesort.counting import (
    CountingConfig,
    CountRecord,
    noise_corrected_sigma,
    simulate_count_matrix,
    simulate_counts,
)
from modesort.errors import DataQualityWarning, DomainError, SaturationError
from modesort.metrics import separabilities

ETA = np.array(
    [
        [0.94, 0.075, 0.037, 0.015],
        [0.06, 0.91, 0.08, 0.03],
        [0.03, 0.07, 0.90, 0.09],
        [0.02, 0.04, 0.10, 0.88],
    ]
)


def test_dark_input_gives_no_counts():
    record = simulate_counts(0.0, CountingConfig(noise_rate=0.0))
    assert record.signal_counts == 0
    assert record.noise_counts == 0
    assert record.duration_s == 1.0


def test_default_chain_has_high_signal_to_noise():
    cfg = CountingConfig()
    total, noise = cfg.expected_rates(0.9)
    assert (total - noise) / noise > 1e3
    assert total < cfg.max_count_rate


def test_detection_factor():
    cfg = CountingConfig(extra_attenuation_db=10.0, detector_efficiency=0.5, rep_rate_ghz=1.0)
    assert cfg.detection_factor == pytest.approx(1e9 * 0.1 * 0.5)


def test_unattenuated_detector_saturates():
    with pytest.raises(SaturationError):
        simulate_counts(1.0, CountingConfig(extra_attenuation_db=0.0))


def test_efficiency_must_be_physical():
    with pytest.raises(DomainError):
        simulate_counts(1.2, CountingConfig())
    with pytest.raises(DomainError):
        CountRecord(-1, 0, 1.0, 0.5)


def test_noiseless_counts_reproduce_classical_separability():
    records = simulate_count_matrix(ETA, CountingConfig(noise_rate=0.0, seed=4))
    result = noise_corrected_sigma(records)
    assert_allclose(result.sigma, separabilities(ETA), atol=0.01)
    assert np.all(result.stderr < 0.01)


def test_default_noise_is_subtracted():
    result = noise_corrected_sigma(simulate_count_matrix(ETA, CountingConfig(seed=5)))
    assert_allclose(result.sigma, separabilities(ETA), atol=0.05)


def test_common_losses_do_not_move_separability():
    cfg = CountingConfig(seed=6)
    reference = noise_corrected_sigma(simulate_count_matrix(ETA, cfg)).sigma
    lossy_cfg = cfg.model_copy(update={"noise_per_mw": cfg.noise_per_mw * 0.6})
    lossy = noise_corrected_sigma(simulate_count_matrix(ETA * 0.92, lossy_cfg)).sigma
    assert np.max(np.abs(lossy - reference)) < 0.01


def test_negative_corrected_counts_raise_a_warning():
    records = [[CountRecord(1000, 10, 1.0, 0.5), CountRecord(0, 100, 1.0, 0.0)]]
    with pytest.warns(DataQualityWarning):
        result = noise_corrected_sigma(records)
    assert result.sigma[0] == 1.0
    assert result.eta_proxy[0, 1] == 0.0


def test_records_must_form_a_wide_grid():
    record = CountRecord(10, 1, 1.0, 0.1)
    with pytest.raises(DomainError):
        noise_corrected_sigma([[record], [record]])


def test_count_matrix_does_not_depend_on_worker_count():
    cfg = CountingConfig(seed=12)
    serial = simulate_count_matrix(ETA, cfg, max_workers=1)
    parallel = simulate_count_matrix(ETA, cfg, max_workers=4)
    counts = lambda grid: [[(r.signal_counts, r.noise_counts) for r in row] for row in grid]
    assert counts(serial) == counts(parallel)
    assert serial[1][2].eta == pytest.approx(ETA[1, 2])


def test_counts_grow_linearly_with_integration_time():
    eta = 0.5
    for seconds in (1.0, 2.0):
        cfg = CountingConfig(integration_time_s=seconds)
        expected = cfg.expected_rates(eta)[0] * seconds
        counts = [simulate_counts(eta, cfg, np.random.default_rng(seed)).signal_counts for seed in range(100)]
        assert abs(np.mean(counts) - expected) <= 3.0 * np.sqrt(expected / 100)


def test_noise_corrected_rate_is_unbiased():
    cfg = CountingConfig()
    etas = (0.9, 0.05)
    proxies = []
    for seed in range(1000):
        rng = np.random.default_rng(seed)
        records = [[simulate_counts(eta, cfg, rng) for eta in etas]]
        proxies.append(noise_corrected_sigma(records).eta_proxy[0])
    proxies = np.array(proxies)
    for j, eta in enumerate(etas):
        total, noise = cfg.expected_rates(eta)
        stderr = np.sqrt((total + noise) / cfg.integration_time_s) / np.sqrt(len(proxies))
        assert abs(proxies[:, j].mean() - (total - noise)) <= 3.0 * stderr


def test_corrected_separability_tracks_classical_over_seeds():
    classical = separabilities(ETA)
    for seed in range(20):
        result = noise_corrected_sigma(simulate_count_matrix(ETA, CountingConfig(seed=seed)))
        assert np.max(np.abs(result.sigma - classical)) < 0.05
