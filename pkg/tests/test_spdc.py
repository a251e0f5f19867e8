import numpy as np
import pytest
from numpy.testing import assert_allclose

from modesort.errors import DomainError, NormalizationError, RankError
from modesort.field import inner_product
from modesort.spdc import (
    JointSpectralAmplitude,
    alphabets,
    build_jsa,
    count_lobes,
    schmidt_decompose,
    schmidt_spectra,
    superpose,
)


def test_default_source_gives_four_nearly_equal_modes(schmidt_modes):
    coefficients = schmidt_modes.schmidt_coefficients
    assert np.all(np.diff(coefficients) <= 0)
    assert np.sum(coefficients**2) == pytest.approx(1.0, abs=1e-12)
    assert np.all(coefficients / coefficients[0] > 0.9)


def test_modes_are_orthonormal(schmidt_modes):
    assert schmidt_modes.orthonormality_error() <= 1e-10
    assert abs(inner_product(schmidt_modes[0], schmidt_modes[1])) <= 1e-10


def test_modes_have_one_to_four_lobes(schmidt_modes):
    assert [count_lobes(mode) for mode in schmidt_modes.modes] == [1, 2, 3, 4]


def test_short_pump_without_phase_matching_is_separable(grid):
    jsa = build_jsa(pump_width=1e-3, pump_sg_order=1, phasematch_bw=np.inf, grid=grid)
    single = schmidt_decompose(jsa, 1)
    assert single.schmidt_coefficients[0] == pytest.approx(1.0, abs=1e-12)
    assert single.captured_weight == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(RankError):
        schmidt_decompose(jsa, 2)


def test_filter_wider_than_grid_is_rejected(small_grid):
    with pytest.raises(DomainError):
        build_jsa(filter_bw=200.0, grid=small_grid)


def test_small_matrix_modes_match_dense_svd(grid):
    rng = np.random.default_rng(8)
    matrix = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    jsa = JointSpectralAmplitude.from_matrix(grid, matrix)
    u, s, _ = np.linalg.svd(matrix / np.linalg.norm(matrix))
    modes = schmidt_decompose(jsa, 8)
    assert_allclose(modes.schmidt_coefficients, s, atol=1e-12)
    for j, mode in enumerate(modes.modes):
        spectrum = mode.to_frequency()[jsa.signal_index] * np.sqrt(grid.df)
        # equal up to the pinned global phase
        assert abs(np.vdot(u[:, j], spectrum)) == pytest.approx(1.0, abs=1e-12)
        assert_allclose(np.abs(spectrum), np.abs(u[:, j]), atol=1e-12)


def test_schmidt_triplets_reconstruct_random_jsa(grid):
    rng = np.random.default_rng(16)
    matrix = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    jsa = JointSpectralAmplitude.from_matrix(grid, matrix)
    s, u, v = schmidt_spectra(jsa, 16)
    rebuilt = u @ np.diag(s) @ v.conj().T
    assert np.linalg.norm(rebuilt - jsa.amplitude) <= 1e-10


def test_too_many_modes_is_a_rank_error(grid):
    jsa = JointSpectralAmplitude.from_matrix(grid, np.outer(np.arange(1, 5), np.ones(3)))
    with pytest.raises(RankError):
        schmidt_decompose(jsa, 2)


def test_superposition_modes(schmidt_modes):
    s5 = superpose(schmidt_modes, [1 / np.sqrt(2), 1 / np.sqrt(2)])
    s6 = superpose(schmidt_modes, [1 / np.sqrt(2), -1 / np.sqrt(2)])
    assert abs(inner_product(s5, s6)) <= 1e-10
    assert s5.norm2() == pytest.approx(1.0, abs=1e-10)
    assert abs(inner_product(s5, schmidt_modes[0])) == pytest.approx(1 / np.sqrt(2), abs=1e-10)
    peak = s5.intensity().max()
    assert_allclose(s5.intensity(), s6.intensity(), atol=1e-10 * peak)


def test_trivial_superposition_is_the_mode(schmidt_modes):
    s1 = superpose(schmidt_modes, [1.0, 0.0])
    assert np.array_equal(s1.samples, schmidt_modes[0].samples)


def test_unnormalized_coefficients_are_rejected(schmidt_modes):
    with pytest.raises(NormalizationError):
        superpose(schmidt_modes, [1.0, 1.0])


def test_both_alphabets_are_orthonormal(schmidt_modes):
    sets = alphabets(schmidt_modes)
    assert sets["A"].labels == ("S1", "S2", "S3", "S4")
    assert sets["B"].labels == ("S3", "S4", "S5", "S6")
    for basis in sets.values():
        assert basis.orthonormality_error() <= 1e-10


def test_all_signals_lookup_by_label(signals):
    assert signals.labels == ("S1", "S2", "S3", "S4", "S5", "S6")
    assert signals["S3"] is signals[2]
