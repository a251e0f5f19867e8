import numpy as np
import pytest
from hypothesis import given, strategies as st

from modesort.errors import DomainError, UndefinedSeparabilityError
from modesort.metrics import qkd_figures, selectivity, separability, separabilities, sub_matrix

P1_ROW = (0.94, 0.075, 0.037, 0.015)


def test_separability_of_simulated_p1_row():
    assert separability(P1_ROW, 0) == pytest.approx(0.8809, abs=1e-4)


def test_separability_edge_rows():
    assert separability((0.3, 0.0, 0.0, 0.0), 0) == 1.0
    assert separability((0.2, 0.2, 0.2, 0.2), 2) == pytest.approx(0.25)


def test_selectivity():
    assert selectivity(P1_ROW, 0) == pytest.approx(0.94 * 0.8809, abs=1e-3)
    assert selectivity((1.0, 0.0, 0.0, 0.0), 0) == 1.0
    assert selectivity((0.5, 0.5), 0) == pytest.approx(0.25)


def test_undefined_and_invalid_rows():
    with pytest.raises(UndefinedSeparabilityError):
        separability((0.0, 0.0, 0.0), 1)
    with pytest.raises(UndefinedSeparabilityError):
        separability((0.0, 0.4), 0)
    with pytest.raises(DomainError):
        separability((0.5, -0.1), 0)
    with pytest.raises(DomainError):
        separability((), 0)


@given(st.lists(st.floats(1e-6, 1.0), min_size=1, max_size=8), st.data())
def test_separability_is_a_fraction_of_the_row(row, data):
    k = data.draw(st.integers(0, len(row) - 1))
    sigma = separability(row, k)
    assert 0.0 < sigma <= 1.0
    assert sigma * sum(row) == pytest.approx(row[k], rel=1e-9)


def test_sub_matrix_and_row_wise_sigma():
    eta = np.arange(1, 37, dtype=float).reshape(6, 6) / 100
    block = sub_matrix(eta, [4, 5], [4, 5])
    assert block.tolist() == [[0.29, 0.30], [0.35, 0.36]]
    sigma = separabilities(np.diag([0.9, 0.8, 0.7]) + 0.05)
    assert sigma[0] == pytest.approx(0.95 / 1.05)


def test_qkd_figures_reproduce_receiver_numbers():
    eta55, sigma5 = 0.918, 0.890
    key = np.array([[eta55, eta55 / sigma5 - eta55], [0.1, 0.9]])
    check = np.array([[0.903, 0.097], [0.1, 0.9]])
    figures = qkd_figures(key, check)
    assert figures.sigma2_key == pytest.approx(0.890, abs=1e-9)
    assert figures.eta_ov == pytest.approx(0.817, abs=5e-4)
    assert figures.sigma2_check == pytest.approx(0.903, abs=1e-9)
    assert figures.qber == pytest.approx(0.097, abs=1e-9)


def test_qkd_figures_for_perfect_receiver():
    figures = qkd_figures(np.diag([0.9, 0.9]), np.diag([0.8, 0.8]))
    assert figures.eta_ov == pytest.approx(0.9)
    assert figures.qber == 0.0
    assert set(figures.to_dict()) == {"sigma2_key", "sigma2_check", "eta_ov", "qber"}


def test_qkd_figures_need_two_by_two():
    with pytest.raises(DomainError):
        qkd_figures(np.eye(3) * 0.5, np.eye(2) * 0.5)
