import numpy as np
import pytest
from numpy.testing import assert_allclose

from modesort.comb import CombSpec
from modesort.errors import DomainError
from modesort.pipeline.experiment import measure_alphabet, sweep_delay_power


def flat_pump(grid, power_mw):
    return CombSpec(1556.6, 20.0, np.full(17, np.sqrt(power_mw / 17)), np.zeros(17)).to_envelope(grid)


def test_sweep_reports_optimum_and_final_point(grid, schmidt_modes, waveguide):
    sweep = sweep_delay_power(
        flat_pump(grid, 100.0), schmidt_modes, 0, waveguide, [-0.4, 0.0, 0.4], [80.0, 120.0], n_steps=120
    )
    assert sweep.eta.shape == (3, 2, 4)
    assert sweep.label == "P1"
    i = list(sweep.delays).index(sweep.optimal_delay)
    p = list(sweep.powers).index(sweep.optimal_power)
    assert sweep.eta_target[i, p] == sweep.eta_target.max()
    i = list(sweep.delays).index(sweep.final_delay)
    p = list(sweep.powers).index(sweep.final_power)
    assert sweep.sigma()[i, p] == sweep.sigma().max()


def test_sweep_defaults_to_the_pump_power(grid, schmidt_modes, waveguide):
    sweep = sweep_delay_power(flat_pump(grid, 60.0), schmidt_modes, 1, waveguide, [0.0], n_steps=120, label="Px")
    assert_allclose(sweep.powers, [60.0], rtol=1e-9)
    assert sweep.final_delay == 0.0
    assert sweep.label == "Px"


def test_sweep_arguments_are_checked(grid, schmidt_modes, waveguide):
    pump = flat_pump(grid, 60.0)
    with pytest.raises(DomainError):
        sweep_delay_power(pump, schmidt_modes, 0, waveguide, [], n_steps=120)
    with pytest.raises(DomainError):
        sweep_delay_power(pump, schmidt_modes, 0, waveguide, [0.0], [0.0], n_steps=120)


def test_measurement_needs_six_signals_and_pumps(grid, schmidt_modes, signals, waveguide):
    pumps = {f"P{k}": flat_pump(grid, 100.0) for k in range(1, 7)}
    with pytest.raises(DomainError):
        measure_alphabet(pumps, schmidt_modes, waveguide)
    del pumps["P6"]
    with pytest.raises(DomainError):
        measure_alphabet(pumps, signals, waveguide)


def test_measurement_splits_into_two_alphabets(grid, signals, waveguide):
    pumps = {f"P{k}": flat_pump(grid, 100.0) for k in range(1, 7)}
    result = measure_alphabet(pumps, signals, waveguide, delay_grid=[0.0], power_offsets=[0.0], n_steps=120)
    assert result.eta.shape == (6, 6)
    for row in result.eta[1:]:
        assert_allclose(row, result.eta[0], atol=1e-12)

    a, b = result.reports["A"], result.reports["B"]
    assert a.pump_labels == ["P1", "P2", "P3", "P4"]
    assert b.signal_labels == ["S3", "S4", "S5", "S6"]
    assert_allclose(b.eta, result.eta[2:, 2:], atol=1e-15)
    assert_allclose(a.optimal_power, 100.0, rtol=1e-9)

    key = result.eta[4:, 4:]
    assert result.qkd.eta_ov == pytest.approx(key[0, 0] * key[0, 0] / key[0].sum(), rel=1e-12)
