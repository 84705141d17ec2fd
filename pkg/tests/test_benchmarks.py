import math

import numpy as np
import pytest

from holobeam.benchmarks import (Architecture, ArchitectureKind, analog_stage, architecture_power, power_model_for,
                                 right_singular_matrix)
from holobeam.pipeline import DesignSettings, evaluate_architecture
from holobeam.power import HardwareProfile, PowerModel

PRICES = PowerModel()


def kind(tag, kappa=0.5):
    return ArchitectureKind.parse(tag, kappa)


@pytest.mark.parametrize("tag, watts", [
    ("RhsSwitch", 10.256),
    ("FullyDigital", 258.0),
    ("FullyConnectedPSA", 71.44),
    ("SubConnectedPSA", 2 + 8 + 256 * 0.03),
    ("PsaWithSwitches", 2 + 8 + 128 * 0.03 + 0.256),
])
def test_static_power_on_256_elements(tag, watts):
    assert architecture_power(kind(tag), 0.0, 256, 8, PRICES) == pytest.approx(watts)


def test_transmit_power_adds_amplifier_loss():
    assert architecture_power(kind("RhsSwitch"), 0.39, 256, 8, PRICES) == pytest.approx(11.256)
    with pytest.raises(ValueError):
        architecture_power(kind("RhsSwitch"), -1.0, 256, 8, PRICES)


def test_kind_parsing():
    assert kind("PsaWithSwitches").kappa == 0.5
    assert kind("RhsSwitch").kappa is None
    assert kind("SubConnectedPSA").label == "SubConnectedPSA"
    with pytest.raises(ValueError):
        ArchitectureKind(Architecture.RHS_SWITCH, 0.3)
    with pytest.raises(ValueError):
        ArchitectureKind(Architecture.PSA_WITH_SWITCHES, 1.5)
    with pytest.raises(ValueError):
        ArchitectureKind.parse("Analog")


@pytest.fixture
def v8x2(rng):
    return np.linalg.qr(rng.standard_normal((8, 2)) + 1j * rng.standard_normal((8, 2)))[0]


def test_fully_connected_phases(v8x2):
    stage = analog_stage(kind("FullyConnectedPSA"), v8x2)
    np.testing.assert_allclose(np.abs(stage.f_analog), 1 / math.sqrt(8))
    np.testing.assert_allclose(np.angle(stage.f_analog), np.angle(v8x2), atol=1e-12)
    assert stage.active_phase_shifters == 16


def test_sub_connected_blocks(v8x2):
    f = analog_stage(kind("SubConnectedPSA"), v8x2).f_analog
    assert np.all(f[:4, 1] == 0) and np.all(f[4:, 0] == 0)
    assert np.all(f[:4, 0] != 0) and np.all(f[4:, 1] != 0)


def test_switch_extremes(v8x2):
    sub = analog_stage(kind("SubConnectedPSA"), v8x2)
    none_off = analog_stage(kind("PsaWithSwitches", 0.0), v8x2)
    np.testing.assert_array_equal(none_off.f_analog, sub.f_analog)
    all_off = analog_stage(kind("PsaWithSwitches", 1.0), v8x2)
    assert np.all(all_off.f_analog == 0) and all_off.active_phase_shifters == 0


def test_switches_drop_weakest_entries(v8x2):
    stage = analog_stage(kind("PsaWithSwitches", 0.25), v8x2)
    owner = np.arange(8) // 4
    magnitude = np.abs(v8x2[np.arange(8), owner])
    expected_off = set(np.argsort(magnitude)[:2])
    off = {n for n in range(8) if stage.f_analog[n, owner[n]] == 0}
    assert off == expected_off
    assert stage.active_phase_shifters == 6 and stage.active_switches == 8


def test_analog_stage_rejects_non_psa(v8x2):
    with pytest.raises(ValueError):
        analog_stage(kind("RhsSwitch"), v8x2)
    with pytest.raises(ValueError):
        analog_stage(kind("SubConnectedPSA"), v8x2[:, :1].repeat(3, axis=1)[:7])


def test_right_singular_matrix_columns(small_system):
    channels, _ = small_system
    v = right_singular_matrix(channels, 8)
    assert v.shape == (64, 8)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(8), atol=1e-12)


def test_power_counts():
    pm = power_model_for(kind("PsaWithSwitches", 0.25), 64, 8, PRICES)
    assert (pm.n_rf, pm.n_ps, pm.n_sw) == (8, 48, 64)


def test_digital_has_at_least_rhs_rate(small_system):
    channels, circuit = small_system
    hw, settings = HardwareProfile(), DesignSettings(fixed_rho=10.0)
    _, digital = evaluate_architecture(kind("FullyDigital"), channels, circuit, hw, PRICES, settings)
    _, rhs = evaluate_architecture(kind("RhsSwitch"), channels, circuit, hw, PRICES, settings)
    assert digital.se >= rhs.se - 1e-9


def test_zero_kappa_only_adds_switch_power(small_system):
    channels, circuit = small_system
    hw, settings = HardwareProfile(0.9, 0.9, 1e-12), DesignSettings(fixed_rho=0.1)
    sol_s, sub = evaluate_architecture(kind("SubConnectedPSA"), channels, circuit, hw, PRICES, settings)
    sol_w, sw = evaluate_architecture(kind("PsaWithSwitches", 0.0), channels, circuit, hw, PRICES, settings)
    assert sub.se == sw.se
    assert sw.total_power - sub.total_power == pytest.approx(64 * PRICES.p_sw)
