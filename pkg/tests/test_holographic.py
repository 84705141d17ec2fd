import itertools

import numpy as np
import pytest

from holobeam.channel import ArrayGeometry, ChannelSet, ClusterSpec, generate_channel
from holobeam.holographic import (BRUTE_FORCE_MAX_N, GainMatrix, brute_force_switch_pattern,
                                  build_exciting_wave_circuit, build_gain_matrix, legacy_amplitude_coefficient,
                                  pattern_objective, solve_switch_pattern_ed)


def test_single_feed_circuit():
    np.testing.assert_allclose(build_exciting_wave_circuit(4, 1).phi[:, 0], [0.5] * 4)


def test_second_column_quarter_turns():
    np.testing.assert_allclose(build_exciting_wave_circuit(4, 2).phi[:, 1], 0.5 * np.array([1, 1j, -1, -1j]),
                               atol=1e-15)


def test_columns_orthonormal():
    phi = build_exciting_wave_circuit(16, 8).phi
    np.testing.assert_allclose(phi.conj().T @ phi, np.eye(8), atol=1e-12)
    np.testing.assert_allclose(np.abs(phi), 0.25, atol=1e-12)


def test_literal_exponent_breaks_orthogonality():
    phi = build_exciting_wave_circuit(16, 8, two_pi=False).phi
    assert np.max(np.abs(phi.conj().T @ phi - np.eye(8))) > 0.1


def test_circuit_shape_validation():
    with pytest.raises(ValueError):
        build_exciting_wave_circuit(4, 5)


@pytest.mark.parametrize("diff, want", [(0.0, 1.0), (np.pi, 0.0), (np.pi / 2, 0.5)])
def test_amplitude_coefficient(diff, want):
    assert legacy_amplitude_coefficient(0.3 + diff, 0.3) == pytest.approx(want, abs=1e-15)


def test_gain_matrix_single_tap():
    ch = ChannelSet(np.eye(1, 4, dtype=complex), np.ones(1))
    q = build_gain_matrix(ch, build_exciting_wave_circuit(4, 1)).q
    want = np.zeros((4, 4))
    want[0, 0] = 0.25
    np.testing.assert_allclose(q, want, atol=1e-15)


def test_quadratic_form_identity_over_all_patterns(rng):
    ch = generate_channel(2, ArrayGeometry(2, 2), ClusterSpec(), 0.0, rng)
    circuit = build_exciting_wave_circuit(4, 2)
    gain = build_gain_matrix(ch, circuit)
    for bits in itertools.product((0.0, 1.0), repeat=4):
        xi = np.array(bits)
        direct = np.sum(np.abs(ch.h @ np.diag(xi) @ circuit.phi) ** 2)
        assert pattern_objective(gain, xi) == pytest.approx(direct, abs=1e-10)


def test_lifted_matrix_layout(rng):
    ch = generate_channel(2, ArrayGeometry(2, 2), ClusterSpec(), 0.0, rng)
    gain = build_gain_matrix(ch, build_exciting_wave_circuit(4, 2))
    ones = np.ones(4)
    np.testing.assert_allclose(gain.q_lifted[:4, 4], gain.q @ ones)
    np.testing.assert_allclose(gain.q_lifted[4, :4], ones @ gain.q)
    assert gain.q_lifted[4, 4] == 0


def test_dimension_mismatch():
    ch = ChannelSet(np.ones((1, 4), dtype=complex), np.ones(1))
    with pytest.raises(ValueError):
        build_gain_matrix(ch, build_exciting_wave_circuit(8, 2))


def test_diagonal_gain_turns_everything_on():
    pat = solve_switch_pattern_ed(GainMatrix.from_q(np.diag([1.0, 2.0, 0.5, 3.0])))
    np.testing.assert_array_equal(pat.xi, np.ones(4))
    assert pat.objective_value == pytest.approx(6.5)


def test_null_gain_returns_all_on():
    pat = solve_switch_pattern_ed(GainMatrix.from_q(np.zeros((5, 5))))
    np.testing.assert_array_equal(pat.xi, np.ones(5))
    assert pat.objective_value == 0.0


def test_brute_force_single_switch():
    pat = brute_force_switch_pattern(GainMatrix.from_q(np.array([[2.5]])))
    np.testing.assert_array_equal(pat.xi, [1.0])
    assert pat.objective_value == 2.5


def test_brute_force_tie_break():
    pat = brute_force_switch_pattern(GainMatrix.from_q(np.array([[1.0, -0.8], [-0.8, 1.0]])))
    np.testing.assert_array_equal(pat.xi, [0.0, 1.0])
    assert pat.objective_value == pytest.approx(1.0)


def test_brute_force_size_guard():
    with pytest.raises(ValueError):
        brute_force_switch_pattern(GainMatrix.from_q(np.eye(BRUTE_FORCE_MAX_N + 1)))


def test_oracle_dominates_eigen_design(rng):
    circuit = build_exciting_wave_circuit(8, 2)
    ratios = []
    for _ in range(50):
        gain = build_gain_matrix(generate_channel(2, ArrayGeometry(4, 2), ClusterSpec(), 0.0, rng), circuit)
        ed = solve_switch_pattern_ed(gain)
        best = brute_force_switch_pattern(gain)
        assert best.objective_value >= ed.objective_value - 1e-12 * best.objective_value
        assert ed.objective_value >= pattern_objective(gain, np.ones(8)) - 1e-15
        assert ed.objective_value == pytest.approx(pattern_objective(gain, ed.xi))
        ratios.append(ed.objective_value / best.objective_value)
    assert np.median(ratios) >= 0.9
