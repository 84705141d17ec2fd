import cmath
import math

import numpy as np
import pytest

from holobeam.channel import (ArrayGeometry, ChannelSet, ClusterSpec, generate_channel, sample_path_angles,
                              steering_vector)


def scalar_steering(elevation, azimuth, nx, ny, dx, dy):
    out = []
    for iy in range(ny):
        for ix in range(nx):
            phase = dx * ix * math.sin(elevation) * math.cos(azimuth) + dy * iy * math.sin(elevation) * math.sin(azimuth)
            out.append(cmath.exp(-2j * math.pi * phase))
    return np.array(out)


def test_broadside_is_all_ones():
    a = steering_vector(0.0, 1.234, ArrayGeometry(3, 5))
    np.testing.assert_allclose(a, np.ones(15), atol=1e-15)


def test_half_wavelength_endfire_pair():
    np.testing.assert_allclose(steering_vector(math.pi / 2, 0.0, ArrayGeometry(2, 1)), [1, -1], atol=1e-12)


@pytest.mark.parametrize("geom", [ArrayGeometry(4, 4), ArrayGeometry(3, 2, 0.4, 0.7)])
def test_matches_elementwise_recomputation(geom):
    got = steering_vector(math.pi / 4, math.pi / 3, geom)
    want = scalar_steering(math.pi / 4, math.pi / 3, geom.n_x, geom.n_y, geom.spacing_x, geom.spacing_y)
    np.testing.assert_allclose(got, want, atol=1e-12)
    np.testing.assert_allclose(np.abs(got), 1.0, atol=1e-12)


def test_invalid_geometry_rejected():
    with pytest.raises(ValueError):
        ArrayGeometry(0, 4)
    with pytest.raises(ValueError):
        ArrayGeometry(4, 4, spacing_x=-0.5)


def test_path_count_and_grouping(rng):
    angles = sample_path_angles(ClusterSpec(), rng)
    assert angles.shape == (80, 2)
    assert np.all((angles[:, 0] >= 0) & (angles[:, 0] <= math.pi))


def test_zero_spread_collapses_to_cluster_mean(rng):
    spec = ClusterSpec(num_clusters=3, paths_per_cluster=4, elevation_spread_deg=0, azimuth_spread_deg=0)
    angles = sample_path_angles(spec, rng).reshape(3, 4, 2)
    assert np.all(angles == angles[:, :1, :])


def test_spread_statistics(rng):
    spec = ClusterSpec(num_clusters=1, paths_per_cluster=100_000, elevation_mean_range=(90, 90))
    angles = np.rad2deg(sample_path_angles(spec, rng))
    assert abs(np.std(angles[:, 0]) - 7.5) < 0.02 * 7.5
    assert abs(np.std(angles[:, 1]) - 7.5) < 0.02 * 7.5


def test_channel_is_deterministic_per_seed():
    geom, spec = ArrayGeometry(4, 4), ClusterSpec()
    a = generate_channel(3, geom, spec, -80, np.random.default_rng(7))
    b = generate_channel(3, geom, spec, -80, np.random.default_rng(7))
    assert a.h.tobytes() == b.h.tobytes() and a.upsilon.tobytes() == b.upsilon.tobytes()


def test_mean_channel_energy_equals_element_count():
    rng = np.random.default_rng(5)
    geom, spec = ArrayGeometry(4, 4), ClusterSpec()
    energy = [np.sum(np.abs(generate_channel(1, geom, spec, 0.0, rng).h) ** 2) for _ in range(10_000)]
    assert abs(np.mean(energy) - 16) < 0.03 * 16


def test_large_scale_gains_range(rng):
    ch = generate_channel(500, ArrayGeometry(2, 2), ClusterSpec(), -80.0, rng)
    assert np.all((ch.upsilon >= 0.5e-8) & (ch.upsilon <= 1.5e-8))
    np.testing.assert_allclose(ch.weighted(), np.sqrt(ch.upsilon)[:, None] * ch.h)


def test_channel_set_validation():
    with pytest.raises(ValueError):
        ChannelSet(np.ones((2, 3)), np.array([1.0]))
    with pytest.raises(ValueError):
        ChannelSet(np.ones((1, 3)), np.array([0.0]))
    with pytest.raises(ValueError):
        ChannelSet(np.array([[np.nan, 1]]), np.array([1.0]))
    with pytest.raises(ValueError):
        generate_channel(0, ArrayGeometry(2, 2), ClusterSpec(), -80, np.random.default_rng())
