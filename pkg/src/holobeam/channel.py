"""Clustered mmWave downlink channels for a planar radiating surface."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ArrayGeometry",
    "ClusterSpec",
    "ChannelSet",
    "steering_vector",
    "sample_path_angles",
    "generate_channel",
]


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform planar array with spacings given in carrier wavelengths."""

    n_x: int
    n_y: int
    spacing_x: float = 0.5
    spacing_y: float = 0.5

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError(f"array dimensions must be >= 1, got {self.n_x}x{self.n_y}")
        if self.spacing_x <= 0 or self.spacing_y <= 0:
            raise ValueError("element spacings must be positive")

    @property
    def n(self) -> int:
        return self.n_x * self.n_y


@dataclass(frozen=True)
class ClusterSpec:
    """Cluster/path counts and angle statistics, angles in degrees."""

    num_clusters: int = 8
    paths_per_cluster: int = 10
    elevation_mean_range: tuple[float, float] = (0.0, 180.0)
    azimuth_mean_range: tuple[float, float] = (0.0, 360.0)
    elevation_spread_deg: float = 7.5
    azimuth_spread_deg: float = 7.5

    def __post_init__(self):
        if self.num_clusters < 1 or self.paths_per_cluster < 1:
            raise ValueError("cluster and path counts must be >= 1")
        if self.elevation_spread_deg < 0 or self.azimuth_spread_deg < 0:
            raise ValueError("angular spreads must be non-negative")
        lo, hi = self.elevation_mean_range
        if not 0.0 <= lo <= hi <= 180.0:
            raise ValueError(f"elevation mean range {self.elevation_mean_range} outside [0, 180]")
        lo, hi = self.azimuth_mean_range
        if not 0.0 <= lo <= hi <= 360.0:
            raise ValueError(f"azimuth mean range {self.azimuth_mean_range} outside [0, 360]")

    @property
    def num_paths(self) -> int:
        return self.num_clusters * self.paths_per_cluster


@dataclass(frozen=True)
class ChannelSet:
    """Small-scale channels and large-scale gains for K users.

    ``h`` is the K x N matrix whose k-th row is the downlink row vector of
    user k, so the received noiseless signal is ``h @ x``.  ``upsilon`` holds
    the linear large-scale gains.
    """

    h: np.ndarray
    upsilon: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h)
        ups = np.asarray(self.upsilon, dtype=float)
        if h.ndim != 2 or h.shape[0] < 1:
            raise ValueError("h must be a non-empty K x N matrix")
        if ups.shape != (h.shape[0],):
            raise ValueError(f"upsilon has shape {ups.shape}, expected ({h.shape[0]},)")
        if not np.all(np.isfinite(h)):
            raise ValueError("channel entries must be finite")
        if np.any(ups <= 0):
            raise ValueError("large-scale gains must be positive")

    @property
    def k(self) -> int:
        return self.h.shape[0]

    @property
    def n(self) -> int:
        return self.h.shape[1]

    def weighted(self) -> np.ndarray:
        """Return sqrt(Upsilon) @ H."""
        return np.sqrt(self.upsilon)[:, None] * self.h


def steering_vector(elevation: float, azimuth: float, geom: ArrayGeometry) -> np.ndarray:
    """Planar-array response for one departure direction (radians).

    Element ``(n_x, n_y)`` sits at flat index ``n_y * n_x_count + n_x``
    (horizontal index fastest).
    """
    u = np.sin(elevation) * np.cos(azimuth)
    v = np.sin(elevation) * np.sin(azimuth)
    ax = np.exp(-2j * np.pi * geom.spacing_x * np.arange(geom.n_x) * u)
    ay = np.exp(-2j * np.pi * geom.spacing_y * np.arange(geom.n_y) * v)
    return np.kron(ay, ax)


def _steering_matrix(elevation: np.ndarray, azimuth: np.ndarray, geom: ArrayGeometry) -> np.ndarray:
    # rows are steering vectors, one per angle pair
    u = np.sin(elevation) * np.cos(azimuth)
    v = np.sin(elevation) * np.sin(azimuth)
    nx = np.tile(np.arange(geom.n_x), geom.n_y)
    ny = np.repeat(np.arange(geom.n_y), geom.n_x)
    phase = geom.spacing_x * np.outer(u, nx) + geom.spacing_y * np.outer(v, ny)
    return np.exp(-2j * np.pi * phase)


def sample_path_angles(spec: ClusterSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw per-path (elevation, azimuth) pairs in radians.

    Cluster means are uniform over the configured ranges; paths scatter
    around their cluster mean with Gaussian deviations of the configured
    spread.  Elevations are clamped to [0, pi].

    Returns
    -------
    np.ndarray
        Array of shape ``(num_clusters * paths_per_cluster, 2)`` grouped by
        cluster (the first ``paths_per_cluster`` rows belong to cluster 0).
    """
    lc, lp = spec.num_clusters, spec.paths_per_cluster
    mu_el = rng.uniform(*spec.elevation_mean_range, size=lc)
    mu_az = rng.uniform(*spec.azimuth_mean_range, size=lc)
    el = np.repeat(mu_el, lp) + spec.elevation_spread_deg * rng.standard_normal(lc * lp)
    az = np.repeat(mu_az, lp) + spec.azimuth_spread_deg * rng.standard_normal(lc * lp)
    el = np.clip(el, 0.0, 180.0)
    return np.deg2rad(np.column_stack([el, az]))


def generate_channel(
    k: int,
    geom: ArrayGeometry,
    spec: ClusterSpec,
    mean_large_scale_db: float,
    rng: np.random.Generator,
) -> ChannelSet:
    """Draw one channel realization for ``k`` users.

    Each user's row is ``sqrt(1/(Lc*Lp)) * sum alpha * a(psi, phi)`` with
    ``alpha ~ CN(0, 1)``; the large-scale gain is ``beta * 10**(dB/10)`` with
    ``beta ~ U[0.5, 1.5]``.
    """
    if k < 1:
        raise ValueError(f"need at least one user, got {k}")
    h = np.empty((k, geom.n), dtype=complex)
    scale = np.sqrt(1.0 / spec.num_paths)
    for user in range(k):
        angles = sample_path_angles(spec, rng)
        alpha = (rng.standard_normal(spec.num_paths) + 1j * rng.standard_normal(spec.num_paths)) / np.sqrt(2)
        h[user] = scale * (alpha @ _steering_matrix(angles[:, 0], angles[:, 1], geom))
    beta = rng.uniform(0.5, 1.5, size=k)
    upsilon = beta * 10.0 ** (mean_large_scale_db / 10.0)
    return ChannelSet(h=h, upsilon=upsilon)
