"""Baseband equivalent channel and SVD precoders/combiners."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet
from .holographic import ExcitingWaveCircuit, SwitchPattern

__all__ = ["BasebandChannel", "SvdBeamformers", "baseband_channel", "svd_beamformers"]


@dataclass(frozen=True)
class BasebandChannel:
    g: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.g.shape


@dataclass(frozen=True)
class SvdBeamformers:
    """Precoders ``v`` (M x k, unit columns), combiners ``u`` (K x k, unit
    columns, applied as ``u[:, i].conj() @ y``) and descending singular values."""

    v: np.ndarray
    u: np.ndarray
    lam: np.ndarray
    rank_deficient: bool = False

    @property
    def streams(self) -> int:
        return self.lam.size

    def effective(self, g: np.ndarray) -> np.ndarray:
        """Return the k x k matrix ``U^H G V``."""
        return self.u.conj().T @ g @ self.v


def baseband_channel(
    channels: ChannelSet, pattern: SwitchPattern, circuit: ExcitingWaveCircuit
) -> BasebandChannel:
    """G = sqrt(Upsilon) H Diag(xi) Phi."""
    xi = np.asarray(pattern.xi, dtype=float)
    if not (channels.n == xi.size == circuit.n):
        raise ValueError(
            f"dimension mismatch: channel N={channels.n}, pattern N={xi.size}, circuit N={circuit.n}"
        )
    g = channels.weighted() @ (xi[:, None] * circuit.phi)
    return BasebandChannel(g=g)


def svd_beamformers(g: BasebandChannel | np.ndarray, k: int | None = None) -> SvdBeamformers:
    """Thin-SVD digital beamformers for the first ``k`` eigen-channels.

    Each right-singular vector is rotated so its largest-magnitude entry is
    real positive, and the matching left-singular vector gets the same
    rotation.  Singular values below the usual numerical-rank tolerance are
    set to zero and flag the solution as rank deficient.
    """
    g = g.g if isinstance(g, BasebandChannel) else np.asarray(g)
    n_rows, n_cols = g.shape
    if k is None:
        k = min(n_rows, n_cols)
    if not 1 <= k <= min(n_rows, n_cols):
        raise ValueError(f"streams k={k} must lie in [1, min(K, M)={min(n_rows, n_cols)}]")

    u, s, vh = np.linalg.svd(g, full_matrices=False)
    u, s, v = u[:, :k], s[:k].copy(), vh[:k].conj().T

    idx = np.argmax(np.abs(v), axis=0)
    lead = v[idx, np.arange(k)]
    rot = np.where(np.abs(lead) > 0, lead.conj() / np.where(lead == 0, 1, np.abs(lead)), 1.0)
    v = v * rot[None, :]
    u = u * rot[None, :]

    smax = s[0] if s.size else 0.0
    tol = max(n_rows, n_cols) * np.finfo(float).eps * smax
    dead = s <= tol
    s[dead] = 0.0
    return SvdBeamformers(v=v, u=u, lam=s, rank_deficient=bool(dead.any()))
