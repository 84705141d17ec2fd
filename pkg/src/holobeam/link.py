"""Link metrics under transceiver hardware impairments.

Analytic SINR / spectral / energy efficiency, the high-SNR ceilings, and a
Monte-Carlo simulation of the impaired received signal used to validate the
analytic SINR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet
from .digital import BasebandChannel, SvdBeamformers, baseband_channel
from .holographic import ExcitingWaveCircuit, SwitchPattern
from .power import HardwareProfile, PowerModel, PowerShare

__all__ = [
    "LinkMetrics",
    "pairwise_gains",
    "gains_from_baseband",
    "sinr_analytic",
    "spectral_efficiency",
    "energy_efficiency",
    "link_metrics",
    "se_saturation",
    "ee_upper_bound",
    "monte_carlo_sinr",
]


@dataclass(frozen=True)
class LinkMetrics:
    sinr: np.ndarray
    se: float
    ee: float
    total_power: float


def gains_from_baseband(g: BasebandChannel | np.ndarray, bf: SvdBeamformers) -> np.ndarray:
    """Matrix of ``|u_k1^H G v_k2|^2`` over stream pairs."""
    g = g.g if isinstance(g, BasebandChannel) else np.asarray(g)
    if g.shape != (bf.u.shape[0], bf.v.shape[0]):
        raise ValueError(f"baseband channel {g.shape} does not fit beamformers "
                         f"({bf.u.shape[0]}, {bf.v.shape[0]})")
    return np.abs(bf.effective(g)) ** 2


def pairwise_gains(channels: ChannelSet, pattern: SwitchPattern, circuit: ExcitingWaveCircuit,
                   bf: SvdBeamformers) -> np.ndarray:
    return gains_from_baseband(baseband_channel(channels, pattern, circuit), bf)


def sinr_analytic(gains: np.ndarray, share: PowerShare | np.ndarray, rho: float,
                  hw: HardwareProfile) -> np.ndarray:
    """Per-stream SINR with distortion proportional to the desired power and
    full inter-stream leakage."""
    if rho < 0:
        raise ValueError("rho must be non-negative")
    p = share.p if isinstance(share, PowerShare) else np.asarray(share, dtype=float)
    gains = np.asarray(gains, dtype=float)
    eps = hw.quality
    own = p * np.diag(gains)
    leak = gains @ p - own
    return rho * eps * own / (rho * (1.0 - eps) * own + rho * leak + hw.noise_power)


def spectral_efficiency(sinr) -> float:
    return float(np.sum(np.log2(1.0 + np.asarray(sinr, dtype=float))))


def energy_efficiency(se: float, rho: float, pm: PowerModel, bandwidth: float) -> float:
    """Bits per joule, ``B * S / (rho / zeta + static power)``."""
    total = pm.total_power(rho)
    if total <= 0:
        raise ValueError("total consumed power must be positive")
    return bandwidth * se / total


def link_metrics(gains, share, rho: float, hw: HardwareProfile, pm: PowerModel,
                 bandwidth: float) -> LinkMetrics:
    sinr = sinr_analytic(gains, share, rho, hw)
    se = spectral_efficiency(sinr)
    return LinkMetrics(sinr=sinr, se=se, ee=energy_efficiency(se, rho, pm, bandwidth),
                       total_power=pm.total_power(rho))


def _ceiling_rate(hw: HardwareProfile) -> float:
    eps = hw.quality
    if 1.0 - eps <= 0.0:
        raise ValueError("ideal hardware has no spectral-efficiency ceiling")
    return math.log2(1.0 + eps / (1.0 - eps))


def se_saturation(k: int, hw: HardwareProfile) -> float:
    """High-SNR spectral-efficiency ceiling of ``k`` impaired streams (bit/s/Hz)."""
    return k * _ceiling_rate(hw)


def ee_upper_bound(k: int, hw: HardwareProfile, pm: PowerModel, bandwidth: float) -> float:
    """Energy-efficiency ceiling: saturated rate over the static power only.

    Raises ``ValueError`` when the static power is zero (the bound is
    unbounded).
    """
    if pm.static_power <= 0:
        raise ValueError("static power is zero: energy-efficiency bound is unbounded")
    return bandwidth * se_saturation(k, hw) / pm.static_power


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def monte_carlo_sinr(
    g: BasebandChannel | np.ndarray,
    bf: SvdBeamformers,
    share: PowerShare | np.ndarray,
    rho: float,
    hw: HardwareProfile,
    trials: int,
    rng: np.random.Generator,
    distortion: str = "stream",
    chunk: int = 20_000,
) -> np.ndarray:
    """Empirical per-stream SINR from simulated received samples.

    Every trial draws unit-modulus symbols, transmitter distortion, receiver
    distortion and noise, forms the combined sample of each stream, and
    accumulates the desired-signal power separately from everything else.

    ``distortion="stream"`` gives each stream one transmitter distortion
    sample shared by all RF chains, the model under which the analytic SINR
    is exact.  ``distortion="per_chain"`` draws an independent sample per RF
    chain (``v_k * eta_k`` element-wise); its distortion then spreads across
    the eigen-channels and the analytic SINR is only approximate.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if distortion not in ("stream", "per_chain"):
        raise ValueError(f"unknown distortion model {distortion!r}")
    g = g.g if isinstance(g, BasebandChannel) else np.asarray(g)
    p = share.p if isinstance(share, PowerShare) else np.asarray(share, dtype=float)
    k = bf.streams
    c = bf.effective(g)  # c[k, k'] = u_k^H G v_k'
    b = bf.u.conj().T @ g  # rows u_k^H G, used by the per-chain model
    et, er = hw.epsilon_t, hw.epsilon_r
    amp_sig = np.sqrt(rho * er * et * p)
    amp_bs = np.sqrt(rho * er * (1.0 - et) * p)
    amp_ue = np.sqrt(rho * (1.0 - er) * p)

    desired = np.zeros(k)
    rest = np.zeros(k)
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        s = np.exp(1j * np.pi / 2 * rng.integers(0, 4, size=(n, k))) * np.exp(1j * np.pi / 4)
        if distortion == "stream":
            eta = _cn(rng, (n, k))
            bs = (eta * amp_bs) @ c.T
        else:
            eta = _cn(rng, (n, k, bf.v.shape[0]))
            # bs[t, k] = sum_k' amp_bs[k'] * sum_m b[k, m] v[m, k'] eta[t, k', m]
            bs = np.einsum("km,mj,tjm->tk", b, bf.v * amp_bs[None, :], eta)
        ue = (_cn(rng, (n, k)) * amp_ue) @ c.T
        w = np.sqrt(hw.noise_power) * _cn(rng, (n, k))
        sig = s * amp_sig
        own = sig * np.diag(c)
        cross = sig @ c.T - own
        desired += np.sum(np.abs(own) ** 2, axis=0)
        rest += np.sum(np.abs(cross + bs + ue + w) ** 2, axis=0)
        done += n
    return desired / rest
