"""End-to-end beamformer design shared by every architecture.

Each architecture only differs in how the K x (RF chains) baseband channel
is formed and in its power accounting; the SVD beamformers, power
optimization and metrics go through :func:`design_from_baseband`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .benchmarks import Architecture, ArchitectureKind, analog_stage, power_model_for, right_singular_matrix
from .channel import ChannelSet
from .digital import BasebandChannel, SvdBeamformers, baseband_channel, svd_beamformers
from .holographic import (ExcitingWaveCircuit, SwitchPattern, build_gain_matrix,
                          solve_switch_pattern_ed)
from .link import LinkMetrics, gains_from_baseband, link_metrics
from .power import (HardwareProfile, PowerModel, PowerShare, PowerSolution, RoundState,
                    alternate_power_opt, power_share_hwi, stream_rate)

__all__ = ["DesignSettings", "BeamformerSolution", "design_from_baseband", "evaluate_architecture",
           "full_design", "recompute_metrics"]


@dataclass(frozen=True)
class DesignSettings:
    """Knobs of the power optimization.

    ``fixed_rho`` pins the transmit power (only the shares are optimized),
    as in fixed-SNR sweeps.  ``gd_step`` and ``gd_tol`` are relative: the
    first ascent step moves ``gd_step * p_max`` and the iteration stops once
    the gradient falls below ``gd_tol`` times its value at ``p_max``.
    """

    bandwidth: float = 20e6
    p_max: float = 1.0
    rounds: int = 4
    hwi_aware: bool = True
    gd_step: float = 1e-3
    gd_tol: float = 1e-6
    gd_max_iter: int = 100_000
    fixed_rho: float | None = None


@dataclass(frozen=True)
class BeamformerSolution:
    kind: ArchitectureKind
    baseband: BasebandChannel
    beamformers: SvdBeamformers
    power: PowerSolution
    power_model: PowerModel
    pattern: SwitchPattern | None = None
    analog: np.ndarray | None = None

    @property
    def rho(self) -> float:
        return self.power.rho

    @property
    def shares(self) -> np.ndarray:
        return self.power.share.p


def _fixed_power(lam, rho, hw, pm, settings) -> PowerSolution:
    design_hw = hw if settings.hwi_aware else hw.ideal()
    share = power_share_hwi(lam, rho, design_hw)
    se = stream_rate(share.p, lam, rho, hw)
    ee = settings.bandwidth * se / pm.total_power(rho)
    return PowerSolution(rho=rho, share=share, ee=ee, se=se, iterations=0,
                         trace=[RoundState(rho=rho, p=share.p, se=se, ee=ee)])


def design_from_baseband(
    g: BasebandChannel | np.ndarray,
    streams: int,
    hw: HardwareProfile,
    pm: PowerModel,
    settings: DesignSettings,
) -> tuple[SvdBeamformers, PowerSolution, LinkMetrics]:
    """SVD beamformers, power optimization and metrics for one baseband channel."""
    g = g if isinstance(g, BasebandChannel) else BasebandChannel(np.asarray(g))
    bf = svd_beamformers(g, streams)
    if settings.fixed_rho is not None:
        power = _fixed_power(bf.lam, settings.fixed_rho, hw, pm, settings)
    else:
        power = alternate_power_opt(bf.lam, hw, pm, settings.bandwidth, settings.p_max, settings.rounds,
                                    hwi_aware=settings.hwi_aware, step=settings.gd_step,
                                    tol=settings.gd_tol, max_iter=settings.gd_max_iter)
    metrics = link_metrics(gains_from_baseband(g, bf), power.share, power.rho, hw, pm, settings.bandwidth)
    return bf, power, metrics


def evaluate_architecture(
    kind: ArchitectureKind,
    channels: ChannelSet,
    circuit: ExcitingWaveCircuit,
    hw: HardwareProfile,
    prices: PowerModel,
    settings: DesignSettings,
    pattern: SwitchPattern | None = None,
) -> tuple[BeamformerSolution, LinkMetrics]:
    """Design and score one architecture on one channel realization.

    ``circuit`` fixes the number of RF chains M for every architecture.  For
    ``RhsSwitch`` a precomputed ``pattern`` may be supplied; otherwise the
    eigen-decomposition pattern is used.
    """
    n, m = channels.n, circuit.m
    k = channels.k
    pm = power_model_for(kind, n, m, prices)
    analog = None
    if kind.tag is Architecture.RHS_SWITCH:
        if pattern is None:
            pattern = solve_switch_pattern_ed(build_gain_matrix(channels, circuit))
        g = baseband_channel(channels, pattern, circuit)
    elif kind.tag is Architecture.FULLY_DIGITAL:
        g = BasebandChannel(channels.weighted())
    else:
        stage = analog_stage(kind, right_singular_matrix(channels, m))
        analog = stage.f_analog
        g = BasebandChannel(channels.weighted() @ analog)
    if k > g.shape[1]:
        raise ValueError(f"{kind.label}: {k} users exceed the {g.shape[1]} available RF chains")
    bf, power, metrics = design_from_baseband(g, k, hw, pm, settings)
    solution = BeamformerSolution(kind=kind, baseband=g, beamformers=bf, power=power, power_model=pm,
                                  pattern=pattern if kind.tag is Architecture.RHS_SWITCH else None,
                                  analog=analog)
    return solution, metrics


def full_design(
    channels: ChannelSet,
    circuit: ExcitingWaveCircuit,
    hw: HardwareProfile,
    prices: PowerModel,
    settings: DesignSettings,
) -> tuple[BeamformerSolution, LinkMetrics]:
    """Switch pattern, then SVD digital beamformers, then alternating power optimization."""
    return evaluate_architecture(ArchitectureKind(Architecture.RHS_SWITCH), channels, circuit, hw,
                                 prices, settings)


def recompute_metrics(solution: BeamformerSolution, hw: HardwareProfile, bandwidth: float) -> LinkMetrics:
    """Metrics rebuilt from the stored components of a solution."""
    gains = gains_from_baseband(solution.baseband, solution.beamformers)
    return link_metrics(gains, PowerShare(solution.shares, solution.power.share.lagrange_b),
                        solution.rho, hw, solution.power_model, bandwidth)
