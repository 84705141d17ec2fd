"""Baseline beamforming architectures and their power accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import ChannelSet
from .power import PowerModel

__all__ = [
    "Architecture",
    "ArchitectureKind",
    "AnalogStage",
    "right_singular_matrix",
    "analog_stage",
    "power_model_for",
    "architecture_power",
]


class Architecture(str, Enum):
    FULLY_DIGITAL = "FullyDigital"
    FULLY_CONNECTED_PSA = "FullyConnectedPSA"
    SUB_CONNECTED_PSA = "SubConnectedPSA"
    PSA_WITH_SWITCHES = "PsaWithSwitches"
    RHS_SWITCH = "RhsSwitch"

    @property
    def has_analog_stage(self) -> bool:
        return self in (Architecture.FULLY_CONNECTED_PSA, Architecture.SUB_CONNECTED_PSA,
                        Architecture.PSA_WITH_SWITCHES)


@dataclass(frozen=True)
class ArchitectureKind:
    tag: Architecture
    kappa: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "tag", Architecture(self.tag))
        if self.tag is Architecture.PSA_WITH_SWITCHES:
            if self.kappa is None:
                object.__setattr__(self, "kappa", 0.5)
            if not 0.0 <= self.kappa <= 1.0:
                raise ValueError(f"kappa must lie in [0, 1], got {self.kappa}")
        elif self.kappa is not None:
            raise ValueError(f"kappa only applies to {Architecture.PSA_WITH_SWITCHES.value}")

    @classmethod
    def parse(cls, tag: str, kappa: float = 0.5) -> "ArchitectureKind":
        arch = Architecture(tag)
        return cls(arch, kappa if arch is Architecture.PSA_WITH_SWITCHES else None)

    @property
    def label(self) -> str:
        return self.tag.value


@dataclass(frozen=True)
class AnalogStage:
    f_analog: np.ndarray
    active_phase_shifters: int
    active_switches: int


def right_singular_matrix(channels: ChannelSet, m: int) -> np.ndarray:
    """First ``m`` right-singular vectors (N x m) of ``sqrt(Upsilon) H``."""
    _, _, vh = np.linalg.svd(channels.weighted(), full_matrices=True)
    return vh[:m].conj().T


def analog_stage(kind: ArchitectureKind, right_singular: np.ndarray) -> AnalogStage:
    """Phase-shifter network built from the phases of the right-singular matrix.

    The sub-connected variants give RF chain ``m`` the ``m``-th block of
    ``N/M`` consecutive antennas.  With switches, the ``ceil(kappa N)``
    connected entries of smallest singular-vector magnitude are switched off
    (ties resolved toward the lower antenna index).
    """
    if not kind.tag.has_analog_stage:
        raise ValueError(f"{kind.label} has no phase-shifter analog stage")
    v = np.asarray(right_singular)
    n, m = v.shape
    full = np.exp(1j * np.angle(v)) / np.sqrt(n)
    if kind.tag is Architecture.FULLY_CONNECTED_PSA:
        return AnalogStage(f_analog=full, active_phase_shifters=n * m, active_switches=0)

    if n % m:
        raise ValueError(f"sub-connected arrays need M | N, got N={n}, M={m}")
    owner = np.arange(n) // (n // m)
    rows = np.arange(n)
    mask = np.zeros((n, m), dtype=bool)
    mask[rows, owner] = True
    if kind.tag is Architecture.SUB_CONNECTED_PSA:
        return AnalogStage(f_analog=np.where(mask, full, 0), active_phase_shifters=n, active_switches=0)

    off = math.ceil(kind.kappa * n - 1e-12)
    magnitude = np.abs(v[rows, owner])
    weakest = np.argsort(magnitude, kind="stable")[:off]
    mask[weakest, owner[weakest]] = False
    return AnalogStage(f_analog=np.where(mask, full, 0), active_phase_shifters=n - off, active_switches=n)


def power_model_for(kind: ArchitectureKind, n: int, m: int, prices: PowerModel) -> PowerModel:
    """Copy of ``prices`` with the component counts of ``kind``."""
    tag = kind.tag
    if tag is Architecture.FULLY_DIGITAL:
        counts = dict(n_rf=n, n_ps=0, n_sw=0)
    elif tag is Architecture.FULLY_CONNECTED_PSA:
        counts = dict(n_rf=m, n_ps=m * n, n_sw=0)
    elif tag is Architecture.SUB_CONNECTED_PSA:
        counts = dict(n_rf=m, n_ps=n, n_sw=0)
    elif tag is Architecture.PSA_WITH_SWITCHES:
        counts = dict(n_rf=m, n_ps=(1.0 - kind.kappa) * n, n_sw=n)
    else:
        counts = dict(n_rf=m, n_ps=0, n_sw=n)
    return PowerModel(amplifier_efficiency=prices.amplifier_efficiency, p_syn=prices.p_syn,
                      p_rf=prices.p_rf, p_ps=prices.p_ps, p_sw=prices.p_sw, **counts)


def architecture_power(kind: ArchitectureKind, rho: float, n: int, m: int, prices: PowerModel) -> float:
    if rho < 0:
        raise ValueError("rho must be non-negative")
    return power_model_for(kind, n, m, prices).total_power(rho)
