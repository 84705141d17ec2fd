"""Holographic (switch-controlled) beamformer: feed circuit and ON/OFF pattern design."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet

__all__ = [
    "ExcitingWaveCircuit",
    "SwitchPattern",
    "GainMatrix",
    "EigenSolverError",
    "build_exciting_wave_circuit",
    "legacy_amplitude_coefficient",
    "build_gain_matrix",
    "pattern_objective",
    "solve_switch_pattern_ed",
    "brute_force_switch_pattern",
    "BRUTE_FORCE_MAX_N",
]

BRUTE_FORCE_MAX_N = 20


class EigenSolverError(RuntimeError):
    """Raised when the eigen-decomposition of the lifted gain matrix fails."""


@dataclass(frozen=True)
class ExcitingWaveCircuit:
    phi: np.ndarray

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    @property
    def m(self) -> int:
        return self.phi.shape[1]


@dataclass(frozen=True)
class SwitchPattern:
    xi: np.ndarray
    objective_value: float

    @property
    def active(self) -> int:
        return int(self.xi.sum())


@dataclass(frozen=True)
class GainMatrix:
    """Quadratic-form matrix of the summed path gain and its lifted form."""

    q: np.ndarray
    q_lifted: np.ndarray

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @classmethod
    def from_q(cls, q: np.ndarray) -> "GainMatrix":
        q = np.asarray(q)
        n = q.shape[0]
        ones = np.ones(n)
        lifted = np.zeros((n + 1, n + 1), dtype=q.dtype)
        lifted[:n, :n] = q
        lifted[:n, n] = q @ ones
        lifted[n, :n] = ones @ q
        return cls(q=q, q_lifted=lifted)


def build_exciting_wave_circuit(n: int, m: int, two_pi: bool = True) -> ExcitingWaveCircuit:
    """DFT-structured feed circuit, ``[Phi]_{n,m} = exp(j 2pi n m / N) / sqrt(N)``.

    With ``two_pi=False`` the exponent is ``n m / N`` without the 2pi factor,
    which breaks column orthogonality.
    """
    if m < 1 or n < m:
        raise ValueError(f"need n >= m >= 1, got n={n}, m={m}")
    scale = 2 * np.pi if two_pi else 1.0
    rows = np.arange(n)[:, None]
    cols = np.arange(m)[None, :]
    phi = np.exp(1j * scale * rows * cols / n) / np.sqrt(n)
    return ExcitingWaveCircuit(phi=phi)


def legacy_amplitude_coefficient(object_phase: float, reference_phase: float) -> float:
    """Amplitude-controlled element coefficient, the interference cosine mapped to [0, 1]."""
    return (np.cos(object_phase - reference_phase) + 1.0) / 2.0


def build_gain_matrix(
    channels: ChannelSet, circuit: ExcitingWaveCircuit, weight_large_scale: bool = False
) -> GainMatrix:
    """Build Q such that ``xi^T Q xi = sum_k ||h_k^H Diag(xi) Phi||^2`` for real xi.

    Large-scale gains are left out unless ``weight_large_scale`` is set.
    """
    if channels.n != circuit.n:
        raise ValueError(f"channel length {channels.n} does not match circuit size {circuit.n}")
    h = channels.weighted() if weight_large_scale else channels.h
    # c[k, n, m] = h[k, n] * phi[n, m]; Q = sum_{k,m} conj(c) c^T
    c = h[:, :, None] * circuit.phi[None, :, :]
    q = np.einsum("knm,kpm->np", c.conj(), c)
    q = 0.5 * (q + q.conj().T)
    return GainMatrix.from_q(q)


def pattern_objective(gain: GainMatrix, xi: np.ndarray) -> float:
    xi = np.asarray(xi, dtype=float)
    return float(np.real(xi @ gain.q @ xi))


def solve_switch_pattern_ed(gain: GainMatrix) -> SwitchPattern:
    """Eigen-decomposition design of the ON/OFF pattern.

    The leading eigenvector of the real-symmetrized lifted matrix is rounded
    to +-1 by its signs, the auxiliary coordinate fixes the global sign, and
    the result is mapped back to {0, 1}.  The rounded pattern, its complement
    and the all-on pattern are compared and the best is returned (ties favour
    all-on, then the rounded pattern).
    """
    n = gain.n
    lifted = np.real(gain.q_lifted)
    lifted = 0.5 * (lifted + lifted.T)
    try:
        _, vecs = np.linalg.eigh(lifted)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigen-decomposition of the {n + 1}x{n + 1} lifted matrix failed") from exc
    lead = vecs[:, -1]
    if not np.all(np.isfinite(lead)):
        raise EigenSolverError("leading eigenvector has non-finite entries")
    z = np.where(lead >= 0, 1.0, -1.0)
    xi_pm = z[:n] * z[n]
    xi = (xi_pm + 1.0) / 2.0

    candidates = [np.ones(n), xi, 1.0 - xi]
    values = [pattern_objective(gain, c) for c in candidates]
    best = int(np.argmax(values))  # argmax keeps the first maximum
    return SwitchPattern(xi=candidates[best], objective_value=max(values[best], 0.0))


def brute_force_switch_pattern(gain: GainMatrix, chunk: int = 1 << 14) -> SwitchPattern:
    """Exhaustive maximizer of ``xi^T Q xi`` over {0,1}^N for N <= 20.

    Ties (relative 1e-12) go to the pattern with more active elements, then
    to the lexicographically smallest one.
    """
    n = gain.n
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to N <= {BRUTE_FORCE_MAX_N}, got N={n}")
    qr = np.real(gain.q)
    qr = 0.5 * (qr + qr.T)
    # bit i of the integer code is entry n-1-i, so increasing codes are lexicographic order
    weights = 1 << np.arange(n - 1, -1, -1)
    values = np.empty(1 << n)
    for start in range(0, 1 << n, chunk):
        codes = np.arange(start, min(start + chunk, 1 << n))
        x = ((codes[:, None] & weights[None, :]) > 0).astype(float)
        values[start : start + len(codes)] = np.einsum("ij,jk,ik->i", x, qr, x)
    top = values.max()
    tol = 1e-12 * abs(top)
    ties = np.flatnonzero(values >= top - tol)
    active = np.array([bin(int(c)).count("1") for c in ties])
    ties = ties[active == active.max()]
    code = int(ties.min())
    xi = np.array([(code >> (n - 1 - i)) & 1 for i in range(n)], dtype=float)
    return SwitchPattern(xi=xi, objective_value=max(float(values[code]), 0.0))

