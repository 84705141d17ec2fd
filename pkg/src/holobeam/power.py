"""Power sharing across eigen-channels and transmit-power optimization for energy efficiency.

All routines work on the eigen-channel gains ``lam`` produced by the SVD
beamformers, for which the per-stream SINR is interference free::

    gamma_k = rho lam_k^2 eps p_k / (rho lam_k^2 (1 - eps) p_k + noise),  eps = eps_r eps_t
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "HardwareProfile",
    "PowerModel",
    "PowerShare",
    "PowerSolution",
    "RoundState",
    "TransmitPowerResult",
    "ConvergenceError",
    "stream_sinr",
    "stream_rate",
    "energy_efficiency_streams",
    "marginal_rates",
    "water_filling",
    "power_share_hwi",
    "ee_gradient",
    "optimize_transmit_power",
    "alternate_power_opt",
]

LN2 = math.log(2.0)
IDEAL_TOL = 1e-12


class ConvergenceError(RuntimeError):
    """Transmit-power iteration hit its cap; ``last_rho`` holds the final iterate."""

    def __init__(self, message: str, last_rho: float):
        super().__init__(message)
        self.last_rho = last_rho


@dataclass(frozen=True)
class HardwareProfile:
    epsilon_t: float = 1.0
    epsilon_r: float = 1.0
    noise_power: float = 1e-12

    def __post_init__(self):
        for name in ("epsilon_t", "epsilon_r"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")
        if self.noise_power <= 0:
            raise ValueError("noise_power must be positive")

    @property
    def quality(self) -> float:
        """Product eps_r * eps_t."""
        return self.epsilon_r * self.epsilon_t

    @property
    def is_ideal(self) -> bool:
        return 1.0 - self.quality < IDEAL_TOL

    def ideal(self) -> "HardwareProfile":
        return replace(self, epsilon_t=1.0, epsilon_r=1.0)


@dataclass(frozen=True)
class PowerModel:
    """Consumed-power accounting: ``rho / zeta`` plus the static hardware draw."""

    amplifier_efficiency: float = 0.39
    p_syn: float = 2.0
    p_rf: float = 1.0
    p_ps: float = 0.03
    p_sw: float = 0.001
    n_rf: float = 0
    n_ps: float = 0
    n_sw: float = 0

    def __post_init__(self):
        if self.amplifier_efficiency <= 0:
            raise ValueError("amplifier efficiency must be positive")
        if min(self.p_syn, self.p_rf, self.p_ps, self.p_sw) < 0:
            raise ValueError("component powers must be non-negative")
        if min(self.n_rf, self.n_ps, self.n_sw) < 0:
            raise ValueError("component counts must be non-negative")

    @property
    def static_power(self) -> float:
        return self.p_syn + self.n_rf * self.p_rf + self.n_ps * self.p_ps + self.n_sw * self.p_sw

    def total_power(self, rho: float) -> float:
        return rho / self.amplifier_efficiency + self.static_power


@dataclass(frozen=True)
class PowerShare:
    p: np.ndarray
    lagrange_b: float


@dataclass(frozen=True)
class TransmitPowerResult:
    rho: float
    iterations: int
    gradient: float


@dataclass(frozen=True)
class RoundState:
    rho: float
    p: np.ndarray
    se: float
    ee: float


@dataclass(frozen=True)
class PowerSolution:
    rho: float
    share: PowerShare
    ee: float
    se: float
    iterations: int
    trace: list[RoundState] = field(default_factory=list)

    @property
    def ee_history(self) -> list[float]:
        return [r.ee for r in self.trace]


def stream_sinr(p, lam, rho: float, hw: HardwareProfile) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    a = rho * np.asarray(lam, dtype=float) ** 2 * p
    eps = hw.quality
    return eps * a / ((1.0 - eps) * a + hw.noise_power)


def stream_rate(p, lam, rho: float, hw: HardwareProfile) -> float:
    """Sum of log2(1 + gamma_k) over the streams."""
    return float(np.sum(np.log2(1.0 + stream_sinr(p, lam, rho, hw))))


def energy_efficiency_streams(p, lam, rho, hw, pm: PowerModel, bandwidth: float) -> float:
    return bandwidth * stream_rate(p, lam, rho, hw) / pm.total_power(rho)


def marginal_rates(p, lam, rho: float, hw: HardwareProfile) -> np.ndarray:
    """Partial derivatives of the summed rate with respect to each share."""
    p = np.asarray(p, dtype=float)
    lam2 = np.asarray(lam, dtype=float) ** 2
    eps, s2 = hw.quality, hw.noise_power
    return rho * lam2 * eps * s2 / (LN2 * (rho * lam2 * p + s2) * (rho * lam2 * (1 - eps) * p + s2))


def _live(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("lam must be a non-empty vector")
    live = lam > 0
    if not live.any():
        raise ValueError("all eigen-channel gains are zero, nothing to allocate")
    return live


def water_filling(lam, rho: float, noise: float) -> PowerShare:
    """Classical water-filling of a unit power budget over parallel channels.

    Parameters
    ----------
    lam : array_like
        Eigen-channel amplitude gains.
    rho : float
        Total transmit power (W); shares are fractions of it.
    noise : float
        Noise power (W).

    Returns
    -------
    PowerShare
        Shares ``p_k = max(mu - noise / (rho lam_k^2), 0)`` summing to one,
        and the multiplier ``b = -1 / (ln 2 * mu)``.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    lam = np.asarray(lam, dtype=float)
    live = _live(lam)
    idx = np.flatnonzero(live)
    floor = noise / (rho * lam[idx] ** 2)
    order = np.argsort(floor, kind="stable")
    floor_sorted = floor[order]
    active = len(idx)
    while True:
        mu = (1.0 + floor_sorted[:active].sum()) / active
        if mu > floor_sorted[active - 1] or active == 1:
            break
        active -= 1
    p = np.zeros_like(lam)
    p[idx] = np.maximum(mu - floor, 0.0)
    p /= p.sum()
    return PowerShare(p=p, lagrange_b=-1.0 / (LN2 * mu))


def _hwi_shares(beta: float, a: np.ndarray, eps: float) -> np.ndarray:
    # stationarity root for multiplier b = -beta, rationalized to avoid 0/0 as eps -> 1
    x = eps * eps + 4.0 * a * (1.0 - eps) * eps / (LN2 * beta)
    return 2.0 * (a * eps / (LN2 * beta) - 1.0) / (a * (np.sqrt(x) + 2.0 - eps))


def _solve_multiplier(a: np.ndarray, eps: float) -> float:
    def excess(beta):
        return _hwi_shares(beta, a, eps).sum() - 1.0

    lo, hi = 1.0, 1.0
    while excess(hi) > 0:
        hi *= 2.0
    while excess(lo) < 0:
        lo *= 0.5
        if lo < 1e-300:
            raise ValueError("could not bracket the Lagrange multiplier")
    # geometric bisection: the multiplier spans many decades
    for _ in range(400):
        mid = math.sqrt(lo * hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi / lo - 1.0 < 1e-15:
            break
    return math.sqrt(lo * hi)


def power_share_hwi(lam, rho: float, hw: HardwareProfile) -> PowerShare:
    """Impairment-aware power sharing.

    Streams are ranked by gain; the multiplier solving ``sum f_k(b) = 1`` over
    the active set is found by bisection and the weakest stream is switched
    off while any share comes out negative.  Ideal hardware falls back to
    :func:`water_filling`.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    if hw.is_ideal:
        return water_filling(lam, rho, hw.noise_power)
    lam = np.asarray(lam, dtype=float)
    live = _live(lam)
    idx = np.flatnonzero(live)
    idx = idx[np.argsort(-lam[idx], kind="stable")]
    a_all = rho * lam[idx] ** 2 / hw.noise_power
    eps = hw.quality

    active = len(idx)
    while active > 0:
        a = a_all[:active]
        beta = _solve_multiplier(a, eps)
        f = _hwi_shares(beta, a, eps)
        if np.all(f >= 0):
            break
        active -= 1
    else:  # pragma: no cover - a single stream always takes the whole budget
        raise ValueError("no feasible power sharing")

    p = np.zeros_like(lam)
    p[idx[:active]] = f / f.sum()
    return PowerShare(p=p, lagrange_b=-beta)


def ee_gradient(rho: float, share: PowerShare | np.ndarray, lam, hw: HardwareProfile,
                pm: PowerModel, bandwidth: float) -> float:
    """Closed-form derivative of the energy efficiency with respect to rho (bit/J per W)."""
    p = share.p if isinstance(share, PowerShare) else np.asarray(share, dtype=float)
    lam2 = np.asarray(lam, dtype=float) ** 2
    eps, s2 = hw.quality, hw.noise_power
    total = pm.total_power(rho)
    gain = lam2 * p
    slope = np.sum(total * gain * eps * s2 / ((rho * gain + s2) * (rho * gain * (1 - eps) + s2)))
    rate_nats = np.sum(np.log1p(eps * rho * gain / (rho * gain * (1 - eps) + s2)))
    return bandwidth / (LN2 * total**2) * (slope - rate_nats / pm.amplifier_efficiency)


def optimize_transmit_power(
    share: PowerShare | np.ndarray,
    lam,
    hw: HardwareProfile,
    pm: PowerModel,
    bandwidth: float,
    p_max: float,
    step: float = 1e-3,
    tol: float = 1e-6,
    max_iter: int = 100_000,
) -> TransmitPowerResult:
    """Gradient ascent of the energy efficiency over ``rho in (0, p_max]``.

    Starts at ``p_max`` and returns it when the gradient there is
    non-negative.  Otherwise iterates ``rho <- rho + iota * dE/drho`` until
    ``|dE/drho| < tol * |dE/drho(p_max)|``.  The first step length is
    ``step * p_max / |dE/drho(p_max)|``; later steps use the secant estimate
    of the inverse curvature (doubled where the efficiency is locally convex)
    and are halved whenever a step would lower the efficiency or leave the
    feasible interval.
    """
    if p_max <= 0 or step <= 0 or tol <= 0:
        raise ValueError("p_max, step and tol must be positive")

    def ee(r):
        return energy_efficiency_streams(share_p, lam, r, hw, pm, bandwidth)

    def grad(r):
        return ee_gradient(r, share_p, lam, hw, pm, bandwidth)

    share_p = share.p if isinstance(share, PowerShare) else np.asarray(share, dtype=float)
    rho = float(p_max)
    g = grad(rho)
    if g >= 0:
        return TransmitPowerResult(rho=rho, iterations=0, gradient=g)

    target = tol * abs(g)
    iota = step * p_max / abs(g)
    value = ee(rho)
    for it in range(1, max_iter + 1):
        cand = rho + iota * g
        if cand <= 0:
            iota *= 0.5
            continue
        cand = min(cand, p_max)
        if cand == rho:
            # update below the floating resolution of rho
            return TransmitPowerResult(rho=rho, iterations=it, gradient=g)
        cand_value = ee(cand)
        if cand_value < value - 1e-13 * abs(value):
            iota *= 0.5
            if iota * abs(g) <= 4 * np.finfo(float).eps * rho:
                # step below floating resolution of rho: this is the optimum to machine precision
                return TransmitPowerResult(rho=rho, iterations=it, gradient=g)
            continue
        cand_g = grad(cand)
        if cand_g != g and cand != rho:
            secant = -(cand - rho) / (cand_g - g)
            # outside the concave region the secant is useless: lengthen the step instead
            iota = secant if secant > 0 else 2.0 * iota
        rho, g, value = cand, cand_g, cand_value
        if abs(g) < target or (rho == p_max and g >= 0):
            return TransmitPowerResult(rho=rho, iterations=it, gradient=g)
    raise ConvergenceError(f"transmit-power ascent did not converge in {max_iter} iterations", rho)


def alternate_power_opt(
    lam,
    hw: HardwareProfile,
    pm: PowerModel,
    bandwidth: float,
    p_max: float,
    rounds: int = 4,
    hwi_aware: bool = True,
    step: float = 1e-3,
    tol: float = 1e-6,
    max_iter: int = 100_000,
) -> PowerSolution:
    """Alternate transmit-power and power-sharing updates for ``rounds`` rounds.

    Shares start uniform and ``rho`` starts at ``p_max``; each round first
    re-optimizes ``rho`` for the current shares and then the shares for the
    new ``rho``.  With ``hwi_aware=False`` both updates are designed for
    ideal hardware (water-filling), while the reported SE/EE always use
    ``hw``.  ``trace[r]`` holds the state after round ``r + 1``.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    lam = np.asarray(lam, dtype=float)
    _live(lam)
    design_hw = hw if hwi_aware else hw.ideal()
    share = PowerShare(p=np.full(lam.size, 1.0 / lam.size), lagrange_b=float("nan"))
    rho = p_max
    trace, iterations = [], 0
    for _ in range(rounds):
        res = optimize_transmit_power(share, lam, design_hw, pm, bandwidth, p_max, step, tol, max_iter)
        rho, iterations = res.rho, iterations + res.iterations
        share = power_share_hwi(lam, rho, design_hw)
        se = stream_rate(share.p, lam, rho, hw)
        trace.append(RoundState(rho=rho, p=share.p, se=se, ee=bandwidth * se / pm.total_power(rho)))
    return PowerSolution(rho=rho, share=share, ee=trace[-1].ee, se=trace[-1].se, iterations=iterations,
                         trace=trace)
