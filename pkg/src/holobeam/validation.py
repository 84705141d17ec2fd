"""Oracle checks for the acceptance targets of the simulator.

Each ``check_*`` function runs one self-contained experiment and returns a
:class:`CheckResult`.  They back the ``simulate validate`` command and the
acceptance test-suite.
"""

from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from .benchmarks import Architecture, ArchitectureKind, power_model_for
from .channel import ArrayGeometry, ClusterSpec, generate_channel
from .digital import baseband_channel, svd_beamformers
from .experiment import Scenario, emit_csv, run_sweep
from .holographic import (brute_force_switch_pattern, build_exciting_wave_circuit, build_gain_matrix,
                          pattern_objective, solve_switch_pattern_ed)
from .link import ee_upper_bound, gains_from_baseband, monte_carlo_sinr, se_saturation, sinr_analytic
from .pipeline import DesignSettings, evaluate_architecture
from .power import (HardwareProfile, PowerModel, alternate_power_opt, ee_gradient,
                    energy_efficiency_streams, optimize_transmit_power, power_share_hwi, water_filling)

__all__ = ["CheckResult", "CHECKS", "run_checks", "ceiling_table"]


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:>2}. {self.name}: {self.detail}"


def _rng(tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(20240601, spawn_key=(tag,)))


def _mean_se(epsilon: float, trials: int) -> float:
    sc = Scenario(epsilon_t=epsilon, epsilon_r=epsilon, trials=trials,
                  sweep={"axis": "snr_db", "values": [60.0]})
    return next(r.se for r in run_sweep(sc) if r.is_mean)


def check_se_saturation(trials: int = 50) -> CheckResult:
    start = time.perf_counter()
    rows, ok = [], True
    for eps, target in ((0.8, 11.79), (0.6, 5.151)):
        se = _mean_se(eps, trials)
        ok &= abs(se - target) <= 0.02 * target
        rows.append(f"eps={eps}: {se:.4f} (target {target})")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 120
    return CheckResult(1, "SE saturation at 60 dB", ok, "; ".join(rows) + f"; {elapsed:.1f}s")


def ceiling_table(scenario: Scenario, epsilons=None) -> list[dict]:
    """SE ceiling and EE bound per hardware quality and architecture.

    Without explicit ``epsilons`` an epsilon sweep contributes its values
    (applied to both ends) and any other scenario its own hardware.  Ideal
    hardware has no ceiling and reports ``inf``.
    """
    noise = scenario.hardware().noise_power
    if epsilons is not None:
        profiles = [HardwareProfile(e, e, noise) for e in epsilons]
    elif scenario.axis == "epsilon":
        profiles = [HardwareProfile(e, e, noise) for e in scenario.values]
    else:
        profiles = [scenario.hardware()]
    n = scenario.nx * scenario.ny
    rows = []
    for hw in profiles:
        for kind in scenario.kinds():
            pm = power_model_for(kind, n, scenario.rf_chains, scenario.prices())
            ideal = hw.is_ideal
            rows.append({
                "epsilon_t": hw.epsilon_t, "epsilon_r": hw.epsilon_r, "architecture": kind.label,
                "se_ceiling": math.inf if ideal else se_saturation(scenario.users, hw),
                "ee_bound": math.inf if ideal else ee_upper_bound(scenario.users, hw, pm, scenario.bandwidth_hz),
            })
    return rows


def check_ee_ceilings() -> CheckResult:
    sc = Scenario(nx=16, ny=16, sweep={"axis": "epsilon", "values": [0.6, 0.8]})
    got = {row["epsilon_t"]: row["ee_bound"] / 1e6 for row in ceiling_table(sc)}
    ok = all(abs(got[e] - t) <= 0.005 * t for e, t in ((0.8, 22.99), (0.6, 10.04)))
    return CheckResult(2, "EE ceilings", ok, f"eps=0.8: {got[0.8]:.4f} Mbit/J, eps=0.6: {got[0.6]:.4f} Mbit/J")


def check_ed_vs_oracle(instances: int = 200) -> CheckResult:
    start = time.perf_counter()
    rng = _rng(3)
    geom, spec = ArrayGeometry(4, 2), ClusterSpec()
    circuit = build_exciting_wave_circuit(8, 2)
    ratios, never_below_all_on = [], True
    for _ in range(instances):
        gain = build_gain_matrix(generate_channel(2, geom, spec, -80.0, rng), circuit)
        ed = solve_switch_pattern_ed(gain).objective_value
        best = brute_force_switch_pattern(gain).objective_value
        all_on = pattern_objective(gain, np.ones(8))
        ratios.append(ed / best)
        never_below_all_on &= ed >= all_on * (1 - 1e-12)
    med = float(np.median(ratios))
    elapsed = time.perf_counter() - start
    ok = med >= 0.9 and never_below_all_on and elapsed < 60
    return CheckResult(3, "switch pattern vs brute force", ok,
                       f"median ratio {med:.4f}, min {min(ratios):.4f}, "
                       f"never below all-on: {never_below_all_on}; {elapsed:.1f}s")


def check_water_filling_reduction(instances: int = 100) -> CheckResult:
    rng = _rng(4)
    worst = 0.0
    for _ in range(instances):
        k = int(rng.integers(1, 9))
        lam = np.sort(rng.lognormal(-12, 1.5, k))[::-1]
        rho, noise = 10 ** rng.uniform(-3, 2), 10 ** rng.uniform(-14, -10)
        hwi = power_share_hwi(lam, rho, HardwareProfile(1.0, 1.0, noise)).p
        worst = max(worst, float(np.max(np.abs(hwi - water_filling(lam, rho, noise).p))))
    return CheckResult(4, "ideal-hardware sharing equals water-filling", worst <= 1e-9,
                       f"max entry difference {worst:.2e}")


def _grid_share(lam, rho, hw, step=1e-5):
    p1 = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
    p = np.stack([p1, 1 - p1], axis=1)
    a = rho * np.asarray(lam) ** 2 * p
    eps = hw.quality
    rate = np.sum(np.log2(1 + eps * a / ((1 - eps) * a + hw.noise_power)), axis=1)
    return p[np.argmax(rate)]


def check_kkt_grid(instances: int = 50) -> CheckResult:
    rng = _rng(5)
    worst = 0.0
    for _ in range(instances):
        lam = np.sort(rng.lognormal(-12, 1.0, 2))[::-1]
        eps = rng.uniform(0.5, 0.99)
        hw = HardwareProfile(eps, rng.uniform(0.5, 1.0), 1e-12)
        rho = 10 ** rng.uniform(-3, 1)
        worst = max(worst, float(np.max(np.abs(power_share_hwi(lam, rho, hw).p - _grid_share(lam, rho, hw)))))
    return CheckResult(5, "impaired sharing vs grid search", worst <= 1e-4, f"max share difference {worst:.2e}")


def _random_power_instance(rng):
    k = int(rng.integers(1, 9))
    lam = np.sort(rng.lognormal(-12, 1.0, k))[::-1]
    eps = rng.uniform(0.5, 1.0)
    hw = HardwareProfile(eps, eps, 1e-12)
    pm = PowerModel(n_rf=8, n_sw=int(rng.choice([64, 256])))
    p = rng.dirichlet(np.ones(k))
    return lam, hw, pm, p


def check_gradient(instances: int = 100) -> CheckResult:
    rng = _rng(6)
    bw = 20e6
    fd_worst, grid_worst = 0.0, 0.0
    for _ in range(instances):
        lam, hw, pm, p = _random_power_instance(rng)
        rho = 10 ** rng.uniform(-3, 1)
        h = 1e-6 * rho
        fd = (energy_efficiency_streams(p, lam, rho + h, hw, pm, bw)
              - energy_efficiency_streams(p, lam, rho - h, hw, pm, bw)) / (2 * h)
        an = ee_gradient(rho, p, lam, hw, pm, bw)
        fd_worst = max(fd_worst, abs(an - fd) / max(abs(an), 1e-300))

        p_max = 10 ** rng.uniform(-2, 2)
        star = optimize_transmit_power(p, lam, hw, pm, bw, p_max).rho
        best = max(energy_efficiency_streams(p, lam, r, hw, pm, bw) for r in np.linspace(p_max / 1000, p_max, 1000))
        got = energy_efficiency_streams(p, lam, star, hw, pm, bw)
        grid_worst = max(grid_worst, (best - got) / best)
    ok = fd_worst <= 1e-6 and grid_worst <= 1e-6
    return CheckResult(6, "EE gradient and transmit-power optimum", ok,
                       f"max FD rel. error {fd_worst:.2e}; max shortfall vs grid {grid_worst:.2e}")


def check_monte_carlo(trials: int = 100_000) -> CheckResult:
    rng = _rng(7)
    channels = generate_channel(8, ArrayGeometry(8, 8), ClusterSpec(), -80.0, rng)
    circuit = build_exciting_wave_circuit(64, 8)
    rows, ok = [], True
    for eps in (1.0, 0.8, 0.6):
        hw = HardwareProfile(eps, eps, 1e-12)
        sol, _ = evaluate_architecture(ArchitectureKind(Architecture.RHS_SWITCH), channels, circuit, hw,
                                       PowerModel(), DesignSettings(fixed_rho=1e-3))
        g, bf = sol.baseband, sol.beamformers
        analytic = sinr_analytic(gains_from_baseband(g, bf), sol.shares, sol.rho, hw)
        live = sol.shares > 0
        mc = monte_carlo_sinr(g, bf, sol.shares, sol.rho, hw, trials, rng)
        err = float(np.max(np.abs(mc[live] / analytic[live] - 1)))
        ok &= err <= 0.02
        rows.append(f"eps={eps}: {100 * err:.2f}%")
    return CheckResult(7, "Monte-Carlo vs analytic SINR", ok, "max rel. error " + ", ".join(rows))


def check_svd_diagonalization(channels_per_arch: int = 20) -> CheckResult:
    rng = _rng(8)
    geom, spec = ArrayGeometry(8, 8), ClusterSpec()
    circuit = build_exciting_wave_circuit(64, 8)
    hw, settings = HardwareProfile(), DesignSettings(fixed_rho=1e-3)
    off_worst = diag_worst = 0.0
    for _ in range(channels_per_arch):
        channels = generate_channel(8, geom, spec, -80.0, rng)
        for tag in Architecture:
            sol, _ = evaluate_architecture(ArchitectureKind.parse(tag.value), channels, circuit, hw, PowerModel(),
                                           settings)
            c = sol.beamformers.effective(sol.baseband.g)
            off_worst = max(off_worst, float(np.max(np.abs(c - np.diag(np.diag(c))))))
            diag_worst = max(diag_worst, float(np.max(np.abs(np.diag(c) - sol.beamformers.lam))))
    ok = off_worst <= 1e-9 and diag_worst <= 1e-9
    return CheckResult(8, "SVD diagonalization", ok,
                       f"max off-diagonal {off_worst:.2e}, max diagonal error {diag_worst:.2e}")


ORDER = ("RhsSwitch", "PsaWithSwitches", "SubConnectedPSA", "FullyConnectedPSA")


def check_architecture_ordering(trials: int = 100) -> CheckResult:
    sc = Scenario(nx=16, ny=16, trials=trials, architectures=list(ORDER) + ["FullyDigital"],
                  sweep={"axis": "pmax_dbm", "values": [30.0]})
    ee = {r.architecture: r.ee for r in run_sweep(sc) if r.is_mean}
    ok = all(ee[a] > ee[b] for a, b in zip(ORDER, ORDER[1:])) and ee["RhsSwitch"] > ee["FullyDigital"]
    detail = ", ".join(f"{k} {v / 1e6:.2f}" for k, v in sorted(ee.items(), key=lambda kv: -kv[1]))
    return CheckResult(9, "architecture EE ordering (Mbit/J)", ok, detail)


def check_hwi_gain(trials: int = 100) -> CheckResult:
    rows, ok = [], True
    for pmax in (30.0, 40.0):
        base = Scenario(epsilon_t=0.6, epsilon_r=0.6, trials=trials, sweep={"axis": "pmax_dbm", "values": [pmax]})
        consider = [r.ee for r in run_sweep(base) if not r.is_mean]
        ignore = [r.ee for r in run_sweep(base.replace(hwi_mode="ignore")) if not r.is_mean]
        diff = np.array(consider) - np.array(ignore)
        nonzero = diff[diff != 0]
        wins = int(np.sum(nonzero > 0))
        pval = binomtest(wins, nonzero.size, 0.5, alternative="greater").pvalue if nonzero.size else 1.0
        margin = float(np.mean(diff))
        ok &= margin > 0 and pval < 0.05
        rows.append(f"{pmax:g} dBm: margin {margin / 1e6:.3f} Mbit/J, wins {wins}/{nonzero.size}, p={pval:.1e}")
    return CheckResult(10, "impairment-aware gain", ok, "; ".join(rows))


def check_alternation(instances: int = 50) -> CheckResult:
    rng = _rng(11)
    geom, spec = ArrayGeometry(8, 8), ClusterSpec()
    circuit = build_exciting_wave_circuit(64, 8)
    pm = power_model_for(ArchitectureKind(Architecture.RHS_SWITCH), 64, 8, PowerModel())
    worst_drop, worst_gap = 0.0, 0.0
    for i in range(instances):
        eps = (0.6, 0.8, 1.0)[i % 3]
        hw = HardwareProfile(eps, eps, 1e-12)
        channels = generate_channel(8, geom, spec, -80.0, rng)
        g = baseband_channel(channels, solve_switch_pattern_ed(build_gain_matrix(channels, circuit)), circuit)
        lam = svd_beamformers(g, 8).lam
        hist = alternate_power_opt(lam, hw, pm, 20e6, 1.0, rounds=4).ee_history
        worst_drop = max(worst_drop, max(-(b - a) / a for a, b in zip(hist, hist[1:])))
        worst_gap = max(worst_gap, abs(hist[1] - hist[3]) / hist[3])
    ok = worst_drop <= 1e-12 and worst_gap <= 0.005
    return CheckResult(11, "alternation convergence", ok,
                       f"largest relative EE drop {worst_drop:.1e}, largest round-2/round-4 gap {worst_gap:.1e}")


def check_determinism() -> CheckResult:
    sc = Scenario(trials=4, architectures=["RhsSwitch", "SubConnectedPSA"], epsilon_t=0.8, epsilon_r=0.8,
                  sweep={"axis": "pmax_dbm", "values": [20.0, 30.0]})
    with tempfile.TemporaryDirectory() as tmp:
        paths = [emit_csv(run_sweep(sc, threads=t), Path(tmp) / f"run{i}.csv") for i, t in enumerate((1, 1, 4))]
        blobs = [p.read_bytes() for p in paths]
    same = blobs[0] == blobs[1]
    threads_same = blobs[0] == blobs[2]
    return CheckResult(12, "byte-identical CSV", same and threads_same,
                       f"repeat run identical: {same}; 4-thread run identical: {threads_same}")


CHECKS = (
    check_se_saturation,
    check_ee_ceilings,
    check_ed_vs_oracle,
    check_water_filling_reduction,
    check_kkt_grid,
    check_gradient,
    check_monte_carlo,
    check_svd_diagonalization,
    check_architecture_ordering,
    check_hwi_gain,
    check_alternation,
    check_determinism,
)


def run_checks(selected=None) -> list[CheckResult]:
    wanted = set(selected) if selected else None
    return [check() for i, check in enumerate(CHECKS, 1) if wanted is None or i in wanted]
