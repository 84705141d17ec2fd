"""Seeded Monte-Carlo sweeps over scenario parameters, with CSV/JSON outputs.

Channel realizations are drawn from independent substreams: trial ``t`` of
sweep point ``i`` uses ``numpy.random.SeedSequence(seed, spawn_key=(i, t))``.
The ``iterations`` axis is algorithmic, so all its points share the
channels of point 0 and are read off one alternation run per trial.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .benchmarks import Architecture, ArchitectureKind
from .channel import ArrayGeometry, ClusterSpec, generate_channel
from .holographic import build_exciting_wave_circuit
from .pipeline import DesignSettings, evaluate_architecture
from .power import HardwareProfile, PowerModel

__all__ = [
    "AXES",
    "CSV_COLUMNS",
    "ScenarioError",
    "Scenario",
    "SweepRecord",
    "trial_rng",
    "run_sweep",
    "emit_csv",
    "read_csv",
    "emit_plot_script",
    "emit_manifest",
    "dbm_to_watts",
]

AXES = ("snr_db", "pmax_dbm", "epsilon", "rf_chains", "users", "elements", "iterations")
HWI_MODES = ("consider", "ignore")
CSV_COLUMNS = ("axis", "value", "architecture", "hwi_mode", "trial", "is_mean", "se", "ee", "rho",
               "total_power", "shares", "seed", "config_hash")
FULL_SCALE_TRIALS = 200


class ScenarioError(ValueError):
    """Invalid scenario configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


@dataclass(frozen=True)
class Scenario:
    users: int = 8
    nx: int = 8
    ny: int = 8
    spacing_wavelengths: float = 0.5
    clusters: int = 8
    paths_per_cluster: int = 10
    elevation_spread_deg: float = 7.5
    azimuth_spread_deg: float = 7.5
    mean_large_scale_db: float = -80.0
    seed: int = 0
    rf_chains: int = 8
    dft_two_pi: bool = True
    pmax_dbm: float = 30.0
    epsilon_t: float = 1.0
    epsilon_r: float = 1.0
    noise_dbm: float = -90.0
    bandwidth_hz: float = 20e6
    amplifier_efficiency: float = 0.39
    p_syn_w: float = 2.0
    p_rf_w: float = 1.0
    p_ps_w: float = 0.03
    p_sw_w: float = 0.001
    gd_step: float = 1e-3
    gd_tol: float = 1e-6
    gd_max_iter: int = 100_000
    alternation_rounds: int = 4
    architectures: tuple[str, ...] = ("RhsSwitch",)
    kappa: float = 0.5
    trials: int = 50
    sweep: dict = field(default_factory=lambda: {"axis": "pmax_dbm", "values": [30.0]})
    hwi_mode: str = "consider"

    def __post_init__(self):
        object.__setattr__(self, "architectures", tuple(self.architectures))
        object.__setattr__(self, "sweep", {"axis": self.sweep.get("axis"),
                                           "values": list(self.sweep.get("values", []))})
        self.validate()

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> "Scenario":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ScenarioError(unknown[0], "unknown configuration key")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        import yaml

        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise ScenarioError("config", f"{path} must hold a key-value mapping")
        return cls.from_mapping(data)

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["architectures"] = list(self.architectures)
        return d

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def full_scale(self) -> "Scenario":
        return self.replace(nx=16, ny=16, trials=max(self.trials, FULL_SCALE_TRIALS))

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @property
    def axis(self) -> str:
        return self.sweep["axis"]

    @property
    def values(self) -> list:
        return self.sweep["values"]

    def validate(self) -> None:
        if self.axis not in AXES:
            raise ScenarioError("sweep.axis", f"unknown axis {self.axis!r}, expected one of {AXES}")
        values = self.values
        if not values:
            raise ScenarioError("sweep.values", "must not be empty")
        if any(b < a for a, b in zip(values, values[1:])):
            raise ScenarioError("sweep.values", "must be sorted ascending")
        if self.trials < 1:
            raise ScenarioError("trials", "must be >= 1")
        if self.hwi_mode not in HWI_MODES:
            raise ScenarioError("hwi_mode", f"expected one of {HWI_MODES}, got {self.hwi_mode!r}")
        if not self.architectures:
            raise ScenarioError("architectures", "must list at least one architecture")
        for tag in self.architectures:
            try:
                Architecture(tag)
            except ValueError:
                raise ScenarioError("architectures", f"unknown architecture {tag!r}") from None
        if not 0.0 <= self.kappa <= 1.0:
            raise ScenarioError("kappa", "must lie in [0, 1]")
        if self.alternation_rounds < 1:
            raise ScenarioError("alternation_rounds", "must be >= 1")
        for key in ("epsilon_t", "epsilon_r"):
            if not 0.0 <= getattr(self, key) <= 1.0:
                raise ScenarioError(key, "must lie in [0, 1]")
        if self.axis == "epsilon" and not all(0.0 <= v <= 1.0 for v in values):
            raise ScenarioError("sweep.values", "epsilon values must lie in [0, 1]")
        if self.axis in ("rf_chains", "users", "elements", "iterations"):
            if not all(float(v).is_integer() and v >= 1 for v in values):
                raise ScenarioError("sweep.values", f"{self.axis} values must be positive integers")
        if self.axis == "elements":
            for v in values:
                if math.isqrt(int(v)) ** 2 != int(v):
                    raise ScenarioError("sweep.values", f"elements value {v} is not a square grid size")
        for value in values:
            self._check_point({**self.to_dict(), **self._point_changes(value)})

    def _check_point(self, fields: dict) -> None:
        key = self.axis if self.axis in ("users", "rf_chains", "elements") else None
        n = fields["nx"] * fields["ny"]
        users, chains = fields["users"], fields["rf_chains"]
        if users > chains:
            raise ScenarioError(key or "users", f"{users} users exceed {chains} RF chains")
        if chains > n:
            raise ScenarioError(key or "rf_chains", f"{chains} RF chains exceed {n} elements")
        sub = {Architecture.SUB_CONNECTED_PSA.value, Architecture.PSA_WITH_SWITCHES.value}
        if sub & set(self.architectures) and n % chains:
            raise ScenarioError(key or "rf_chains",
                                f"sub-connected architectures need rf_chains | elements ({chains} vs {n})")

    def _point_changes(self, value) -> dict:
        axis = self.axis
        if axis == "pmax_dbm":
            return {"pmax_dbm": float(value)}
        if axis == "epsilon":
            return {"epsilon_t": float(value), "epsilon_r": float(value)}
        if axis == "rf_chains":
            return {"rf_chains": int(value)}
        if axis == "users":
            return {"users": int(value)}
        if axis == "elements":
            side = math.isqrt(int(value))
            return {"nx": side, "ny": side}
        return {}

    def point(self, value) -> "Scenario":
        """Scenario with the sweep axis set to ``value`` (no-op for snr_db/iterations)."""
        changes = self._point_changes(value)
        return dataclasses.replace(self, **changes) if changes else self

    # model objects
    def hardware(self) -> HardwareProfile:
        return HardwareProfile(self.epsilon_t, self.epsilon_r, dbm_to_watts(self.noise_dbm))

    def prices(self) -> PowerModel:
        return PowerModel(amplifier_efficiency=self.amplifier_efficiency, p_syn=self.p_syn_w,
                          p_rf=self.p_rf_w, p_ps=self.p_ps_w, p_sw=self.p_sw_w)

    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry(self.nx, self.ny, self.spacing_wavelengths, self.spacing_wavelengths)

    def clusters_spec(self) -> ClusterSpec:
        return ClusterSpec(num_clusters=self.clusters, paths_per_cluster=self.paths_per_cluster,
                           elevation_spread_deg=self.elevation_spread_deg,
                           azimuth_spread_deg=self.azimuth_spread_deg)

    def kinds(self) -> list[ArchitectureKind]:
        return [ArchitectureKind.parse(tag, self.kappa) for tag in self.architectures]

    def settings(self, fixed_rho: float | None = None, rounds: int | None = None) -> DesignSettings:
        return DesignSettings(bandwidth=self.bandwidth_hz, p_max=dbm_to_watts(self.pmax_dbm),
                              rounds=rounds or self.alternation_rounds,
                              hwi_aware=self.hwi_mode == "consider", gd_step=self.gd_step,
                              gd_tol=self.gd_tol, gd_max_iter=self.gd_max_iter, fixed_rho=fixed_rho)

    def snr_to_rho(self, snr_db: float) -> float:
        """Transmit power giving average SNR ``rho * mean_gain / noise``."""
        return 10.0 ** (snr_db / 10.0) * dbm_to_watts(self.noise_dbm) / 10.0 ** (self.mean_large_scale_db / 10.0)


@dataclass(frozen=True)
class SweepRecord:
    axis: str
    value: float
    architecture: str
    hwi_mode: str
    trial: int | None
    se: float
    ee: float
    rho: float
    total_power: float
    shares: tuple[float, ...]
    seed: int
    config_hash: str

    @property
    def is_mean(self) -> bool:
        return self.trial is None


def trial_rng(seed: int, point: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point, trial)))


def _run_trial(scenario: Scenario, index: int, trial: int) -> list[list[tuple]]:
    """Per architecture, a list of (value, se, ee, rho, total_power, shares) rows."""
    axis, value = scenario.axis, scenario.values[index]
    sc = scenario.point(value)
    chan_index = 0 if axis == "iterations" else index
    rng = trial_rng(scenario.seed, chan_index, trial)
    channels = generate_channel(sc.users, sc.geometry(), sc.clusters_spec(), sc.mean_large_scale_db, rng)
    circuit = build_exciting_wave_circuit(sc.nx * sc.ny, sc.rf_chains, two_pi=sc.dft_two_pi)
    hw, prices = sc.hardware(), sc.prices()
    if axis == "snr_db":
        settings = sc.settings(fixed_rho=sc.snr_to_rho(float(value)))
    elif axis == "iterations":
        settings = sc.settings(rounds=int(value))
    else:
        settings = sc.settings()
    out = []
    for kind in sc.kinds():
        solution, metrics = evaluate_architecture(kind, channels, circuit, hw, prices, settings)
        out.append((metrics.se, metrics.ee, solution.rho, metrics.total_power,
                    tuple(float(x) for x in solution.shares)))
    return out


def _run_iterations_trial(scenario: Scenario, trial: int) -> list[list[tuple]]:
    """All round counts of one trial from a single alternation run."""
    rounds = int(max(scenario.values))
    sc = scenario
    rng = trial_rng(sc.seed, 0, trial)
    channels = generate_channel(sc.users, sc.geometry(), sc.clusters_spec(), sc.mean_large_scale_db, rng)
    circuit = build_exciting_wave_circuit(sc.nx * sc.ny, sc.rf_chains, two_pi=sc.dft_two_pi)
    hw, prices = sc.hardware(), sc.prices()
    per_kind = []
    for kind in sc.kinds():
        solution, _ = evaluate_architecture(kind, channels, circuit, hw, prices, sc.settings(rounds=rounds))
        pm = solution.power_model
        per_kind.append([(st.se, st.ee, st.rho, pm.total_power(st.rho), tuple(float(x) for x in st.p))
                         for st in solution.power.trace])
    return per_kind


def run_sweep(scenario: Scenario, threads: int = 1) -> list[SweepRecord]:
    """Run every (sweep point, trial) and return trial and mean records.

    Records are ordered by (axis index, architecture, trial), each
    architecture's trial rows followed by its mean row, independent of
    ``threads``.
    """
    axis, values = scenario.axis, scenario.values
    trials = range(scenario.trials)
    if axis == "iterations":
        with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
            runs = list(pool.map(lambda t: _run_iterations_trial(scenario, t), trials))
        # results[i][t][a]
        results = [[[run[a][int(v) - 1] for a in range(len(run))] for run in runs] for v in values]
    else:
        tasks = [(i, t) for i in range(len(values)) for t in trials]
        with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
            flat = list(pool.map(lambda it: _run_trial(scenario, *it), tasks))
        results = [flat[i * scenario.trials:(i + 1) * scenario.trials] for i in range(len(values))]

    records = []
    chash = scenario.config_hash
    for i, value in enumerate(values):
        for a, tag in enumerate(scenario.architectures):
            rows = [results[i][t][a] for t in trials]
            for t, (se, ee, rho, tp, shares) in enumerate(rows):
                records.append(SweepRecord(axis, float(value), tag, scenario.hwi_mode, t, se, ee, rho, tp,
                                           shares, scenario.seed, chash))
            mean = [float(np.mean([r[j] for r in rows])) for j in range(4)]
            shares = tuple(float(x) for x in np.mean([r[4] for r in rows], axis=0))
            records.append(SweepRecord(axis, float(value), tag, scenario.hwi_mode, None, *mean, shares,
                                       scenario.seed, chash))
    return records


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def emit_csv(records: list[SweepRecord], path: str | Path) -> Path:
    """Write records as UTF-8 CSV with columns :data:`CSV_COLUMNS`.

    Mean rows have an empty ``trial`` and ``is_mean=1``.  Floats carry nine
    significant digits; shares are ``;``-separated.
    """
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for r in records:
                writer.writerow([
                    r.axis, _fmt(r.value), r.architecture, r.hwi_mode,
                    "" if r.trial is None else r.trial, int(r.is_mean),
                    _fmt(r.se), _fmt(r.ee), _fmt(r.rho), _fmt(r.total_power),
                    ";".join(_fmt(x) for x in r.shares), r.seed, r.config_hash,
                ])
    except OSError as exc:
        raise OSError(f"could not write records to {path}: {exc}") from exc
    return path


def read_csv(path: str | Path) -> list[SweepRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            SweepRecord(
                axis=row["axis"], value=float(row["value"]), architecture=row["architecture"],
                hwi_mode=row["hwi_mode"], trial=None if row["trial"] == "" else int(row["trial"]),
                se=float(row["se"]), ee=float(row["ee"]), rho=float(row["rho"]),
                total_power=float(row["total_power"]),
                shares=tuple(float(x) for x in row["shares"].split(";") if x),
                seed=int(row["seed"]), config_hash=row["config_hash"],
            )
            for row in reader
        ]


_PLOT_TEMPLATE = '''\
# Plots mean records of a sweep; run with: python plot_{axis}.script [records.csv]
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "records.csv"
curves = defaultdict(list)
with open(path, encoding="utf-8") as fh:
    for row in csv.DictReader(fh):
        if row["is_mean"] == "1":
            curves[row["architecture"]].append((float(row["value"]), float(row["se"]), float(row["ee"])))

fig, (ax_se, ax_ee) = plt.subplots(1, 2, figsize=(10, 4))
for arch, pts in sorted(curves.items()):
    pts.sort()
    x = [p[0] for p in pts]
    ax_se.plot(x, [p[1] for p in pts], marker="o", label=arch)
    ax_ee.plot(x, [p[2] / 1e6 for p in pts], marker="o", label=arch)
ax_se.set_xlabel("{axis}")
ax_se.set_ylabel("spectral efficiency (bit/s/Hz)")
ax_ee.set_xlabel("{axis}")
ax_ee.set_ylabel("energy efficiency (Mbit/J)")
for ax in (ax_se, ax_ee):
    ax.grid(True, alpha=0.3)
    ax.legend()
fig.tight_layout()
fig.savefig("plot_{axis}.png", dpi=150)
'''


def emit_plot_script(axis: str, out_dir: str | Path) -> Path:
    path = Path(out_dir) / f"plot_{axis}.script"
    path.write_text(_PLOT_TEMPLATE.format(axis=axis), encoding="utf-8")
    return path


def emit_manifest(scenario: Scenario, out_dir: str | Path, extra: dict | None = None) -> Path:
    from . import __version__

    data = {
        "config_hash": scenario.config_hash,
        "seed": scenario.seed,
        "config": scenario.to_dict(),
        "versions": {"holobeam": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
    }
    data.update(extra or {})
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
