"""Simulator for switch-controlled holographic-surface hybrid beamforming
with transceiver hardware impairments and energy-efficiency maximization."""

from .benchmarks import Architecture, ArchitectureKind, analog_stage, architecture_power, power_model_for
from .channel import ArrayGeometry, ChannelSet, ClusterSpec, generate_channel, steering_vector
from .digital import BasebandChannel, SvdBeamformers, baseband_channel, svd_beamformers
from .holographic import (ExcitingWaveCircuit, GainMatrix, SwitchPattern, brute_force_switch_pattern,
                          build_exciting_wave_circuit, build_gain_matrix, pattern_objective,
                          solve_switch_pattern_ed)
from .link import (LinkMetrics, ee_upper_bound, link_metrics, monte_carlo_sinr, se_saturation,
                   sinr_analytic, spectral_efficiency)
from .pipeline import BeamformerSolution, DesignSettings, evaluate_architecture, full_design
from .power import (ConvergenceError, HardwareProfile, PowerModel, PowerShare, PowerSolution,
                    alternate_power_opt, ee_gradient, optimize_transmit_power, power_share_hwi,
                    water_filling)

__version__ = "0.1.0"
