"""Experiment orchestration: coherence sweeps, readout, randomized benchmarking."""

from .cliffords import CliffordGate, CliffordGroup, clifford_sequence, get_group
from .coherence import PopulationTrace, cpmg_pulse_times, run_coherence
from .rb import RBResult, run_rb
from .readout import IQRecord, readout_cloud_centers, readout_fidelity, simulate_readout

__all__ = [
    "CliffordGate",
    "CliffordGroup",
    "clifford_sequence",
    "get_group",
    "PopulationTrace",
    "cpmg_pulse_times",
    "run_coherence",
    "RBResult",
    "run_rb",
    "IQRecord",
    "readout_cloud_centers",
    "readout_fidelity",
    "simulate_readout",
]
