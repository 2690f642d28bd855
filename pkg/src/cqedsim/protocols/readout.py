"""Dispersive single-shot readout simulation and assignment fidelity."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..device import DeviceParams, coherence_budget, qubit_frequency

__all__ = ["IQRecord", "simulate_readout", "readout_fidelity", "readout_cloud_centers"]


@dataclass(frozen=True)
class IQRecord:
    """Demodulated single-shot (I, Q) values for one preparation."""

    shots: np.ndarray = field(repr=False)  # shape (n, 2)
    prep_label: str = "state0"             # "state0" | "state1"
    integration: float = 0.0               # s

    def __post_init__(self):
        s = np.asarray(self.shots, dtype=float)
        if s.ndim != 2 or s.shape[1] != 2:
            raise ValueError("shots must have shape (n, 2)")
        if not np.all(np.isfinite(s)):
            raise ValueError("shots must be finite")
        if self.prep_label not in ("state0", "state1"):
            raise ValueError(f"unknown prep label {self.prep_label!r}")
        object.__setattr__(self, "shots", s)


def readout_cloud_centers(device: DeviceParams, dv_bias: float = 0.0) -> tuple[complex, complex]:
    """Noise-free transmission at f_p = f_r for the qubit in |0> and |1>.

    The resonator is pulled by -chi (ground) or +chi (excited) relative to
    its bare frequency.
    """
    q = device.qubits[0]
    budget = coherence_budget(device.resonator, q, qubit_frequency(q.tuning, dv_bias))
    kappa = device.resonator.kappa
    a0 = (kappa / 2) / (1j * (-budget.chi) + kappa / 2)
    a1 = (kappa / 2) / (1j * (+budget.chi) + kappa / 2)
    return complex(a0), complex(a1)


def simulate_readout(
    device: DeviceParams,
    prep: str,
    shots: int,
    integration: float,
    snr_per_sqrt_s: float,
    rng: np.random.Generator,
    dv_bias: float = 0.0,
    t1: float | None = None,
) -> IQRecord:
    """Simulate ``shots`` integrated dispersive-readout measurements.

    Each shot integrates the state-dependent steady-state transmission
    over the readout window with additive white Gaussian noise.  A qubit
    prepared in |1> may relax mid-window (flip time drawn from T1); its
    signal is the time-weighted mixture of the two cloud centers.  Shots
    are rotated so the cloud separation lies along the I axis.
    """
    if prep not in ("state0", "state1"):
        raise ValueError(f"unknown preparation {prep!r}")
    if integration <= 0:
        raise ValueError("integration window must be positive")
    a0, a1 = readout_cloud_centers(device, dv_bias)
    if t1 is None:
        q = device.qubits[0]
        t1 = coherence_budget(device.resonator, q, qubit_frequency(q.tuning, dv_bias)).t1

    if prep == "state0":
        signal = np.full(shots, a0, dtype=complex)
    else:
        t_flip = rng.exponential(t1, size=shots)
        frac_excited = np.clip(t_flip / integration, 0.0, 1.0)
        signal = frac_excited * a1 + (1 - frac_excited) * a0

    # White noise integrated over the window: std ~ 1/(snr * sqrt(T)).
    sigma = 1.0 / (snr_per_sqrt_s * np.sqrt(integration)) if np.isfinite(snr_per_sqrt_s) else 0.0
    noise = sigma * (rng.standard_normal(shots) + 1j * rng.standard_normal(shots))
    signal = signal + noise

    rot = np.exp(-1j * np.angle(a1 - a0))
    signal = signal * rot
    return IQRecord(
        shots=np.column_stack([signal.real, signal.imag]),
        prep_label=prep,
        integration=integration,
    )


def readout_fidelity(rec0: IQRecord, rec1: IQRecord) -> tuple[float, float]:
    """Assignment fidelity 1 - (P(1|0) + P(0|1))/2 and the optimal threshold.

    Shots are projected onto the axis connecting the cloud means; the
    threshold maximizing the balanced assignment fidelity is found by an
    exhaustive scan over candidate boundaries.
    """
    s0 = rec0.shots
    s1 = rec1.shots
    if s0.size == 0 or s1.size == 0:
        raise ValueError("records must be non-empty")
    mu0 = s0.mean(axis=0)
    mu1 = s1.mean(axis=0)
    total_spread = s0.std(axis=0).max() + s1.std(axis=0).max()
    axis = mu1 - mu0
    norm = np.hypot(*axis)
    if norm == 0:
        if total_spread == 0:
            raise ValueError("degenerate zero-variance clouds")
        axis = np.array([1.0, 0.0])
    else:
        axis = axis / norm
    x0 = s0 @ axis
    x1 = s1 @ axis
    if x0.std() == 0 and x1.std() == 0:
        # Two point-like clouds: any threshold between them is perfect.
        return 1.0, float((x0[0] + x1[0]) / 2)
    candidates = np.unique(np.concatenate([x0, x1]))
    mids = (candidates[:-1] + candidates[1:]) / 2
    if mids.size == 0:
        raise ValueError("degenerate clouds: single readout value")
    # P(assign 1 | prep 0) = frac(x0 > thr); P(assign 0 | prep 1) = frac(x1 <= thr).
    err0 = 1.0 - np.searchsorted(np.sort(x0), mids, side="right") / x0.size
    err1 = np.searchsorted(np.sort(x1), mids, side="right") / x1.size
    fid = 1.0 - 0.5 * (err0 + err1)
    best = int(np.argmax(fid))
    return float(fid[best]), float(mids[best])
