"""Coherence-time experiments: Rabi, T1, Ramsey, Hahn echo, CPMG.

Delay-dominated experiments use the reduced qubit-only model: relaxation
and white dephasing enter as closed-form rates from the coherence budget,
and low-frequency charge noise enters as per-shot stochastic frequency
modulation through the tuning map, Monte-Carlo averaged over noise
realizations.  The full Lindblad model in :mod:`cqedsim.dynamics` is used
to cross-validate this shortcut.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from ..device import (
    ChargeNoiseModel,
    DeviceParams,
    coherence_budget,
    qubit_frequency,
    sample_noise_ensemble,
)

__all__ = ["PopulationTrace", "run_coherence", "cpmg_pulse_times"]

COHERENCE_KINDS = ("rabi", "t1", "ramsey", "echo", "cpmg")


@dataclass(frozen=True)
class PopulationTrace:
    """Mean excited-state population versus pulse duration or delay."""

    x: np.ndarray                       # s
    p_e: np.ndarray = field(repr=False)
    shots_per_point: int = 0            # 0 means exact ensemble mean
    std: np.ndarray | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        pe = np.asarray(self.p_e, dtype=float)
        if x.ndim != 1 or x.size < 2 or not np.all(np.diff(x) > 0):
            raise ValueError("x must be strictly increasing")
        if pe.shape != x.shape:
            raise ValueError("p_e shape does not match x")
        if np.any(pe < -1e-9) or np.any(pe > 1 + 1e-9):
            raise ValueError("populations outside [0, 1]")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p_e", np.clip(pe, 0.0, 1.0))


def cpmg_pulse_times(total_delay: float, n_pi: int) -> np.ndarray:
    """Equally spaced CPMG pi-pulse times: t*(2k-1)/(2*n_pi), k = 1..n_pi."""
    k = np.arange(1, n_pi + 1)
    return total_delay * (2 * k - 1) / (2 * n_pi)


def _toggled_phases(cum_phase: np.ndarray, t_grid: np.ndarray, delay: float, n_pi: int) -> np.ndarray:
    """Per-realization free-evolution phase with the CPMG toggling function.

    ``cum_phase`` holds the running integral of the frequency deviation
    (rad) per realization on t_grid; n_pi = 0 means Ramsey (no toggling).
    """
    if n_pi == 0:
        bounds = np.array([0.0, delay])
    else:
        bounds = np.concatenate(([0.0], cpmg_pulse_times(delay, n_pi), [delay]))
    vals = np.empty((cum_phase.shape[0], bounds.size))
    for i, b in enumerate(bounds):
        idx = np.searchsorted(t_grid, b)
        idx = min(idx, t_grid.size - 1)
        if t_grid[idx] == b or idx == 0:
            vals[:, i] = cum_phase[:, idx]
        else:
            w = (b - t_grid[idx - 1]) / (t_grid[idx] - t_grid[idx - 1])
            vals[:, i] = (1 - w) * cum_phase[:, idx - 1] + w * cum_phase[:, idx]
    signs = (-1.0) ** np.arange(bounds.size - 1)
    return (np.diff(vals, axis=1) * signs).sum(axis=1)


def _frequency_deviation(device: DeviceParams, dv_bias: float, v: np.ndarray) -> np.ndarray:
    tuning = device.qubits[0].tuning
    f0 = qubit_frequency(tuning, dv_bias)
    return qubit_frequency(tuning, dv_bias + v) - f0


def _dephasing_ensemble(
    device: DeviceParams,
    noise: ChargeNoiseModel | None,
    delays: np.ndarray,
    n_pi_per_delay,
    dv_bias: float,
    n_realizations: int,
    detuning: float,
) -> np.ndarray:
    """<cos(2*pi*detuning*t + phase noise)> per delay."""
    n_pi_per_delay = np.asarray(n_pi_per_delay, dtype=int)
    if noise is None or (noise.sigma_quasistatic == 0 and not noise.ou_components):
        # Deterministic detuning is refocused by any echo pulse.
        return np.where(n_pi_per_delay == 0, np.cos(2 * np.pi * detuning * delays), 1.0)
    t_max = float(delays[-1])
    tau_min = min((tau for _a, tau in noise.ou_components if tau > 0), default=t_max)
    dt = min(tau_min / 10, t_max / 400)
    dt = max(dt, t_max / 40000)
    v = sample_noise_ensemble(noise, t_max, dt, n_realizations)
    t_grid = np.arange(v.shape[1]) * dt
    df = _frequency_deviation(device, dv_bias, v)
    # Running integral of 2*pi*df via the trapezoid rule.
    incr = np.pi * (df[:, :-1] + df[:, 1:]) * dt
    cum = np.concatenate([np.zeros((df.shape[0], 1)), np.cumsum(incr, axis=1)], axis=1)
    out = np.empty(delays.size)
    for i, (d, n_pi) in enumerate(zip(delays, n_pi_per_delay)):
        phases = _toggled_phases(cum, t_grid, d, n_pi)
        if n_pi == 0:
            phases = phases + 2 * np.pi * detuning * d
        out[i] = np.mean(np.cos(phases))
    return out


def _rabi_trace(
    device: DeviceParams,
    noise: ChargeNoiseModel | None,
    durations: np.ndarray,
    omega: float,
    dv_bias: float,
    n_realizations: int,
) -> np.ndarray:
    """Bloch-equation Rabi oscillation averaged over quasi-static detunings."""
    budget = coherence_budget(
        device.resonator, device.qubits[0], qubit_frequency(device.qubits[0].tuning, dv_bias)
    )
    gamma1 = 1.0 / budget.t1
    gamma2 = 1.0 / budget.t2
    if noise is None or (noise.sigma_quasistatic == 0 and not noise.ou_components):
        deltas = np.zeros(1)
    else:
        v = sample_noise_ensemble(noise, durations[-1], durations[-1] / 2, n_realizations)[:, 0]
        deltas = 2 * np.pi * _frequency_deviation(device, dv_bias, v)
    n = deltas.size

    def rhs(_t, y):
        x, yb, z = y[:n], y[n : 2 * n], y[2 * n :]
        dx = -deltas * yb - gamma2 * x
        dy = deltas * x - omega * z - gamma2 * yb
        dz = omega * yb - gamma1 * (z + 1.0)
        return np.concatenate([dx, dy, dz])

    y0 = np.concatenate([np.zeros(n), np.zeros(n), -np.ones(n)])
    sol = solve_ivp(rhs, (0.0, durations[-1]), y0, t_eval=durations, rtol=1e-9, atol=1e-12)
    if not sol.success:
        raise RuntimeError(f"Rabi integration failed: {sol.message}")
    z = sol.y[2 * n :, :]
    return np.mean((1.0 + z) / 2, axis=0)


def run_coherence(
    kind: str,
    device: DeviceParams,
    delays,
    noise: ChargeNoiseModel | None = None,
    n_pi: int = 1,
    shots: int = 0,
    dv_bias: float = 0.0,
    drive_amplitude: float = 0.0,
    detuning: float = 0.0,
    n_realizations: int = 200,
    seed: int = 0,
) -> PopulationTrace:
    """Run one coherence experiment and return the ensemble-averaged trace.

    ``delays`` is the swept variable: pulse duration for ``rabi``, the
    free-evolution delay otherwise.  ``echo`` is CPMG with one pi pulse;
    ``ramsey`` applies pi/2 - delay - pi/2 with an optional artificial
    ``detuning`` (Hz) for fringes.  ``shots`` > 0 adds binomial sampling
    statistics per point.
    """
    if kind not in COHERENCE_KINDS:
        raise ValueError(f"unknown experiment kind {kind!r}")
    delays = np.asarray(delays, dtype=float)
    if delays.ndim != 1 or delays.size < 2 or not np.all(np.diff(delays) > 0):
        raise ValueError("delays must be strictly increasing")
    if delays[0] < 0:
        raise ValueError("delays must be nonnegative")
    if kind == "cpmg" and n_pi < 1:
        raise ValueError("cpmg requires n_pi >= 1")

    budget = coherence_budget(
        device.resonator, device.qubits[0], qubit_frequency(device.qubits[0].tuning, dv_bias)
    )
    if kind == "rabi":
        if drive_amplitude <= 0:
            raise ValueError("rabi requires drive_amplitude > 0")
        p_e = _rabi_trace(device, noise, delays, drive_amplitude, dv_bias, n_realizations)
    elif kind == "t1":
        p_e = np.exp(-delays / budget.t1)
    else:
        n_pi_eff = 0 if kind == "ramsey" else (1 if kind == "echo" else n_pi)
        n_pi_per_delay = np.full(delays.size, n_pi_eff, dtype=int)
        w = _dephasing_ensemble(
            device, noise, delays, n_pi_per_delay, dv_bias, n_realizations, detuning
        )
        t_phi = device.qubits[0].t_phi
        white = -delays / (2 * budget.t1)
        if np.isfinite(t_phi) and t_phi > 0:
            white = white - delays / t_phi
        p_e = 0.5 * (1.0 + np.exp(white) * w)

    p_e = np.clip(p_e, 0.0, 1.0)
    std = None
    shots = int(shots)
    if shots > 0:
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0xC0)))
        counts = rng.binomial(shots, p_e)
        p_e = counts / shots
        std = np.sqrt(np.clip(p_e * (1 - p_e), 0, None) / shots)
    return PopulationTrace(x=delays, p_e=p_e, shots_per_point=shots, std=std)
