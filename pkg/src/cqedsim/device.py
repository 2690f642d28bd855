"""Physical device parameters, voltage tuning maps, charge noise, coherence budget.

Unit conventions: plain frequencies (f_r, f_q, f_ss, curvature, tuning
coefficients) are in Hz; kappa, g, gamma and the dispersive shift chi are
angular rates in rad/s; gamma_nr is 1/s; times are in seconds; voltages in
volts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

__all__ = [
    "ResonatorParams",
    "QubitParams",
    "VoltageTuningMap",
    "ChargeNoiseModel",
    "CoherenceBudget",
    "DeviceParams",
    "qubit_frequency",
    "two_qubit_frequencies",
    "coherence_budget",
    "sample_noise_trajectory",
    "sample_noise_ensemble",
]


@dataclass(frozen=True)
class ResonatorParams:
    f_r: float      # Hz
    kappa: float    # rad/s

    def __post_init__(self):
        if self.f_r <= 0:
            raise ValueError(f"f_r must be positive, got {self.f_r}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")


@dataclass(frozen=True)
class VoltageTuningMap:
    """Voltage-to-qubit-frequency map.

    ``quadratic``: f(dv) = f_ss + curvature * dv**2 around a sweet spot.
    ``linear2d``: f(dv_r, dv_rg) = intercept + a * dv_r + b * dv_rg, the
    phenomenological form used for two concurrently tuned qubits.
    """

    kind: str                       # "quadratic" | "linear2d"
    f_ss: float = 0.0               # Hz (quadratic)
    v_ss: float = 0.0               # V (quadratic)
    curvature: float = 0.0          # Hz/V^2 (quadratic)
    coeffs: tuple[float, float, float] = (0.0, 0.0, 0.0)  # intercept Hz, slopes Hz/V (linear2d)

    def __post_init__(self):
        if self.kind not in ("quadratic", "linear2d"):
            raise ValueError(f"unknown tuning map kind {self.kind!r}")
        if self.kind == "quadratic" and self.curvature <= 0:
            raise ValueError("quadratic tuning requires curvature > 0 (minimum at sweet spot)")


@dataclass(frozen=True)
class QubitParams:
    g: float                        # rad/s
    gamma: float                    # rad/s
    gamma_nr: float                 # 1/s
    t_phi: float                    # s
    tuning: VoltageTuningMap

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError(f"coupling g must be positive, got {self.g}")
        for name in ("gamma", "gamma_nr", "t_phi"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class ChargeNoiseModel:
    """Quasi-static Gaussian offset plus a ladder of OU processes.

    The Ornstein-Uhlenbeck ladder (log-spaced correlation times)
    approximates a 1/f charge-noise spectrum; a purely quasi-static offset
    is fully removed by a single echo and cannot produce the
    pulse-number-dependent CPMG improvement.
    """

    sigma_quasistatic: float = 0.0                      # V
    ou_components: tuple[tuple[float, float], ...] = () # (amplitude V, correlation time s)
    seed: int = 0

    def __post_init__(self):
        if self.sigma_quasistatic < 0:
            raise ValueError("sigma_quasistatic must be nonnegative")
        comps = tuple((float(a), float(t)) for a, t in self.ou_components)
        for a, t in comps:
            if a < 0 or t < 0:
                raise ValueError("OU amplitudes and correlation times must be nonnegative")
        object.__setattr__(self, "ou_components", comps)


@dataclass(frozen=True)
class CoherenceBudget:
    """Closed-form coherence quantities at one operating point."""

    gamma_r: float            # Purcell rate, 1/s
    gamma_total: float        # 1/s
    t1: float                 # s
    t2: float                 # s
    t_phi: float              # s
    t_rabi_predicted: float   # s
    chi: float                # rad/s
    delta: float              # rad/s


@dataclass(frozen=True)
class DeviceParams:
    """Resonator plus one or two qubits."""

    resonator: ResonatorParams
    qubits: tuple[QubitParams, ...]

    def __post_init__(self):
        if not 1 <= len(self.qubits) <= 2:
            raise ValueError("device supports 1 or 2 qubits")
        object.__setattr__(self, "qubits", tuple(self.qubits))


def qubit_frequency(tuning: VoltageTuningMap, dv: float) -> float:
    """Qubit frequency (Hz) at voltage offset dv from the sweet spot."""
    if tuning.kind != "quadratic":
        raise ValueError(f"qubit_frequency requires a quadratic map, got {tuning.kind!r}")
    return tuning.f_ss + tuning.curvature * np.square(dv)


def two_qubit_frequencies(
    maps: tuple[VoltageTuningMap, VoltageTuningMap], dv_r: float, dv_rg: float
) -> tuple[float, float]:
    """Frequencies of two linearly tuned qubits at offsets (dv_r, dv_rg)."""
    out = []
    for m in maps:
        if m.kind != "linear2d":
            raise ValueError(f"two_qubit_frequencies requires linear2d maps, got {m.kind!r}")
        c0, a, b = m.coeffs
        out.append(c0 + a * dv_r + b * dv_rg)
    return out[0], out[1]


def coherence_budget(res: ResonatorParams, q: QubitParams, f_q: float) -> CoherenceBudget:
    """Closed-form coherence budget at qubit frequency f_q.

    Purcell rate kappa*g^2/Delta^2 and dispersive shift g^2/Delta are
    invalid on resonance, so zero detuning is rejected.
    """
    delta = 2 * np.pi * (f_q - res.f_r)
    if delta == 0:
        raise ValueError("zero detuning: dispersive formulas invalid on resonance")
    gamma_r = res.kappa * q.g**2 / delta**2
    chi = q.g**2 / delta
    gamma_total = gamma_r + q.gamma_nr
    t1 = 1.0 / gamma_total
    t2 = 1.0 / (1.0 / (2 * t1) + 1.0 / q.t_phi) if np.isfinite(q.t_phi) and q.t_phi > 0 else 2 * t1
    inv_rabi = 3.0 / (4 * t1) + (0.5 / q.t_phi if np.isfinite(q.t_phi) and q.t_phi > 0 else 0.0)
    return CoherenceBudget(
        gamma_r=gamma_r,
        gamma_total=gamma_total,
        t1=t1,
        t2=t2,
        t_phi=q.t_phi,
        t_rabi_predicted=1.0 / inv_rabi,
        chi=chi,
        delta=delta,
    )


def _stream_rng(model: ChargeNoiseModel, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((int(model.seed), int(stream))))


def sample_noise_ensemble(
    model: ChargeNoiseModel, duration: float, dt: float, n_traj: int, base_stream: int = 0
) -> np.ndarray:
    """Sample ``n_traj`` voltage-offset trajectories, shape (n_traj, n_steps+1).

    Each trajectory is a quasi-static Gaussian offset plus the sum of the
    model's OU components sampled on a uniform grid of step dt.  The result
    is deterministic given the model seed and base_stream; trajectory i
    uses stream base_stream + i.
    """
    if duration <= 0 or dt <= 0:
        raise ValueError("duration and dt must be positive")
    n_steps = int(np.ceil(duration / dt))
    rngs = [_stream_rng(model, base_stream + i) for i in range(n_traj)]
    out = np.zeros((n_traj, n_steps + 1))
    for i, rng in enumerate(rngs):
        out[i] = _single_trajectory(model, n_steps, dt, rng)
    return out


def _single_trajectory(model: ChargeNoiseModel, n_steps: int, dt: float, rng) -> np.ndarray:
    v = np.full(n_steps + 1, rng.normal(0.0, model.sigma_quasistatic) if model.sigma_quasistatic > 0 else 0.0)
    for amp, tau in model.ou_components:
        if amp == 0:
            continue
        if tau == 0:
            v += amp * rng.standard_normal(n_steps + 1)
            continue
        decay = np.exp(-dt / tau)
        kick = amp * np.sqrt(1 - decay**2)
        xi = rng.standard_normal(n_steps + 1)
        xi[0] = amp * xi[0]
        # Exact stationary OU update x[k+1] = decay*x[k] + kick*xi[k+1],
        # run as an IIR filter; stays stationary for any dt.
        drive = np.concatenate(([xi[0]], kick * xi[1:]))
        v += lfilter([1.0], [1.0, -decay], drive)
    return v


def sample_noise_trajectory(
    model: ChargeNoiseModel, duration: float, dt: float, stream: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Sample one voltage-offset time series; returns (times, offsets)."""
    v = sample_noise_ensemble(model, duration, dt, 1, base_stream=stream)[0]
    t = np.arange(v.size) * dt
    return t, v
