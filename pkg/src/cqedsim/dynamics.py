"""Time-domain Lindblad evolution of the driven qubit(s)-resonator system.

Evolution runs in a rotating frame (chosen by the caller, usually the
drive carrier) on the vectorized density matrix with an adaptive
Runge-Kutta integrator.  Purcell decay is not added by hand: it emerges
from the photon-loss dissipator plus the coupling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .device import DeviceParams, qubit_frequency
from .spaces import DensityMatrix, SpaceDescriptor, build_space, embed_operator

__all__ = [
    "PulseEnvelope",
    "PulseSequence",
    "EvolutionResult",
    "build_drive_hamiltonian",
    "evolve",
    "calibrate_pi_amplitude",
    "gaussian_pulse_area",
]

MIN_PULSE_GAP = 20e-9  # default minimum separation between pulses, s


@dataclass(frozen=True)
class PulseEnvelope:
    """Shaped drive pulse addressing one qubit.

    Gaussian pulses are truncated at ``truncation`` standard deviations on
    each side, so duration = 2 * truncation * sigma.
    """

    shape: str                   # "gaussian" | "square"
    duration: float              # s
    amplitude: float             # peak Rabi rate, rad/s
    sigma: float = 0.0           # s, gaussian only
    phase: float = 0.0           # rad
    carrier_detuning: float = 0.0  # Hz from the frame frequency
    truncation: float = 2.5      # sigmas per side, gaussian only
    target: int = 0              # qubit index the drive addresses

    def __post_init__(self):
        if self.shape not in ("gaussian", "square"):
            raise ValueError(f"unknown pulse shape {self.shape!r}")
        if self.duration <= 0:
            raise ValueError("pulse duration must be positive")
        if self.shape == "gaussian":
            if self.sigma <= 0 or self.truncation <= 0:
                raise ValueError("gaussian pulse requires sigma > 0 and truncation > 0")
            expected = 2 * self.truncation * self.sigma
            if abs(self.duration - expected) > 1e-15 + 1e-9 * expected:
                raise ValueError(
                    f"gaussian duration must equal 2*truncation*sigma = {expected}, got {self.duration}"
                )

    def envelope(self, t):
        """Instantaneous Rabi rate at time t from the pulse start."""
        t = np.asarray(t, dtype=float)
        inside = (t >= 0) & (t <= self.duration)
        if self.shape == "square":
            return np.where(inside, self.amplitude, 0.0)
        center = self.duration / 2
        return np.where(
            inside, self.amplitude * np.exp(-((t - center) ** 2) / (2 * self.sigma**2)), 0.0
        )

    def area(self) -> float:
        """Integrated Rabi angle of the noiseless pulse."""
        if self.shape == "square":
            return self.amplitude * self.duration
        return self.amplitude * gaussian_pulse_area(self.sigma, self.truncation)


def gaussian_pulse_area(sigma: float, truncation: float) -> float:
    """Integral of a unit-peak truncated Gaussian envelope."""
    from scipy.special import erf

    return sigma * np.sqrt(2 * np.pi) * erf(truncation / np.sqrt(2))


@dataclass(frozen=True)
class PulseSequence:
    """Ordered, non-overlapping pulses plus a readout window."""

    pulses: tuple[tuple[float, PulseEnvelope], ...]
    readout_window: tuple[float, float] = (0.0, 0.0)  # (start, length), s
    min_gap: float = MIN_PULSE_GAP

    def __post_init__(self):
        pulses = tuple(sorted(self.pulses, key=lambda p: p[0]))
        for (s0, p0), (s1, _p1) in zip(pulses, pulses[1:]):
            gap = s1 - (s0 + p0.duration)
            if gap < self.min_gap - 1e-15:
                raise ValueError(
                    f"pulses overlap or violate the minimum gap {self.min_gap}: gap {gap}"
                )
        object.__setattr__(self, "pulses", pulses)

    @property
    def span(self) -> float:
        end = max((s + p.duration for s, p in self.pulses), default=0.0)
        return max(end, self.readout_window[0] + self.readout_window[1])

    def drive_at(self, t: float):
        """(envelope rad/s, phase rad, detuning Hz, target) of the active pulse, or None."""
        for start, p in self.pulses:
            if start <= t <= start + p.duration:
                return float(p.envelope(t - start)), p.phase, p.carrier_detuning, p.target
        return None


@dataclass(frozen=True)
class EvolutionResult:
    """Time grid, per-point excited populations, and the final state."""

    times: np.ndarray
    p_e: np.ndarray = field(repr=False)          # qubit-1 excited population per point
    final_state: DensityMatrix | None = None
    expectations: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        pe = np.asarray(self.p_e, dtype=float)
        if np.any(pe < -1e-9) or np.any(pe > 1 + 1e-9):
            raise ValueError("excited population outside [0, 1] beyond tolerance")
        object.__setattr__(self, "p_e", np.clip(pe, 0.0, 1.0))

    @property
    def final_p_e(self) -> float:
        return float(self.p_e[-1])


class _OperatorCache:
    """Static operators and dissipators for one device on one space."""

    def __init__(self, device: DeviceParams, space: SpaceDescriptor):
        self.space = space
        self.a = embed_operator("annihilate", 0, space).matrix
        self.ad = self.a.conj().T
        self.n_photon = self.ad @ self.a
        self.sm = [
            embed_operator("sigma_minus", j + 1, space).matrix for j in range(len(device.qubits))
        ]
        self.sp = [m.conj().T for m in self.sm]
        self.n_qubit = [sp @ sm for sp, sm in zip(self.sp, self.sm)]
        self.sz = [
            embed_operator("sigma_z", j + 1, space).matrix for j in range(len(device.qubits))
        ]
        # Dissipators as (rate, L, L^dag L) triples.
        self.dissipators = [(device.resonator.kappa, self.a, self.n_photon)]
        for j, q in enumerate(device.qubits):
            if q.gamma_nr > 0:
                self.dissipators.append((q.gamma_nr, self.sm[j], self.n_qubit[j]))
            if np.isfinite(q.t_phi) and q.t_phi > 0:
                self.dissipators.append((0.5 / q.t_phi, self.sz[j], np.eye(space.dim)))


def build_drive_hamiltonian(
    device: DeviceParams,
    sequence: PulseSequence,
    t: float,
    frame: float,
    space: SpaceDescriptor | None = None,
    qubit_freqs=None,
    _cache: _OperatorCache | None = None,
) -> np.ndarray:
    """Rotating-frame Hamiltonian (units of rad/s, hbar = 1) at time t.

    Contains the detuning terms relative to the frame frequency, the
    qubit-resonator coupling in the rotating-wave approximation, and the
    drive on the addressed qubit.  ``qubit_freqs`` overrides the
    sweet-spot frequencies from the tuning maps (e.g. for a noise
    realization).
    """
    if space is None:
        space = build_space(3, len(device.qubits))
    cache = _cache or _OperatorCache(device, space)
    if qubit_freqs is None:
        qubit_freqs = [
            qubit_frequency(q.tuning, 0.0) if q.tuning.kind == "quadratic" else q.tuning.coeffs[0]
            for q in device.qubits
        ]
    w_frame = 2 * np.pi * frame
    h = (2 * np.pi * device.resonator.f_r - w_frame) * cache.n_photon
    for j, q in enumerate(device.qubits):
        h = h + (2 * np.pi * qubit_freqs[j] - w_frame) * cache.n_qubit[j]
        h = h + q.g * (cache.ad @ cache.sm[j] + cache.a @ cache.sp[j])
    drive = sequence.drive_at(t)
    if drive is not None:
        omega, phase, detuning, target = drive
        phi = phase + 2 * np.pi * detuning * t
        h = h + (omega / 2) * (
            np.exp(-1j * phi) * cache.sm[target] + np.exp(1j * phi) * cache.sp[target]
        )
    return h


def evolve(
    initial: DensityMatrix,
    device: DeviceParams,
    sequence: PulseSequence,
    frame: float,
    t_eval=None,
    noise_realization=None,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    store_states: bool = False,
) -> EvolutionResult:
    """Integrate the Lindblad master equation over the sequence span.

    ``noise_realization`` is an optional (times, voltage offsets) pair;
    the qubit frequencies are modulated through their quadratic tuning
    maps along this trajectory.  Raises RuntimeError with step
    diagnostics if the integrator fails.
    """
    space = initial.space
    cache = _OperatorCache(device, space)
    dim = space.dim
    t_end = sequence.span
    if t_eval is None:
        t_eval = np.linspace(0.0, t_end, 201)
    t_eval = np.asarray(t_eval, dtype=float)

    base_freqs = np.array(
        [
            qubit_frequency(q.tuning, 0.0) if q.tuning.kind == "quadratic" else q.tuning.coeffs[0]
            for q in device.qubits
        ]
    )
    if noise_realization is not None:
        nt, nv = noise_realization
        nt = np.asarray(nt, dtype=float)
        nv = np.asarray(nv, dtype=float)

        def freqs_at(t):
            v = np.interp(t, nt, nv)
            return [
                qubit_frequency(q.tuning, v) if q.tuning.kind == "quadratic" else base_freqs[j]
                for j, q in enumerate(device.qubits)
            ]

    else:

        def freqs_at(t):
            return base_freqs

    def rhs(t, y):
        rho = y.reshape(dim, dim)
        h = build_drive_hamiltonian(
            device, sequence, t, frame, space=space, qubit_freqs=freqs_at(t), _cache=cache
        )
        drho = -1j * (h @ rho - rho @ h)
        for rate, L, LdL in cache.dissipators:
            drho += rate * (L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL))
        return drho.ravel()

    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        initial.matrix.ravel().astype(complex),
        t_eval=t_eval,
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise RuntimeError(
            f"Lindblad integration failed: {sol.message} (completed {sol.t[-1] if sol.t.size else 0:.3e} s "
            f"of {t_end:.3e} s in {sol.nfev} function evaluations)"
        )
    rhos = sol.y.T.reshape(-1, dim, dim)
    traces = np.einsum("tii->t", rhos).real
    if np.max(np.abs(traces - 1.0)) > 1e-8:
        raise RuntimeError(
            f"trace conservation violated (max deviation {np.max(np.abs(traces - 1)):.2e}); "
            "tighten integrator tolerances"
        )
    p_e = np.einsum("tij,ji->t", rhos, cache.n_qubit[0]).real
    final = rhos[-1]
    final = (final + final.conj().T) / 2
    final_state = DensityMatrix(space, final / np.trace(final).real)
    expectations = {"n_photon": np.einsum("tij,ji->t", rhos, cache.n_photon).real}
    if store_states:
        expectations["states"] = rhos
    return EvolutionResult(times=sol.t, p_e=p_e, final_state=final_state, expectations=expectations)


def _two_level_final_pe(envelope: PulseEnvelope) -> float:
    """Excited population of an isolated resonant two-level system after one pulse."""

    def rhs(t, y):
        om = float(envelope.envelope(t))
        # Bloch equations on (x, y, z), drive about +x in the rotating frame.
        x, ybl, z = y
        return [0.0, -om * z, om * ybl]

    sol = solve_ivp(rhs, (0.0, envelope.duration), [0.0, 0.0, -1.0], rtol=1e-10, atol=1e-12)
    if not sol.success:
        raise RuntimeError(f"pulse integration failed: {sol.message}")
    return (1.0 + sol.y[2, -1]) / 2


def calibrate_pi_amplitude(
    sigma: float, truncation: float = 2.5, tol: float = 1e-4, max_iter: int = 20
) -> float:
    """Peak amplitude (rad/s) of a truncated-Gaussian pi pulse.

    Starts from the area theorem (integrated angle = pi) and refines until
    the simulated excited population after one resonant pulse reaches
    1 - tol^2 (default >= 0.9999).
    """
    amp = np.pi / gaussian_pulse_area(sigma, truncation)
    duration = 2 * truncation * sigma
    for _ in range(max_iter):
        env = PulseEnvelope(
            shape="gaussian", duration=duration, amplitude=amp, sigma=sigma, truncation=truncation
        )
        p_e = _two_level_final_pe(env)
        if p_e >= 1.0 - tol**2:
            return amp
        # Rotation angle theta = 2*asin(sqrt(P_e)); rescale toward pi.
        theta = 2 * np.arcsin(np.sqrt(np.clip(p_e, 0.0, 1.0)))
        if theta <= 0:
            raise RuntimeError("pi-pulse calibration failed: no rotation detected")
        amp *= np.pi / theta
    raise RuntimeError(f"pi-pulse calibration did not converge within {max_iter} iterations")
