"""Steady-state transmission spectra via input-output theory.

The resonator is probed in transmission in the linear-response (single
photon) regime; qubits enter as Lorentzian susceptibilities.  The
normalization A0 is chosen so the bare resonator peak has |A/A0| = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .device import (
    ChargeNoiseModel,
    QubitParams,
    ResonatorParams,
    coherence_budget,
    qubit_frequency,
    two_qubit_frequencies,
)

__all__ = [
    "TransmissionSpectrum",
    "TwoToneMap",
    "transmission",
    "vacuum_rabi_map",
    "two_tone_map",
    "ac_stark_shift",
    "two_qubit_map",
    "saturation_population",
    "pulled_resonator_phase",
]


@dataclass(frozen=True)
class TransmissionSpectrum:
    """Complex transmission amplitude A/A0 on a probe-frequency (x voltage) grid.

    ``values`` has shape (len(axis2), len(axis1)) when axis2 is present,
    else (len(axis1),).
    """

    axis1: np.ndarray                  # probe frequency grid, Hz
    values: np.ndarray = field(repr=False)
    axis2: np.ndarray | None = None    # optional voltage grid, V

    def __post_init__(self):
        a1 = np.asarray(self.axis1, dtype=float)
        vals = np.asarray(self.values, dtype=complex)
        _check_increasing(a1, "axis1")
        if self.axis2 is not None:
            a2 = np.asarray(self.axis2, dtype=float)
            _check_increasing(a2, "axis2")
            if vals.shape != (a2.size, a1.size):
                raise ValueError("values shape does not match (axis2, axis1) grid")
            object.__setattr__(self, "axis2", a2)
        elif vals.shape != a1.shape:
            raise ValueError("values shape does not match axis1 grid")
        if np.max(np.abs(vals)) > 1 + 1e-9:
            raise ValueError("transmission amplitude exceeds 1")
        object.__setattr__(self, "axis1", a1)
        object.__setattr__(self, "values", vals)

    @property
    def magnitude_squared(self) -> np.ndarray:
        return np.abs(self.values) ** 2


@dataclass(frozen=True)
class TwoToneMap:
    """Transmission phase at the probe tone versus drive frequency and voltage."""

    f_d: np.ndarray                    # drive frequency grid, Hz
    dv: np.ndarray                     # voltage grid, V
    phase: np.ndarray = field(repr=False)  # rad, shape (len(dv), len(f_d))

    def __post_init__(self):
        fd = np.asarray(self.f_d, dtype=float)
        dv = np.asarray(self.dv, dtype=float)
        ph = np.asarray(self.phase, dtype=float)
        _check_increasing(fd, "f_d")
        _check_increasing(dv, "dv")
        if ph.shape != (dv.size, fd.size):
            raise ValueError("phase shape does not match (dv, f_d) grid")
        if not np.all(np.isfinite(ph)):
            raise ValueError("phases must be finite")
        object.__setattr__(self, "f_d", fd)
        object.__setattr__(self, "dv", dv)
        object.__setattr__(self, "phase", ph)


def _check_increasing(a: np.ndarray, name: str) -> None:
    if a.ndim != 1 or a.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d grid")
    if a.size > 1 and not np.all(np.diff(a) > 0):
        raise ValueError(f"{name} must be strictly increasing")


def transmission(res: ResonatorParams, qubits, f_p):
    """Normalized complex transmission A/A0 at probe frequency f_p.

    ``qubits`` is a list of (f_q Hz, g rad/s, gamma rad/s) tuples; each
    qubit contributes a Lorentzian susceptibility g^2/(i*2pi*(f_q-f_p) +
    gamma/2) in the denominator.  Vectorized over f_p.
    """
    f_p = np.asarray(f_p, dtype=float)
    denom = 1j * 2 * np.pi * (res.f_r - f_p) + res.kappa / 2
    for f_q, g, gamma in qubits:
        denom = denom + g**2 / (1j * 2 * np.pi * (np.asarray(f_q) - f_p) + gamma / 2)
    return (res.kappa / 2) / denom


def vacuum_rabi_map(
    res: ResonatorParams, qubit: QubitParams, f_p_grid, dv_grid
) -> TransmissionSpectrum:
    """Transmission over (probe frequency, sweet-spot voltage offset)."""
    f_p = np.asarray(f_p_grid, dtype=float)
    dv = np.asarray(dv_grid, dtype=float)
    f_q = qubit_frequency(qubit.tuning, dv)
    vals = transmission(
        res,
        [(np.atleast_1d(f_q)[:, None], qubit.g, qubit.gamma)],
        f_p[None, :],
    )
    return TransmissionSpectrum(axis1=f_p, axis2=dv, values=vals)


def saturation_population(omega_drive: float, f_detuning, t1: float, t2: float):
    """Steady-state excited population of a driven two-level system.

    Standard Bloch saturation: P_e = (1/2) * s / (1 + (2 pi df)^2 T2^2 + s)
    with s = omega_drive^2 * T1 * T2.
    """
    s = omega_drive**2 * t1 * t2
    df = np.asarray(f_detuning, dtype=float)
    return 0.5 * s / (1.0 + (2 * np.pi * df * t2) ** 2 + s)


def pulled_resonator_phase(res: ResonatorParams, chi: float, p_e):
    """Transmission phase at f_p = f_r with the resonator pulled by the qubit.

    The effective resonator angular frequency is omega_r - chi*(1 - 2 P_e):
    the ground-state qubit pulls by -chi and a fully saturated qubit
    (P_e = 1/2) returns the resonator to its bare frequency.
    """
    omega_eff_offset = -chi * (1.0 - 2.0 * np.asarray(p_e))
    amp = (res.kappa / 2) / (1j * omega_eff_offset + res.kappa / 2)
    return np.angle(amp)


def two_tone_map(
    res: ResonatorParams,
    qubit: QubitParams,
    omega_drive: float,
    f_d_grid,
    dv_grid,
    noise: ChargeNoiseModel | None = None,
) -> TwoToneMap:
    """Two-tone spectroscopy: probe phase at f_p = f_r versus (f_d, dv).

    The qubit responds with steady-state saturation and pulls the
    resonator dispersively.  When a noise model is given, quasi-static
    charge noise broadens the effective dephasing time off the sweet spot.
    """
    f_d = np.asarray(f_d_grid, dtype=float)
    dv = np.asarray(dv_grid, dtype=float)
    phases = np.empty((dv.size, f_d.size))
    for i, v in enumerate(dv):
        f_q = qubit_frequency(qubit.tuning, v)
        budget = coherence_budget(res, qubit, f_q)
        t2 = budget.t2
        if noise is not None and noise.sigma_quasistatic > 0:
            slope = 2 * qubit.tuning.curvature * v
            sigma_f = abs(slope) * noise.sigma_quasistatic
            if sigma_f > 0:
                t2 = 1.0 / (1.0 / t2 + 2 * np.pi * sigma_f)
        p_e = saturation_population(omega_drive, f_d - f_q, budget.t1, t2)
        phases[i] = pulled_resonator_phase(res, budget.chi, p_e)
    return TwoToneMap(f_d=f_d, dv=dv, phase=phases)


def ac_stark_shift(chi: float, nbar) -> float:
    """ac Stark shift (Hz) of the qubit at mean photon number nbar: chi*nbar/pi."""
    nbar = np.asarray(nbar, dtype=float)
    if np.any(nbar < 0):
        raise ValueError("nbar must be nonnegative")
    out = chi * nbar / np.pi
    return float(out) if out.ndim == 0 else out


def two_qubit_map(
    res: ResonatorParams,
    qubits: tuple[QubitParams, QubitParams],
    dv_r_grid,
    dv_rg_grid,
) -> TransmissionSpectrum:
    """|A/A0| at f_p = f_r over the (dv_rg, dv_r) voltage plane.

    axis1 is the resonator-guard offset dv_rg, axis2 the resonator offset
    dv_r; both qubits must carry linear2d tuning maps.
    """
    dv_r = np.asarray(dv_r_grid, dtype=float)
    dv_rg = np.asarray(dv_rg_grid, dtype=float)
    maps = (qubits[0].tuning, qubits[1].tuning)
    f1, f2 = two_qubit_frequencies(maps, dv_r[:, None], dv_rg[None, :])
    vals = transmission(
        res,
        [(f1, qubits[0].g, qubits[0].gamma), (f2, qubits[1].g, qubits[1].gamma)],
        res.f_r,
    )
    return TransmissionSpectrum(axis1=dv_rg, axis2=dv_r, values=vals)
