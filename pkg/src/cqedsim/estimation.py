"""Damped least-squares fit kernels for the simulator's observables.

All models come with analytic Jacobians and fixed, documented
initialization heuristics: log-linear regression for decay constants, a
discrete spectral peak for oscillation frequencies, the endpoint
asymptote for the RB baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

__all__ = [
    "FitResult",
    "fit_exp_decay",
    "fit_decaying_sinusoid",
    "fit_rb_power_law",
    "fit_rabi_doublet",
]


@dataclass(frozen=True)
class FitResult:
    """Named parameters, covariance, residual norm, and convergence flag."""

    params: dict
    covariance: np.ndarray = field(repr=False)
    stderr: dict = field(default_factory=dict)
    residual_norm: float = np.nan
    converged: bool = False


def _covariance(res) -> np.ndarray:
    """Covariance from the Jacobian at the solution (sigma^2 * (J^T J)^-1)."""
    m, n = res.jac.shape
    dof = max(m - n, 1)
    sigma2 = 2 * res.cost / dof
    try:
        cov = sigma2 * np.linalg.inv(res.jac.T @ res.jac)
    except np.linalg.LinAlgError:
        cov = np.full((n, n), np.nan)
    return cov


def _finite(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite data")
    return x, y


def _result(res, names, extra=None, converged=None) -> FitResult:
    cov = _covariance(res)
    params = dict(zip(names, res.x))
    if extra:
        params.update(extra)
    stderr = {n: float(np.sqrt(cov[i, i])) if np.isfinite(cov[i, i]) else np.nan
              for i, n in enumerate(names)}
    ok = bool(res.success) if converged is None else converged
    return FitResult(
        params=params,
        covariance=cov,
        stderr=stderr,
        residual_norm=float(np.sqrt(2 * res.cost)),
        converged=ok,
    )


def fit_exp_decay(x, y) -> FitResult:
    """Fit y = a * exp(-x/t) + c; params a, t, c with standard errors."""
    x, y = _finite(x, y)
    if x.size < 4:
        raise ValueError("need at least 4 points")
    span = x[-1] - x[0]
    if np.ptp(y) < 1e-12 * max(1.0, np.max(np.abs(y))) or span <= 0:
        # Constant data: decay constant unbounded.
        return FitResult(
            params={"a": 0.0, "t": np.inf, "c": float(np.mean(y))},
            covariance=np.full((3, 3), np.nan),
            converged=False,
        )
    c0 = y[-1]
    pos = y - c0
    mask = pos > np.ptp(y) * 1e-3
    if mask.sum() >= 2:
        slope, intercept = np.polyfit(x[mask], np.log(pos[mask]), 1)
        t0 = -1.0 / slope if slope < 0 else span
        a0 = np.exp(intercept)
    else:
        t0, a0 = span / 3, y[0] - c0
    t0 = abs(t0) if t0 != 0 else span

    def model(p):
        a, t, c = p
        return a * np.exp(-x / t) + c

    def resid(p):
        return model(p) - y

    def jac(p):
        a, t, c = p
        e = np.exp(-x / t)
        return np.column_stack([e, a * e * x / t**2, np.ones_like(x)])

    res = least_squares(resid, [a0, t0, c0], jac=jac, method="lm", max_nfev=2000)
    converged = res.success and 0 < res.x[1] < 100 * span
    return _result(res, ("a", "t", "c"), converged=converged)


def fit_decaying_sinusoid(x, y) -> FitResult:
    """Fit y = a * exp(-x/t) * cos(2 pi f x + phi) + c.

    The initial frequency comes from the discrete spectrum of the
    detrended data; raises if no spectral peak rises above the noise
    floor.
    """
    x, y = _finite(x, y)
    if x.size < 8:
        raise ValueError("need at least 8 points")
    c0 = np.mean(y)
    detrended = y - c0
    amp0 = np.max(np.abs(detrended))
    if amp0 < 1e-12 * max(1.0, abs(c0)):
        return FitResult(
            params={"a": 0.0, "f": np.nan, "phi": 0.0, "t": np.inf, "c": float(c0)},
            covariance=np.full((5, 5), np.nan),
            converged=False,
        )
    dt = np.mean(np.diff(x))
    spec = np.abs(np.fft.rfft(detrended))
    freqs = np.fft.rfftfreq(x.size, dt)
    k = int(np.argmax(spec[1:])) + 1
    floor = np.median(spec[1:])
    if spec[k] < 3 * floor:
        raise ValueError("no spectral peak above the noise floor")
    f0 = freqs[k]
    t0 = x[-1] - x[0]

    def resid(p):
        a, f, phi, t, c = p
        return a * np.exp(-x / t) * np.cos(2 * np.pi * f * x + phi) + c - y

    def jac(p):
        a, f, phi, t, c = p
        e = np.exp(-x / t)
        cosw = np.cos(2 * np.pi * f * x + phi)
        sinw = np.sin(2 * np.pi * f * x + phi)
        return np.column_stack(
            [
                e * cosw,
                -a * e * sinw * 2 * np.pi * x,
                -a * e * sinw,
                a * e * cosw * x / t**2,
                np.ones_like(x),
            ]
        )

    res = least_squares(resid, [amp0, f0, 0.0, t0, c0], jac=jac, method="lm", max_nfev=5000)
    converged = res.success and res.x[3] > 0
    return _result(res, ("a", "f", "phi", "t", "c"), converged=converged)


def fit_rb_power_law(m, fidelity) -> FitResult:
    """Fit fidelity = a * p^m + b with 0 <= p <= 1; adds f_gate = 1-(1-p)/2."""
    m, y = _finite(m, fidelity)
    if m.size < 3:
        raise ValueError("need at least 3 depths")
    if np.ptp(y) < 1e-12:
        return FitResult(
            params={"a": 0.0, "p": 1.0, "b": float(np.mean(y)), "f_gate": 1.0},
            covariance=np.full((3, 3), np.nan),
            converged=False,
        )
    b0 = min(y[-1], 0.5)
    a0 = max(y[0] - b0, 1e-3)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (y[1] - b0) / (y[0] - b0)
    p0 = np.clip(ratio ** (1.0 / max(m[1] - m[0], 1)), 1e-6, 1 - 1e-9) if ratio > 0 else 0.99

    def resid(q):
        a, p, b = q
        return a * p**m + b - y

    def jac(q):
        a, p, b = q
        pm = p**m
        return np.column_stack([pm, a * m * p ** (m - 1.0), np.ones_like(y)])

    res = least_squares(
        resid,
        [a0, p0, b0],
        jac=jac,
        bounds=([0.0, 0.0, -1.0], [2.0, 1.0, 1.0]),
        method="trf",
        max_nfev=5000,
    )
    a, p, b = res.x
    return _result(res, ("a", "p", "b"), extra={"f_gate": 1.0 - (1.0 - p) / 2})


def _doublet_model(f_p, g, gamma, kappa, f_r):
    """On-resonance transmission magnitude squared (qubit at f_q = f_r)."""
    denom = 1j * 2 * np.pi * (f_r - f_p) + kappa / 2 + g**2 / (
        1j * 2 * np.pi * (f_r - f_p) + gamma / 2
    )
    return np.abs((kappa / 2) / denom) ** 2


def fit_rabi_doublet(f_p, mag_sq, kappa: float, f_r: float | None = None, fit_kappa: bool = False) -> FitResult:
    """Fit the on-resonance vacuum Rabi doublet; returns g and gamma (rad/s).

    ``kappa`` may be held fixed (default) or co-fit.  Raises when the
    doublet is unresolved (fewer than two interior maxima, or the fitted
    g below kappa/4).
    """
    f_p, y = _finite(f_p, mag_sq)
    if f_r is None:
        f_r = float(np.sum(f_p * y) / np.sum(y))
    interior = np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])) + 1
    if interior.size < 2:
        raise ValueError("unresolved doublet: need two resolvable maxima")
    order = interior[np.argsort(y[interior])[::-1]][:2]
    split = abs(f_p[order[0]] - f_p[order[1]])
    g0 = np.pi * split  # 2g/2pi = split
    gamma0 = kappa / 2

    names = ["g", "gamma", "kappa"] if fit_kappa else ["g", "gamma"]

    def unpack(q):
        if fit_kappa:
            return q[0], q[1], q[2]
        return q[0], q[1], kappa

    def resid(q):
        g, gam, kap = unpack(q)
        return _doublet_model(f_p, g, gam, kap, f_r) - y

    def jac(q):
        g, gam, kap = unpack(q)
        delta = 1j * 2 * np.pi * (f_r - f_p)
        w = delta + gam / 2
        d = delta + kap / 2 + g**2 / w
        absd2 = np.abs(d) ** 2
        num = (kap / 2) ** 2
        # d|D|^2/dtheta = 2 Re(conj(D) dD/dtheta)
        dg = -num * 2 * np.real(np.conj(d) * (2 * g / w)) / absd2**2
        dgam = -num * 2 * np.real(np.conj(d) * (-(g**2) / (2 * w**2))) / absd2**2
        cols = [dg, dgam]
        if fit_kappa:
            dkap = (kap / 2) / absd2 - num * 2 * np.real(np.conj(d) * 0.5) / absd2**2
            cols.append(dkap)
        return np.column_stack(cols)

    x0 = [g0, gamma0, kappa] if fit_kappa else [g0, gamma0]
    lo = [0.0] * len(x0)
    hi = [np.inf] * len(x0)
    res = least_squares(resid, x0, jac=jac, bounds=(lo, hi), method="trf", max_nfev=5000)
    g_fit = res.x[0]
    kap_fit = res.x[2] if fit_kappa else kappa
    if g_fit < kap_fit / 4:
        raise ValueError(f"unresolved doublet: fitted g = {g_fit:.3e} below kappa/4")
    return _result(res, names)
