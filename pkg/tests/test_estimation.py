import numpy as np
import pytest

from cqedsim.estimation import (
    fit_decaying_sinusoid,
    fit_exp_decay,
    fit_rabi_doublet,
    fit_rb_power_law,
)


def _central_diff_jac(resid, p, eps=1e-7):
    p = np.asarray(p, dtype=float)
    cols = []
    for i in range(p.size):
        step = eps * max(1.0, abs(p[i]))
        hi, lo = p.copy(), p.copy()
        hi[i] += step
        lo[i] -= step
        cols.append((resid(hi) - resid(lo)) / (2 * step))
    return np.column_stack(cols)


class TestExpDecay:
    def test_exact_recovery(self):
        x = np.linspace(0, 200e-6, 60)
        y = 0.9 * np.exp(-x / 48e-6) + 0.05
        fit = fit_exp_decay(x, y)
        assert fit.converged
        assert fit.params["a"] == pytest.approx(0.9, rel=1e-6)
        assert fit.params["t"] == pytest.approx(48e-6, rel=1e-6)
        assert fit.params["c"] == pytest.approx(0.05, abs=1e-8)

    def test_noisy_recovery_with_stderr(self):
        rng = np.random.default_rng(0)
        x = np.linspace(0, 250e-6, 80)
        y = np.exp(-x / 50e-6) + rng.normal(0, 0.01, x.size)
        fit = fit_exp_decay(x, y)
        assert fit.converged
        assert fit.params["t"] == pytest.approx(50e-6, rel=0.05)
        assert 0 < fit.stderr["t"] < 0.1 * fit.params["t"]

    def test_constant_data_flagged(self):
        x = np.linspace(0, 1, 10)
        fit = fit_exp_decay(x, np.full(10, 0.3))
        assert not fit.converged
        assert fit.params["t"] == np.inf
        assert fit.params["c"] == pytest.approx(0.3)

    def test_scale_equivariance(self):
        # Rescaling time by 1e6 rescales t by exactly the same factor.
        x = np.linspace(0, 200e-6, 50)
        y = 0.8 * np.exp(-x / 30e-6) + 0.1
        t_si = fit_exp_decay(x, y).params["t"]
        t_us = fit_exp_decay(x * 1e6, y).params["t"]
        assert t_us == pytest.approx(t_si * 1e6, rel=1e-9)

    def test_jacobian_matches_finite_difference(self):
        x = np.linspace(0, 1.0, 30)
        y = np.zeros_like(x)
        p = np.array([0.7, 0.3, 0.1])

        def resid(q):
            a, t, c = q
            return a * np.exp(-x / t) + c - y

        e = np.exp(-x / p[1])
        analytic = np.column_stack([e, p[0] * e * x / p[1] ** 2, np.ones_like(x)])
        numeric = _central_diff_jac(resid, p)
        np.testing.assert_allclose(analytic, numeric, atol=1e-6)

    def test_non_finite_rejected(self):
        x = np.linspace(0, 1, 10)
        y = np.ones(10)
        y[3] = np.nan
        with pytest.raises(ValueError):
            fit_exp_decay(x, y)


class TestDecayingSinusoid:
    def test_exact_recovery(self):
        x = np.linspace(0, 50e-6, 400)
        y = 0.5 * np.exp(-x / 20e-6) * np.cos(2 * np.pi * 0.4e6 * x + 0.7) + 0.5
        fit = fit_decaying_sinusoid(x, y)
        assert fit.converged
        assert fit.params["f"] == pytest.approx(0.4e6, rel=1e-6)
        assert fit.params["t"] == pytest.approx(20e-6, rel=1e-6)
        assert fit.params["phi"] == pytest.approx(0.7, abs=1e-6)

    def test_noise_floor_rejection(self):
        # A single impulse has a flat magnitude spectrum: no oscillation
        # frequency can be identified.
        x = np.linspace(0, 1, 128)
        y = np.zeros(128)
        y[40] = 1.0
        with pytest.raises(ValueError, match="spectral peak"):
            fit_decaying_sinusoid(x, y)

    def test_constant_data_flagged(self):
        x = np.linspace(0, 1, 20)
        fit = fit_decaying_sinusoid(x, np.full(20, 0.5))
        assert not fit.converged

    def test_jacobian_matches_finite_difference(self):
        x = np.linspace(0, 10.0, 64)
        p = np.array([0.6, 0.31, 0.2, 4.0, 0.5])

        def resid(q):
            a, f, phi, t, c = q
            return a * np.exp(-x / t) * np.cos(2 * np.pi * f * x + phi) + c

        e = np.exp(-x / p[3])
        w = 2 * np.pi * p[1] * x + p[2]
        analytic = np.column_stack(
            [
                e * np.cos(w),
                -p[0] * e * np.sin(w) * 2 * np.pi * x,
                -p[0] * e * np.sin(w),
                p[0] * e * np.cos(w) * x / p[3] ** 2,
                np.ones_like(x),
            ]
        )
        numeric = _central_diff_jac(resid, p)
        np.testing.assert_allclose(analytic, numeric, atol=1e-6)


class TestRBPowerLaw:
    def test_exact_recovery(self):
        m = np.array([1, 2, 4, 8, 16, 32, 64, 128, 256, 512], dtype=float)
        y = 0.5 * 0.999**m + 0.5
        fit = fit_rb_power_law(m, y)
        assert fit.converged
        assert fit.params["p"] == pytest.approx(0.999, abs=1e-9)
        assert fit.params["f_gate"] == pytest.approx(1 - 0.001 / 2, abs=1e-9)

    def test_bounds_respected_under_noise(self):
        rng = np.random.default_rng(2)
        m = np.array([1, 4, 16, 64, 256], dtype=float)
        y = 0.5 * 0.998**m + 0.5 + rng.normal(0, 0.004, m.size)
        fit = fit_rb_power_law(m, y)
        assert 0.0 <= fit.params["p"] <= 1.0

    def test_flat_data_flagged(self):
        fit = fit_rb_power_law([1, 4, 16], np.full(3, 0.75))
        assert not fit.converged
        assert fit.params["f_gate"] == 1.0


class TestRabiDoublet:
    KAPPA = 2 * np.pi * 0.46e6
    F_R = 6.4262e9

    def _doublet(self, g, gamma, f_p):
        denom = 1j * 2 * np.pi * (self.F_R - f_p) + self.KAPPA / 2 + g**2 / (
            1j * 2 * np.pi * (self.F_R - f_p) + gamma / 2
        )
        return np.abs((self.KAPPA / 2) / denom) ** 2

    def test_recovers_g_and_gamma(self):
        g, gamma = 2 * np.pi * 2.3e6, 2 * np.pi * 0.6e6
        f_p = np.linspace(self.F_R - 6e6, self.F_R + 6e6, 801)
        fit = fit_rabi_doublet(f_p, self._doublet(g, gamma, f_p), self.KAPPA)
        assert fit.converged
        assert fit.params["g"] == pytest.approx(g, rel=0.01)
        assert fit.params["gamma"] == pytest.approx(gamma, rel=0.01)

    def test_cofit_kappa(self):
        g, gamma = 2 * np.pi * 2.3e6, 2 * np.pi * 0.6e6
        f_p = np.linspace(self.F_R - 6e6, self.F_R + 6e6, 801)
        fit = fit_rabi_doublet(
            f_p, self._doublet(g, gamma, f_p), 1.2 * self.KAPPA, fit_kappa=True
        )
        assert fit.params["kappa"] == pytest.approx(self.KAPPA, rel=0.01)
        assert fit.params["g"] == pytest.approx(g, rel=0.01)

    def test_noisy_recovery(self):
        rng = np.random.default_rng(3)
        g, gamma = 2 * np.pi * 2.3e6, 2 * np.pi * 0.5e6
        f_p = np.linspace(self.F_R - 6e6, self.F_R + 6e6, 601)
        y = self._doublet(g, gamma, f_p) + rng.normal(0, 0.002, f_p.size)
        fit = fit_rabi_doublet(f_p, y, self.KAPPA)
        assert fit.params["g"] == pytest.approx(g, rel=0.01)

    def test_unresolved_doublet_rejected(self):
        # Weak coupling: single peak, no doublet to fit.
        g, gamma = 2 * np.pi * 0.05e6, 2 * np.pi * 0.5e6
        f_p = np.linspace(self.F_R - 6e6, self.F_R + 6e6, 801)
        with pytest.raises(ValueError, match="unresolved"):
            fit_rabi_doublet(f_p, self._doublet(g, gamma, f_p), self.KAPPA)

    def test_jacobian_matches_finite_difference(self):
        g, gamma = 2 * np.pi * 2.0e6, 2 * np.pi * 0.5e6
        f_p = np.linspace(self.F_R - 5e6, self.F_R + 5e6, 101)

        def model(q):
            return self._doublet(q[0], q[1], f_p)

        p = np.array([g, gamma])
        delta = 1j * 2 * np.pi * (self.F_R - f_p)
        w = delta + gamma / 2
        d = delta + self.KAPPA / 2 + g**2 / w
        absd2 = np.abs(d) ** 2
        num = (self.KAPPA / 2) ** 2
        analytic = np.column_stack(
            [
                -num * 2 * np.real(np.conj(d) * (2 * g / w)) / absd2**2,
                -num * 2 * np.real(np.conj(d) * (-(g**2) / (2 * w**2))) / absd2**2,
            ]
        )
        numeric = _central_diff_jac(model, p, eps=1e-6)
        scale = np.max(np.abs(analytic))
        np.testing.assert_allclose(analytic / scale, numeric / scale, atol=1e-6)
