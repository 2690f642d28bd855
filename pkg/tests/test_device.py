import numpy as np
import pytest

from cqedsim.device import (
    ChargeNoiseModel,
    QubitParams,
    ResonatorParams,
    VoltageTuningMap,
    coherence_budget,
    qubit_frequency,
    sample_noise_ensemble,
    sample_noise_trajectory,
    two_qubit_frequencies,
)

RES = ResonatorParams(f_r=6.4262e9, kappa=2 * np.pi * 0.46e6)
TUNING = VoltageTuningMap(kind="quadratic", f_ss=6.3915e9, v_ss=-0.270, curvature=1.5e11)
QUBIT = QubitParams(
    g=2 * np.pi * 2.3e6, gamma=0.0, gamma_nr=1.0 / 125e-6, t_phi=np.inf, tuning=TUNING
)


class TestTuningMaps:
    def test_quadratic_minimum_at_sweet_spot(self):
        f0 = qubit_frequency(TUNING, 0.0)
        assert f0 == TUNING.f_ss
        for dv in (1e-3, 5e-3, -5e-3):
            assert qubit_frequency(TUNING, dv) > f0

    def test_quadratic_first_order_insensitive(self):
        # Numeric derivative at the sweet spot vanishes relative to the
        # derivative one millivolt away.
        h = 1e-6
        d_ss = (qubit_frequency(TUNING, h) - qubit_frequency(TUNING, -h)) / (2 * h)
        d_off = (qubit_frequency(TUNING, 1e-3 + h) - qubit_frequency(TUNING, 1e-3 - h)) / (2 * h)
        assert abs(d_ss) < 1e-6 * abs(d_off)

    def test_quadratic_example_value(self):
        assert qubit_frequency(TUNING, 2e-3) == pytest.approx(6.3915e9 + 1.5e11 * 4e-6)

    def test_linear2d_example(self):
        m1 = VoltageTuningMap(kind="linear2d", coeffs=(6.4e9, 12e9, 0.16e9))
        m2 = VoltageTuningMap(kind="linear2d", coeffs=(6.5e9, -8e9, 0.10e9))
        f1, f2 = two_qubit_frequencies((m1, m2), 1e-3, 10e-3)
        assert f1 == pytest.approx(6.4e9 + 12e6 + 1.6e6)
        assert f2 == pytest.approx(6.5e9 - 8e6 + 1.0e6)

    def test_kind_mismatch_rejected(self):
        lin = VoltageTuningMap(kind="linear2d", coeffs=(6.4e9, 1e9, 1e8))
        with pytest.raises(ValueError):
            qubit_frequency(lin, 0.0)
        with pytest.raises(ValueError):
            two_qubit_frequencies((TUNING, lin), 0.0, 0.0)

    def test_negative_curvature_rejected(self):
        with pytest.raises(ValueError):
            VoltageTuningMap(kind="quadratic", f_ss=6e9, curvature=-1.0)


class TestCoherenceBudget:
    def test_purcell_and_chi_reference_values(self):
        b = coherence_budget(RES, QUBIT, RES.f_r - 34.7e6)
        assert 1.0 / b.gamma_r == pytest.approx(78.7e-6, rel=5e-3)
        assert b.chi / (2 * np.pi) == pytest.approx(-0.1525e6, rel=5e-3)
        assert b.t1 == pytest.approx(48.3e-6, rel=1e-2)

    def test_closed_forms_exact(self):
        q = QubitParams(
            g=2 * np.pi * 1.1e6, gamma=0.0, gamma_nr=5e3, t_phi=300e-6, tuning=TUNING
        )
        f_q = RES.f_r - 50e6
        b = coherence_budget(RES, q, f_q)
        delta = 2 * np.pi * (f_q - RES.f_r)
        assert b.gamma_r == pytest.approx(RES.kappa * q.g**2 / delta**2, rel=1e-12)
        assert b.chi == pytest.approx(q.g**2 / delta, rel=1e-12)
        assert 1.0 / b.t2 == pytest.approx(0.5 / b.t1 + 1.0 / q.t_phi, rel=1e-12)
        assert 1.0 / b.t_rabi_predicted == pytest.approx(
            0.75 / b.t1 + 0.5 / q.t_phi, rel=1e-12
        )

    def test_no_dephasing_limits(self):
        b = coherence_budget(RES, QUBIT, RES.f_r - 34.7e6)
        assert b.t2 == pytest.approx(2 * b.t1, rel=1e-12)
        assert b.t_rabi_predicted == pytest.approx(4 * b.t1 / 3, rel=1e-12)

    def test_zero_detuning_rejected(self):
        with pytest.raises(ValueError):
            coherence_budget(RES, QUBIT, RES.f_r)

    def test_chi_sign_tracks_detuning(self):
        below = coherence_budget(RES, QUBIT, RES.f_r - 30e6)
        above = coherence_budget(RES, QUBIT, RES.f_r + 30e6)
        assert below.chi < 0 < above.chi
        assert below.gamma_r == pytest.approx(above.gamma_r, rel=1e-12)


class TestChargeNoise:
    MODEL = ChargeNoiseModel(
        sigma_quasistatic=0.1e-3, ou_components=((0.05e-3, 5e-6),), seed=7
    )

    def test_deterministic_given_seed(self):
        t1_, v1 = sample_noise_trajectory(self.MODEL, 50e-6, 0.5e-6, stream=3)
        t2_, v2 = sample_noise_trajectory(self.MODEL, 50e-6, 0.5e-6, stream=3)
        np.testing.assert_array_equal(v1, v2)
        np.testing.assert_array_equal(t1_, t2_)

    def test_streams_independent(self):
        _, v1 = sample_noise_trajectory(self.MODEL, 50e-6, 0.5e-6, stream=0)
        _, v2 = sample_noise_trajectory(self.MODEL, 50e-6, 0.5e-6, stream=1)
        assert np.max(np.abs(v1 - v2)) > 0

    def test_zero_model_gives_zero(self):
        model = ChargeNoiseModel()
        _, v = sample_noise_trajectory(model, 10e-6, 1e-6)
        np.testing.assert_array_equal(v, 0.0)

    def test_quasistatic_constant_within_trajectory(self):
        model = ChargeNoiseModel(sigma_quasistatic=0.2e-3, seed=1)
        _, v = sample_noise_trajectory(model, 10e-6, 1e-6)
        assert np.ptp(v) == 0.0
        assert v[0] != 0.0

    def test_ou_autocovariance(self):
        # Ensemble autocovariance at lag tau must match amp^2*exp(-lag/tau)
        # within 5% over 1e5 trajectories.
        amp, tau = 0.05e-3, 5e-6
        model = ChargeNoiseModel(ou_components=((amp, tau),), seed=3)
        dt = tau / 4
        lag_steps = 4
        traj = sample_noise_ensemble(model, (lag_steps + 1) * dt, dt, 100_000)
        x0 = traj[:, 0]
        xl = traj[:, lag_steps]
        var = np.mean(x0 * x0)
        cov = np.mean(x0 * xl)
        assert var == pytest.approx(amp**2, rel=0.05)
        assert cov == pytest.approx(amp**2 * np.exp(-lag_steps * dt / tau), rel=0.05)

    def test_ou_stationarity_across_grid(self):
        # The exact discretization keeps the marginal variance at amp^2
        # for any step size.
        amp, tau = 0.03e-3, 2e-6
        model = ChargeNoiseModel(ou_components=((amp, tau),), seed=5)
        for dt in (tau / 20, tau, 5 * tau):
            traj = sample_noise_ensemble(model, 40 * dt, dt, 4000)
            assert traj.var() == pytest.approx(amp**2, rel=0.1)

    def test_dephasing_scaling_with_tuning_map(self):
        # A quasi-static voltage spread sigma_v maps to a frequency spread
        # 2*c*dv_bias*sigma_v off the sweet spot (linear term) and
        # c*sigma_v^2-scale on it (quadratic term): doubling sigma_v
        # quadruples the on-spot frequency spread but only doubles the
        # off-spot one.
        rng = np.random.default_rng(0)
        v = rng.normal(0.0, 1.0, 200_000)
        c = TUNING.curvature

        def fspread(sigma_v, bias):
            f = qubit_frequency(TUNING, bias + sigma_v * v)
            return np.std(f - np.mean(f))

        on1, on2 = fspread(0.1e-3, 0.0), fspread(0.2e-3, 0.0)
        off1, off2 = fspread(0.1e-3, 5e-3), fspread(0.2e-3, 5e-3)
        assert on2 / on1 == pytest.approx(4.0, rel=0.05)
        assert off2 / off1 == pytest.approx(2.0, rel=0.05)
        # Off-spot linear spread dominates the on-spot quadratic one.
        assert off1 > 10 * on1
        assert off1 == pytest.approx(2 * c * 5e-3 * 0.1e-3, rel=0.05)

    def test_validation(self):
        with pytest.raises(ValueError):
            ChargeNoiseModel(sigma_quasistatic=-1.0)
        with pytest.raises(ValueError):
            ChargeNoiseModel(ou_components=((-1e-3, 1e-6),))
        with pytest.raises(ValueError):
            sample_noise_trajectory(self.MODEL, -1.0, 1e-6)


class TestParamValidation:
    def test_resonator(self):
        with pytest.raises(ValueError):
            ResonatorParams(f_r=-1.0, kappa=1.0)
        with pytest.raises(ValueError):
            ResonatorParams(f_r=6e9, kappa=0.0)

    def test_qubit(self):
        with pytest.raises(ValueError):
            QubitParams(g=0.0, gamma=0.0, gamma_nr=0.0, t_phi=np.inf, tuning=TUNING)
        with pytest.raises(ValueError):
            QubitParams(g=1.0, gamma=-1.0, gamma_nr=0.0, t_phi=np.inf, tuning=TUNING)
