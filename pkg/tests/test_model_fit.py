import math

import numpy as np
import pytest

from smoothcal.errors import DomainError, InsufficientDataError, TrigPolynomialError
from smoothcal.model_fit import (QuasiExpFamily, QuasiPowerFamily, check_gamma_condition, eval_rho_model,
                                 fit_family, fit_quasi_exp, fit_quasi_power, fitted_curve, gauss_newton,
                                 loglin_init_exp, loglin_init_power, theta_weights)
from smoothcal.models import QuasiExp, QuasiPower, RhoHatTrajectory


def trajectory_of(model, N_max=30, n=None):
    Ns = np.arange(1, N_max + 1)
    return RhoHatTrajectory(Ns, model.rho(Ns), n=n)


class TestEvaluation:
    def test_quasi_power(self):
        assert eval_rho_model(QuasiPower(2.0, 1.0), 4) == pytest.approx(0.5)
        assert eval_rho_model(QuasiPower(1.0, 2.0, 1.0), 3) == pytest.approx(math.log(4.0) / 9.0)

    def test_quasi_exp(self):
        assert eval_rho_model(QuasiExp(2.0, 1.0, 0.5), 3) == pytest.approx(0.75)

    def test_rejects_zero_N(self):
        with pytest.raises(DomainError):
            eval_rho_model(QuasiPower(1.0, 1.0), 0)

    @pytest.mark.parametrize('kwargs', [dict(c1=0.0, alpha=1.0), dict(c1=1.0, alpha=0.0),
                                        dict(c1=1.0, alpha=1.0, gamma=-0.5)])
    def test_quasi_power_parameter_domain(self, kwargs):
        with pytest.raises(DomainError):
            QuasiPower(**kwargs)

    def test_quasi_exp_needs_q_in_unit_interval(self):
        with pytest.raises(DomainError):
            QuasiExp(1.0, 0.0, 1.0)


class TestGammaCondition:
    def test_power_law_ratio(self):
        check = check_gamma_condition(QuasiPower(1.0, 2.0), 10)
        assert check.gamma_sup == pytest.approx(0.25)
        assert check.satisfied
        assert check.argmax_N == 2

    def test_geometric_ratio(self):
        check = check_gamma_condition(QuasiExp(1.0, 0.0, 0.5), 10)
        assert check.gamma_sup == pytest.approx(0.25)

    def test_slowly_varying_profile(self):
        check = check_gamma_condition(lambda N: 1.0 / np.log(np.asarray(N) + 1.0), 50)
        assert check.satisfied
        assert check.gamma_sup > 0.8

    def test_trigonometric_polynomial(self):
        with pytest.raises(TrigPolynomialError) as exc:
            check_gamma_condition(lambda N: np.where(np.asarray(N) < 6, 1.0, 0.0), 4)
        assert exc.value.N == 6


class TestInitializers:
    def test_power_initializer_is_exact_on_model_values(self):
        init = loglin_init_power(trajectory_of(QuasiPower(0.5, 1.5, 0.7)))
        assert math.exp(init.ln_c) == pytest.approx(0.5, rel=1e-8)
        assert init.alpha == pytest.approx(1.5, rel=1e-8)
        assert init.gamma == pytest.approx(0.7, rel=1e-8)

    def test_exp_initializer_is_exact_on_model_values(self):
        init = loglin_init_exp(trajectory_of(QuasiExp(2.0, 0.5, 0.7)))
        assert init.kappa == pytest.approx(0.5, abs=1e-8)
        assert math.exp(init.ln_q) == pytest.approx(0.7, rel=1e-8)
        assert not init.mismatch

    def test_growing_trajectory_flags_mismatch(self, caplog):
        Ns = np.arange(1, 21)
        init = loglin_init_exp(RhoHatTrajectory(Ns, np.exp(0.01 * Ns)))
        assert init.mismatch
        assert 'model mismatch' in caplog.text

    def test_needs_enough_positive_points(self):
        Ns = np.arange(1, 13)
        values = np.where(Ns <= 8, 1.0 / Ns, -0.01)
        with pytest.raises(InsufficientDataError):
            loglin_init_power(RhoHatTrajectory(Ns, values))


class TestJacobian:
    @pytest.mark.parametrize('family, params', [
        (QuasiPowerFamily, np.array([math.log(0.5), math.log(1.5), math.log(0.7)])),
        (QuasiExpFamily, np.array([math.log(2.0), 0.5, 0.3])),
    ])
    def test_matches_finite_differences(self, family, params):
        N = np.arange(1.0, 16.0)
        J = family.jacobian(params, N)
        h = 1e-6
        for j in range(3):
            step = np.zeros(3)
            step[j] = h
            numeric = (family.values(params + step, N) - family.values(params - step, N)) / (2 * h)
            np.testing.assert_allclose(J[:, j], numeric, rtol=1e-6, atol=1e-12)


class TestFitting:
    def test_noiseless_quasi_power_recovery(self):
        result = fit_quasi_power(trajectory_of(QuasiPower(0.5, 1.5, 0.7)))
        assert result.converged
        assert result.model.c1 == pytest.approx(0.5, rel=1e-6)
        assert result.model.alpha == pytest.approx(1.5, rel=1e-6)
        assert result.model.gamma == pytest.approx(0.7, rel=1e-6)
        assert result.rss < 1e-20

    def test_noiseless_quasi_exp_recovery(self):
        result = fit_quasi_exp(trajectory_of(QuasiExp(2.0, 0.5, 0.7)))
        assert result.converged
        assert result.model.c2 == pytest.approx(2.0, rel=1e-6)
        assert result.model.kappa == pytest.approx(0.5, abs=1e-6)
        assert result.model.q == pytest.approx(0.7, rel=1e-6)

    def test_gauss_newton_from_a_perturbed_start(self):
        truth = QuasiPower(0.5, 1.5, 0.7)
        N = np.arange(1.0, 31.0)
        start = QuasiPowerFamily.to_theta(QuasiPower(0.4, 1.2, 0.5))
        params, objective, iterations, grad_norm, status, history = gauss_newton(
            QuasiPowerFamily, start, N, truth.rho(N))
        np.testing.assert_allclose(params, QuasiPowerFamily.to_theta(truth), rtol=1e-6)
        assert status == 'converged'
        assert all(a >= b for a, b in zip(history, history[1:]))

    def test_theta_weighted_fit(self):
        result = fit_quasi_power(trajectory_of(QuasiPower(0.5, 1.5, 0.7), n=1000), weighting='theta')
        assert result.model.alpha == pytest.approx(1.5, rel=1e-6)

    def test_theta_weights_need_n(self):
        with pytest.raises(DomainError):
            theta_weights(trajectory_of(QuasiPower(1.0, 1.0)), QuasiPower(1.0, 1.0))

    def test_noisy_fit_stays_close(self, rng):
        truth = QuasiPower(0.5, 1.5, 0.7)
        traj = trajectory_of(truth, N_max=40)
        noisy = RhoHatTrajectory(traj.N, traj.values * np.exp(0.01 * rng.standard_normal(len(traj))))
        result = fit_quasi_power(noisy)
        truth_rss = float(np.sum((truth.rho(noisy.N) - noisy.values) ** 2))
        assert result.rss <= truth_rss * (1.0 + 1e-6)

    def test_unknown_family(self):
        with pytest.raises(DomainError):
            fit_family(trajectory_of(QuasiPower(1.0, 1.0)), 'spline')

    def test_fitted_curve_and_row(self):
        result = fit_family(trajectory_of(QuasiPower(0.5, 1.5, 0.7)), 'quasi-power')
        np.testing.assert_allclose(fitted_curve(result, [1, 2]), QuasiPower(0.5, 1.5, 0.7).rho(np.array([1, 2])),
                                   rtol=1e-6)
        row = result.as_row()
        assert row['family'] == 'quasi-power'
        assert row['converged'] == 1
        assert {'c1', 'alpha', 'gamma', 'rss', 'init_alpha'} <= set(row)

    @pytest.mark.parametrize('family, model', [('quasi-power', QuasiPower(0.5, 1.5, 0.7)),
                                               ('quasi-exp', QuasiExp(1.0, 0.4, 0.8))])
    def test_row_values_are_plain_floats(self, family, model):
        row = fit_family(trajectory_of(model), family).as_row()
        for key in (*model.parameters(), 'rss', *(f'init_{k}' for k in model.parameters())):
            assert type(row[key]) is float, key
