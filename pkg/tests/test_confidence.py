import math
import warnings

import numpy as np
import pytest
from scipy import special

from smoothcal.confidence import (asymptotic_ci, gaussian_tail, nonasymptotic_tail, normal_quantile_two_sided,
                                  theta, union_region)
from smoothcal.errors import DomainError
from smoothcal.estimators import empirical_coeffs, rho_hat_trajectory
from smoothcal.fourier_core import rho_tail
from smoothcal.models import Problem, RhoHatTrajectory
from smoothcal.simulators import gen_density_sample


def test_theta_example():
    assert theta(100, 10, 0.05) == pytest.approx(0.1048809, abs=1e-7)


@pytest.mark.parametrize('args', [(10, 11, 0.0), (100, 10, -0.01), (0, 1, 0.0)])
def test_theta_rejects_bad_arguments(args):
    with pytest.raises(DomainError):
        theta(*args)


class TestQuantile:
    def test_ninety_five(self):
        assert normal_quantile_two_sided(0.95) == pytest.approx(1.9599640, abs=1e-7)

    def test_half(self):
        assert normal_quantile_two_sided(0.5) == pytest.approx(0.6744898, abs=1e-7)

    def test_matches_mass(self):
        for alpha in (0.1, 0.68, 0.99, 0.999):
            v = normal_quantile_two_sided(alpha)
            assert special.erf(v / math.sqrt(2.0)) == pytest.approx(alpha, abs=1e-12)

    def test_quantile_raises_no_warnings(self):
        with warnings.catch_warnings():
            warnings.simplefilter('error')
            for alpha in (0.5, 0.95, 0.999999):
                normal_quantile_two_sided(alpha)

    @pytest.mark.parametrize('alpha', [0.0, 1.0, -0.2, 1.5])
    def test_rejects_levels_outside_unit_interval(self, alpha):
        with pytest.raises(DomainError):
            normal_quantile_two_sided(alpha)


class TestAsymptoticInterval:
    def test_plug_in_example(self):
        ci = asymptotic_ci(0.05, 100, 10, 0.95)
        half = 1.959964 * 0.1048809
        assert ci.lower == pytest.approx(0.05 - half, abs=1e-6)
        assert ci.upper == pytest.approx(0.05 + half, abs=1e-6)
        assert ci.reported == (0.0, pytest.approx(0.05 + half, abs=1e-6))

    def test_plug_in_clamps_negative_estimate_in_theta(self):
        ci = asymptotic_ci(-0.01, 100, 4, 0.95)
        half = normal_quantile_two_sided(0.95) * theta(100, 4, 0.0)
        assert ci.upper - ci.lower == pytest.approx(2 * half)

    @pytest.mark.parametrize('method', ['plug-in', 'quadratic-solve'])
    def test_intervals_are_nested_in_level(self, method):
        narrow = asymptotic_ci(0.02, 500, 6, 0.8, method)
        wide = asymptotic_ci(0.02, 500, 6, 0.99, method)
        assert wide.lower <= narrow.lower <= narrow.upper <= wide.upper

    def test_quadratic_contains_estimate(self):
        for rho_hat in (0.0, 0.003, 0.2):
            ci = asymptotic_ci(rho_hat, 200, 5, 0.9, 'quadratic-solve')
            assert ci.contains(rho_hat)

    def test_quadratic_endpoints_solve_the_equation(self):
        rho_hat, n, N = 0.1, 400, 8
        ci = asymptotic_ci(rho_hat, n, N, 0.95, 'quadratic-solve')
        v = normal_quantile_two_sided(0.95)
        for rho in (ci.lower, ci.upper):
            assert (rho_hat - rho) ** 2 == pytest.approx(v * v * (4 * rho / n + 9 * N / n ** 2), rel=1e-9)

    def test_quadratic_empty_for_very_negative_estimate(self):
        ci = asymptotic_ci(-1.0, 100, 1, 0.95, 'quadratic-solve')
        assert ci.empty

    def test_unknown_method(self):
        with pytest.raises(DomainError):
            asymptotic_ci(0.1, 100, 4, 0.95, 'bootstrap')


class TestNonasymptoticTail:
    def test_density_quadratic_regime(self):
        bound = nonasymptotic_tail('density', 100, 4, 0.01, 0.4, normalized=True)
        assert bound == pytest.approx(2.0 * math.exp(-0.08), rel=1e-6)

    def test_density_linear_regime(self):
        bound = nonasymptotic_tail('B', 100, 4, 0.01, 2.0, normalized=True)
        assert bound == pytest.approx(2.0 * math.exp(-0.875), rel=1e-3)

    def test_raw_threshold_is_normalised_by_theta(self):
        n, N, rho = 400, 6, 0.02
        scale = math.sqrt(2.0) * theta(n, N, rho)
        raw = nonasymptotic_tail('regression', n, N, rho, 0.3 * scale)
        assert raw == pytest.approx(nonasymptotic_tail('regression', n, N, rho, 0.3, normalized=True))

    def test_bound_decreases_in_t(self):
        values = [nonasymptotic_tail(Problem.B, 1000, 5, 0.01, t, normalized=True) for t in (0.5, 1.0, 2.0, 4.0)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_spectral_needs_positive_variance(self):
        with pytest.raises(DomainError):
            nonasymptotic_tail('C', 100, 4, 0.01, 1.0, delta_sq=0.0)

    def test_gaussian_tail(self):
        assert gaussian_tail(0.0) == 1.0
        assert gaussian_tail(1.0) == pytest.approx(0.1572992, abs=1e-7)


class TestUnionRegion:
    @pytest.fixture
    def trajectory(self):
        return RhoHatTrajectory(np.arange(1, 6), [0.3, 0.1, 0.05, 0.02, 0.01], n=1000, problem='B')

    def test_gaussian_sum(self, trajectory):
        region = union_region(trajectory, 2, 4, 1.0)
        np.testing.assert_allclose(region.per_N, special.erfc(1.0))
        assert region.Q == pytest.approx(3 * special.erfc(1.0))

    def test_capped_at_one(self, trajectory):
        assert union_region(trajectory, 1, 5, 0.0).Q == 1.0

    def test_per_N_thresholds(self, trajectory):
        region = union_region(trajectory, 1, 3, [1.0, 2.0, 3.0])
        assert region.union_sum == pytest.approx(float(np.sum(special.erfc([1.0, 2.0, 3.0]))))

    def test_nonasymptotic_per_N_bounds(self, trajectory):
        region = union_region(trajectory, 1, 2, 2.0, method='nonasymptotic')
        assert np.all(region.per_N > 0)
        assert region.method == 'nonasymptotic'

    def test_threshold_count_must_match(self, trajectory):
        with pytest.raises(DomainError):
            union_region(trajectory, 1, 3, [1.0, 2.0])

    def test_range_must_lie_on_trajectory(self, trajectory):
        with pytest.raises(DomainError):
            union_region(trajectory, 4, 6, 1.0)

    def test_unknown_method(self, trajectory):
        with pytest.raises(DomainError):
            union_region(trajectory, 1, 2, 1.0, method='bonferroni')


def _normalized_deviations(model, n, Ns, seed, reps):
    """(rho_hat - rho) / (sqrt 2 Theta) per replication (rows) and N (columns) for density samples."""
    rho = np.array([rho_tail(model, int(N)) for N in Ns])
    scale = np.array([math.sqrt(2.0) * theta(n, int(N), r) for N, r in zip(Ns, rho)])
    out = np.empty((reps, len(Ns)))
    for r in range(reps):
        coeffs = empirical_coeffs(gen_density_sample(model, n, seed=seed, replication=r), 2 * int(Ns[-1]))
        out[r] = (rho_hat_trajectory(coeffs, (int(Ns[0]), int(Ns[-1]))).values - rho) / scale
    return out


@pytest.mark.slow
def test_nonasymptotic_tail_dominates_density_deviation(density_model):
    n, N, reps = 4096, 8, 2000
    mu = _normalized_deviations(density_model, n, [N], seed=808, reps=reps)[:, 0]
    for t in (1.0, 2.0, 3.0):
        p = np.mean(np.abs(mu) > t)
        se = math.sqrt(max(p * (1.0 - p), 1.0 / reps) / reps)
        assert p <= nonasymptotic_tail('density', n, N, 0.0, t, normalized=True) + 3 * se


@pytest.mark.slow
@pytest.mark.parametrize('v', [6.0, 8.0, 10.0])
def test_union_region_dominates_max_deviation(density_model, v):
    n, reps, Ns = 4096, 500, np.arange(2, 17)
    mu = _normalized_deviations(density_model, n, Ns, seed=909, reps=reps)
    p = np.mean(np.max(np.abs(mu), axis=1) > v)
    se = math.sqrt(max(p * (1.0 - p), 1.0 / reps) / reps)
    trajectory = RhoHatTrajectory(Ns, np.zeros(Ns.size), n=n, problem='B')
    region = union_region(trajectory, 2, 16, v, method='nonasymptotic')
    assert p <= region.Q + 3 * se
