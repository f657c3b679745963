"""
Seeded synthetic data for the three problems.

A: y_i = f(i/n) + xi_i with i.i.d. noise.
B: i.i.d. sample from the density f on [0,1] (inverse-CDF on a fixed grid).
C: centered stationary Gaussian sequence whose spectral density is f.
"""
import logging
from functools import lru_cache

import numpy as np
from scipy import linalg
from scipy.integrate import cumulative_trapezoid

from smoothcal.constants import DENSITY_GRID_SIZE, DENSITY_MASS_TOLERANCE, MAX_TOEPLITZ_N
from smoothcal.errors import DomainError, InvalidDensityError, SizeError, SpectralValidityError
from smoothcal.fourier_core import SQRT2, sample_on_regular_grid, synthesize
from smoothcal.models import CoefficientModel, DataSet, NoiseSpec, Problem, Seed, _check_integer

logger = logging.getLogger(__name__)


def _as_seed(seed):
    return seed if isinstance(seed, Seed) else Seed(int(seed))


def gen_regression(model, n, noise=None, seed=0, replication=0):
    """Regression sample y_i = f(i/n) + xi_i on the design x_i = i/n."""
    n = _check_integer(n, 'n', 2)
    noise = noise or NoiseSpec()
    rng = _as_seed(seed).rng(replication)
    signal = sample_on_regular_grid(model, n)
    y = signal + noise.draw(rng, n)
    return DataSet(Problem.A, y, design=np.arange(1, n + 1) / n)


def density_on_grid(model, grid_size=DENSITY_GRID_SIZE):
    x = np.linspace(0.0, 1.0, grid_size)
    return x, synthesize(model, x)


def validate_density(model, grid_size=DENSITY_GRID_SIZE):
    """Raise InvalidDensityError unless c_1 = 1 and f >= 0 on the grid; return (x, f)."""
    if abs(model.coeffs[0] - 1.0) > DENSITY_MASS_TOLERANCE:
        raise InvalidDensityError(f"density must integrate to 1 (c_1 = {model.coeffs[0]:.10g})")
    x, f = density_on_grid(model, grid_size)
    lowest = float(np.min(f))
    if lowest < -1e-12:
        raise InvalidDensityError(f"density is negative on the grid (min {lowest:.6g})")
    return x, np.maximum(f, 0.0)


def gen_density_sample(model, n, seed=0, replication=0):
    """n i.i.d. draws from f by inverse-CDF interpolation."""
    n = _check_integer(n, 'n', 2)
    x, f = validate_density(model)
    cdf = cumulative_trapezoid(f, x, initial=0.0)
    cdf /= cdf[-1]
    # drop flat stretches so the inverse is single valued
    cdf, keep = np.unique(cdf, return_index=True)
    rng = _as_seed(seed).rng(replication)
    draws = np.interp(rng.random(n), cdf, x[keep])
    return DataSet(Problem.B, draws)


def covariance_from_spectrum(model, h):
    """r(h) = sqrt(2) int cos(2 pi h x) f(x) dx: sqrt(2) c_1 at h = 0 and c_{2h} otherwise."""
    h = _check_integer(h, 'h', 0)
    if h == 0:
        return SQRT2 * float(model.coeffs[0])
    return float(model.coeffs[2 * h - 1]) if 2 * h <= model.K else 0.0


def covariance_sequence(model, n):
    return np.array([covariance_from_spectrum(model, h) for h in range(n)])


@lru_cache(maxsize=16)
def _toeplitz_factor(coeff_bytes, n):
    model = CoefficientModel(np.frombuffer(coeff_bytes, dtype=float))
    cov = linalg.toeplitz(covariance_sequence(model, n))
    try:
        factor = linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError as e:
        raise SpectralValidityError(f"Toeplitz covariance is not positive definite for n={n}: {e}") from e
    factor.setflags(write=False)
    return factor


def gen_stationary_gaussian(model, n, seed=0, replication=0, max_n=MAX_TOEPLITZ_N):
    """One path of length n with covariance r(|i-j|), via Cholesky of the Toeplitz matrix."""
    n = _check_integer(n, 'n', 2)
    if n > max_n:
        raise SizeError(f"stationary sequences are limited to n <= {max_n}, got {n}")
    sines = model.coeffs[2::2]
    if sines.size and np.any(sines != 0.0):
        logger.warning("Sine coefficients do not enter the covariance and are ignored")
    _, f = density_on_grid(CoefficientModel(model.coeffs))
    if float(np.min(f)) < -1e-12:
        raise SpectralValidityError("spectral density is negative on the grid")
    factor = _toeplitz_factor(np.ascontiguousarray(model.coeffs, dtype=float).tobytes(), n)
    rng = _as_seed(seed).rng(replication)
    return DataSet(Problem.C, factor @ rng.standard_normal(n))


def simulate(problem, model, n, noise=None, seed=0, replication=0, max_n=MAX_TOEPLITZ_N):
    """Dispatch to the generator for `problem`."""
    problem = Problem.from_name(problem)
    if problem is Problem.A:
        return gen_regression(model, n, noise, seed, replication)
    if problem is Problem.B:
        return gen_density_sample(model, n, seed, replication)
    return gen_stationary_gaussian(model, n, seed, replication, max_n=max_n)


def noise_moments(noise, n, seed=0, replication=0):
    """Sample mean and variance of n noise draws."""
    if n < 2:
        raise DomainError("need n >= 2 draws")
    draws = noise.draw(_as_seed(seed).rng(replication), n)
    return float(np.mean(draws)), float(np.var(draws, ddof=1))

