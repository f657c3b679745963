"""
Confidence statements for rho(N).

The level alpha is the coverage mass: v(alpha) solves P(|Z| <= v) = alpha.
Non-asymptotic bounds normalise rho_hat - rho by sqrt(2) Theta(n, N, rho)
for every problem.
"""
import logging
import math
from functools import lru_cache

import numpy as np
from scipy import special

from smoothcal.errors import DomainError
from smoothcal.models import ConfidenceInterval, ConfidenceRegion, Problem, _check_integer
from smoothcal.tail_calculus import (b_phi_tail, chi_function, combine_max, overline_function, phi2,
                                     upsilon_phi)

logger = logging.getLogger(__name__)

CI_METHODS = ('plug-in', 'quadratic-solve')


def theta(n, N, rho):
    """Theta(n, N, rho) = sqrt(4 rho / n + 9 N / n^2)."""
    n = _check_integer(n, 'n', 1)
    N = _check_integer(N, 'N', 1)
    if N > n:
        raise DomainError(f"N must not exceed n (N={N}, n={n})")
    if rho < 0:
        raise DomainError("rho must be nonnegative; clamp rho_hat before calling theta")
    return math.sqrt(4.0 * rho / n + 9.0 * N / n ** 2)


def _two_sided_mass(v):
    return float(special.erf(v / math.sqrt(2.0)))


def normal_quantile_two_sided(alpha):
    """v with (2 pi)^{-1/2} int_{-v}^{v} exp(-x^2/2) dx = alpha."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    v = float(special.ndtri(0.5 * (1.0 + alpha)))
    # one Newton step against the erf mass
    density = 2.0 * math.exp(-0.5 * v * v) / math.sqrt(2.0 * math.pi)
    return max(v - (_two_sided_mass(v) - alpha) / density, 0.0)


def asymptotic_ci(rho_hat_raw, n, N, alpha, method='plug-in'):
    """Interval for rho(N) from |rho_hat - rho| / Theta <= v(alpha)."""
    if method not in CI_METHODS:
        raise DomainError(f"method must be one of {', '.join(CI_METHODS)}")
    v = normal_quantile_two_sided(alpha)
    if method == 'plug-in':
        half_width = v * theta(n, N, max(rho_hat_raw, 0.0))
        return ConfidenceInterval(N, n, alpha, rho_hat_raw - half_width, rho_hat_raw + half_width, method)

    # {rho >= 0 : (rho_hat - rho)^2 <= v^2 (4 rho / n + 9 N / n^2)}
    centre = rho_hat_raw + 2.0 * v * v / n
    disc = 4.0 * rho_hat_raw * v * v / n + 4.0 * v ** 4 / n ** 2 + 9.0 * v * v * N / n ** 2
    if disc < 0:
        logger.warning(f"Empty confidence set for N={N}: rho_hat={rho_hat_raw:.6g} too negative")
        return ConfidenceInterval(N, n, alpha, 0.0, 0.0, method, empty=True)
    root = math.sqrt(disc)
    lower, upper = max(centre - root, 0.0), centre + root
    if upper < 0:
        logger.warning(f"Confidence set for N={N} lies below zero")
        return ConfidenceInterval(N, n, alpha, 0.0, 0.0, method, empty=True)
    return ConfidenceInterval(N, n, alpha, lower, upper, method)


@lru_cache(maxsize=None)
def _default_zeta(problem_value):
    if problem_value == Problem.C.value:
        return combine_max(overline_function(upsilon_phi()), overline_function(chi_function(phi2(), 1.0)))
    return zeta_for_noise(phi2())


def zeta_for_noise(noise_phi):
    """zeta = max(chi[phi_bar], phi_bar) for noise in B(phi) with unit norm."""
    phi_bar = overline_function(noise_phi)
    return combine_max(chi_function(phi_bar, 1.0), phi_bar)


def combined_phi(problem, noise_phi=None):
    problem = Problem.from_name(problem)
    if problem is Problem.A and noise_phi is not None:
        return zeta_for_noise(noise_phi)
    return _default_zeta(problem.value)


def nonasymptotic_tail(problem, n, N, rho_plug, t, delta_sq=1.0, noise_phi=None, normalized=False):
    """B-space bound on P(|rho_hat - rho| > t), i.e. 2 exp(-zeta*(t / (sqrt 2 Theta)))."""
    problem = Problem.from_name(problem)
    if problem is Problem.C and not delta_sq > 0:
        raise DomainError("problem C needs Delta^2 = Var(xi_1) > 0")
    zeta = combined_phi(problem, noise_phi)
    scale = delta_sq if problem is Problem.C else 1.0
    if not normalized:
        scale *= math.sqrt(2.0) * theta(n, N, rho_plug)
    return b_phi_tail(zeta, scale, t, symmetric=True)


def gaussian_tail(v):
    """P(|mu| > v) for mu ~ N(0, 1/2)."""
    return float(special.erfc(v))


def union_region(trajectory, a, b, thresholds, method='gaussian', delta_sq=1.0, noise_phi=None):
    """Union bound Q <= sum_N P(|mu_N| > v(N)) over N in [a, b], capped at 1."""
    a = _check_integer(a, 'a', 1)
    b = _check_integer(b, 'b', 1)
    if a > b:
        raise DomainError(f"empty range [{a}, {b}]")
    if len(trajectory) == 0 or a < trajectory.N[0] or b > trajectory.N[-1]:
        raise DomainError(f"range [{a}, {b}] outside the trajectory")
    count = b - a + 1
    v = np.broadcast_to(np.asarray(thresholds, dtype=float), (count,)).copy() \
        if np.ndim(thresholds) == 0 else np.asarray(thresholds, dtype=float)
    if v.size != count:
        raise DomainError(f"need {count} thresholds, got {v.size}")
    if method == 'gaussian':
        per_N = special.erfc(v)
    elif method == 'nonasymptotic':
        problem = trajectory.problem or Problem.B
        zeta = combined_phi(problem, noise_phi)
        scale = delta_sq if problem is Problem.C else 1.0
        per_N = np.array([b_phi_tail(zeta, scale, vi, symmetric=True) for vi in v])
    else:
        raise DomainError(f"unknown union bound method {method!r}")
    return ConfidenceRegion(a, b, v, per_N, min(1.0, float(np.sum(per_N))), method)
