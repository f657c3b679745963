"""Empirical Fourier coefficients, projection and adaptive estimates, tau and rho_hat."""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from smoothcal.errors import DomainError
from smoothcal.fourier_core import SQRT2, rho_tail
from smoothcal.models import (CoefficientModel, EmpiricalCoefficients, NoiseSpec, Problem,
                              RhoHatTrajectory, _check_integer)

logger = logging.getLogger(__name__)

_DENSITY_CHUNK = 2048


def _regression_coeffs(y, K):
    n = y.size
    # y_i sits at x_i = i/n, i.e. FFT slot i mod n
    spectrum = np.fft.fft(np.roll(y, 1))
    out = np.empty(K)
    out[0] = np.mean(y)
    l = np.arange(1, K // 2 + 1)
    out[2 * l - 1] = SQRT2 * spectrum[l].real / n
    l_sin = l[2 * l < K]
    out[2 * l_sin] = -SQRT2 * spectrum[l_sin].imag / n
    return out


def _density_coeffs(xi, K):
    n = xi.size
    L = K // 2
    cos_sum = np.zeros(L)
    sin_sum = np.zeros(L)
    freqs = 2.0 * np.pi * np.arange(1, L + 1)
    for start in range(0, n, _DENSITY_CHUNK):
        phase = np.outer(xi[start:start + _DENSITY_CHUNK], freqs)
        cos_sum += np.cos(phase).sum(axis=0)
        sin_sum += np.sin(phase).sum(axis=0)
    out = np.empty(K)
    out[0] = 1.0
    out[1::2] = SQRT2 * cos_sum[:(K // 2)] / n
    out[2::2] = SQRT2 * sin_sum[:((K - 1) // 2)] / n
    return out


def _lag_coeffs(xi, K):
    n = xi.size
    full = signal.correlate(xi, xi, mode='full')
    return full[n - 1:n - 1 + K] / n


def empirical_coeffs(data, K):
    """c_hat_1..c_hat_K for the data set's problem (lag-indexed for problem C)."""
    K = _check_integer(K, 'K', 1)
    n = data.n
    limit = n - 1 if data.problem is Problem.C else n
    if K > limit:
        raise DomainError(f"K must be <= {limit} for problem {data.problem.value}, got {K}")
    if data.problem is Problem.A:
        values = _regression_coeffs(data.observations, K)
    elif data.problem is Problem.B:
        values = _density_coeffs(data.observations, K)
    else:
        values = _lag_coeffs(data.observations, K)
    return EmpiricalCoefficients(values, n, data.problem)


def projection_estimate(coeffs, N):
    """f_hat_{n,N} = sum_{k<=N} c_hat_k phi_k."""
    N = _check_integer(N, 'N', 1)
    if N > coeffs.K:
        raise DomainError(f"N must be <= K={coeffs.K}, got {N}")
    return CoefficientModel(coeffs.values[:N])


def tau_stat(coeffs, N):
    """tau_N = sum_{j=N+1}^{2N} c_hat_j^2."""
    N = _check_integer(N, 'N', 1)
    if 2 * N > coeffs.K:
        raise DomainError(f"tau_N needs 2N <= K (N={N}, K={coeffs.K})")
    return float(np.sum(coeffs.values[N:2 * N] ** 2))


def tau_curve(coeffs):
    """(N, tau_N) for N = 1..floor(K/2)."""
    if coeffs.K < 2:
        raise DomainError("need K >= 2 coefficients")
    Ns = np.arange(1, coeffs.max_N + 1)
    return Ns, np.array([np.sum(coeffs.values[N:2 * N] ** 2) for N in Ns])


def select_N(coeffs):
    """N_tilde: the smallest argmin of tau_N over [1, floor(K/2)]."""
    Ns, taus = tau_curve(coeffs)
    return int(Ns[np.argmin(taus)])


def adaptive_estimate(coeffs):
    return projection_estimate(coeffs, select_N(coeffs))


def rho_hat(coeffs, N, sigma_sq=1.0):
    """Raw estimate tau_N - sigma^2 N/n; may be negative."""
    return tau_stat(coeffs, N) - sigma_sq * N / coeffs.n


def rho_hat_clamped(coeffs, N, sigma_sq=1.0):
    return max(rho_hat(coeffs, N, sigma_sq), 0.0)


def rho_hat_trajectory(coeffs, N_range=None, sigma_sq=1.0):
    """rho_hat_n(N) over N_range (default 1..floor(K/2))."""
    Ns, taus = tau_curve(coeffs)
    if N_range is not None:
        lo, hi = N_range
        if lo < 1 or hi > coeffs.max_N or lo > hi:
            raise DomainError(f"N range [{lo}, {hi}] outside [1, {coeffs.max_N}]")
        keep = (Ns >= lo) & (Ns <= hi)
        Ns, taus = Ns[keep], taus[keep]
    return RhoHatTrajectory(Ns, taus - sigma_sq * Ns / coeffs.n, coeffs.n, coeffs.problem)


def l2_error(estimate, model):
    """||f_hat - f||^2 by Parseval; estimate.K must not exceed model.K when a tail model is set."""
    N = estimate.K
    if model.tail_model is not None and N > model.K:
        raise DomainError("estimate extends past the explicit coefficients of a tail-modelled function")
    c = np.zeros(max(N, model.K))
    c[:model.K] = model.coeffs
    head = math.fsum((estimate.coeffs - c[:N]) ** 2)
    return head + (rho_tail(model, N) if N <= model.K else 0.0)


@dataclass(frozen=True)
class Decomposition:
    """rho_hat(N) - rho(N) = s1 + s2 + bias with c_hat_j = c_j + delta_j / sqrt(n)."""
    s1: float
    s2: float
    bias: float

    @property
    def total(self):
        return self.s1 + self.s2 + self.bias


def decomposition_terms(model, delta, N, n):
    """Split the estimation error of rho_hat(N) into linear, quadratic and bias parts."""
    N = _check_integer(N, 'N', 1)
    delta = np.asarray(delta, dtype=float)
    if delta.size < 2 * N:
        raise DomainError("need delta_j for j <= 2N")
    c = np.zeros(2 * N)
    m = min(model.K, 2 * N)
    c[:m] = model.coeffs[:m]
    block = slice(N, 2 * N)
    s1 = 2.0 * float(np.dot(c[block], delta[block])) / math.sqrt(n)
    s2 = float(np.sum(delta[block] ** 2 - 1.0)) / n
    return Decomposition(s1, s2, -rho_tail(model, 2 * N))


def sigma_for_problem(tag, params=None):
    """Noise scale sigma: sqrt(Var xi) for A, 1 for B, sqrt(2 c_1^2 + sum_{k>=2} c_k^2) for C."""
    problem = Problem.from_name(tag)
    params = params or {}
    if problem is Problem.B:
        return 1.0
    if problem is Problem.A:
        if 'noise' in params and isinstance(params['noise'], NoiseSpec):
            return params['noise'].scale
        if 'noise_variance' in params:
            variance = float(params['noise_variance'])
            if variance < 0:
                raise DomainError("noise variance must be nonnegative")
            return math.sqrt(variance)
        raise DomainError("problem A needs 'noise' or 'noise_variance'")
    model = params.get('model')
    if not isinstance(model, CoefficientModel):
        raise DomainError("problem C needs the spectral coefficient 'model'")
    c = model.coeffs
    return math.sqrt(2.0 * c[0] ** 2 + math.fsum(c[1:] ** 2))
