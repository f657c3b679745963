"""
Trigonometric basis on [0,1], exact Fourier analysis of known functions,
the smoothness index rho(N), the risk A(n,N) and the oracle truncation N*.

Basis: phi_1 = 1, phi_2l = sqrt(2) cos(2 pi l x), phi_2l+1 = sqrt(2) sin(2 pi l x).
"""
import logging
import math

import numpy as np
from scipy.integrate import simpson

from smoothcal.constants import NIKOLSKII_RELATIVE_INCREMENT, QUADRATURE_POINTS
from smoothcal.errors import DomainError, NumericError
from smoothcal.models import CoefficientModel, GridFunction, RhoModel, SmoothnessProfile, _check_integer

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


def _check_unit_interval(x):
    x_arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x_arr)) or np.any(x_arr < 0.0) or np.any(x_arr > 1.0):
        raise DomainError("x must lie in [0, 1]")
    return x_arr


def basis_matrix(K, x):
    """Matrix B with B[i, k-1] = phi_k(x_i), shape (len(x), K)."""
    K = _check_integer(K, 'K', 1)
    x_arr = np.atleast_1d(_check_unit_interval(x))
    k = np.arange(1, K + 1)
    freq = k // 2
    phase = 2.0 * np.pi * np.outer(x_arr, freq)
    out = np.where(k % 2 == 0, SQRT2 * np.cos(phase), SQRT2 * np.sin(phase))
    out[:, 0] = 1.0
    return out


def eval_basis(k, x):
    """phi_k(x) for k >= 1 and x in [0, 1]."""
    k = _check_integer(k, 'k', 1)
    x = float(_check_unit_interval(x))
    if k == 1:
        return 1.0
    l = k // 2
    if k % 2 == 0:
        return SQRT2 * math.cos(2.0 * math.pi * l * x)
    return SQRT2 * math.sin(2.0 * math.pi * l * x)


def quadrature_grid(points=QUADRATURE_POINTS):
    return np.linspace(0.0, 1.0, points)


def _sample_function(f, x):
    if isinstance(f, GridFunction):
        if f.size == x.size:
            return np.array(f.samples)
        return f(x)
    if isinstance(f, CoefficientModel):
        return synthesize(f, x)
    try:
        values = np.asarray(f(x), dtype=float)
    except (TypeError, ValueError):
        values = None
    if values is None or values.shape != x.shape:
        values = np.array([float(f(xi)) for xi in x])
    return values


def project_coefficients(f, K, points=QUADRATURE_POINTS):
    """c_k = int_0^1 f(x) phi_k(x) dx by composite Simpson on a fixed grid."""
    K = _check_integer(K, 'K', 1)
    x = quadrature_grid(points)
    values = _sample_function(f, x)
    if not np.all(np.isfinite(values)):
        raise NumericError("function samples must be finite for projection")
    coeffs = simpson(values[:, None] * basis_matrix(K, x), x=x, axis=0)
    return CoefficientModel(coeffs)


def gram_matrix(K, points=QUADRATURE_POINTS):
    """Quadrature Gram matrix of phi_1..phi_K; the identity up to rounding."""
    x = quadrature_grid(points)
    B = basis_matrix(K, x)
    return np.vstack([simpson(B * B[:, [j]], x=x, axis=0) for j in range(B.shape[1])])


def synthesize(model, x):
    """Evaluate f(x) = sum_k c_k phi_k(x) from the stored coefficients."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x_arr.shape)
    # chunked to bound the basis matrix size
    rows = max(1, 2 ** 22 // model.K)
    for start in range(0, x_arr.size, rows):
        chunk = x_arr[start:start + rows]
        out[start:start + chunk.size] = basis_matrix(model.K, chunk) @ model.coeffs
    return out


def sample_on_regular_grid(model, n):
    """f(i/n) for i = 1..n via an FFT over folded frequencies."""
    n = _check_integer(n, 'n', 1)
    c = model.coeffs
    K = c.size
    spectrum = np.zeros(n, dtype=complex)
    l_max = K // 2
    if l_max:
        l = np.arange(1, l_max + 1)
        cos_part = c[2 * l - 1]
        sin_part = np.zeros(l_max)
        has_sin = 2 * l < K
        sin_part[has_sin] = c[2 * l[has_sin]]
        np.add.at(spectrum, l % n, SQRT2 * (cos_part - 1j * sin_part))
    values = c[0] + np.real(np.fft.ifft(spectrum)) * n
    # x_n = 1 coincides with x = 0
    return np.roll(values, -1)


def smoothness_profile(model):
    """Exact profile N -> sum_{k>N} c_k^2, extended by the tail model beyond K."""
    c2 = model.coeffs ** 2
    K = model.K
    tail_K = float(model.tail_model.rho(K)) if model.tail_model is not None else 0.0
    suffix = np.append(np.cumsum(c2[::-1])[::-1], 0.0) + tail_K

    def rho(N):
        N = np.asarray(N, dtype=int)
        out = suffix[np.minimum(N, K)]
        if model.tail_model is not None:
            beyond = N > K
            if np.any(beyond):
                out = np.where(beyond, model.tail_model.rho(np.maximum(N, 1)), out)
        return out

    return SmoothnessProfile(rho)


def rho_tail(model, N):
    """rho(N) = sum_{k>N} c_k^2, using the tail model when k exceeds K."""
    N = _check_integer(N, 'N', 0)
    c2 = model.coeffs ** 2
    if N >= model.K:
        return float(model.tail_model.rho(N)) if model.tail_model is not None else 0.0
    tail = float(model.tail_model.rho(model.K)) if model.tail_model is not None else 0.0
    return math.fsum(c2[N:]) + tail


def risk_A(n, N, rho_N):
    """A(n, N) = N/n + rho(N) with unit noise variance."""
    n = _check_integer(n, 'n', 1)
    N = _check_integer(N, 'N', 1)
    if N > n:
        raise DomainError(f"N must not exceed n (N={N}, n={n})")
    if rho_N < 0:
        raise DomainError("rho(N) must be nonnegative")
    return N / n + rho_N


def risk_curve(n, profile, sigma_sq=1.0):
    """A(n, N) for N = 1..n, with the variance term scaled by sigma^2."""
    Ns = np.arange(1, n + 1)
    return Ns, sigma_sq * Ns / n + profile(Ns)


def optimal_N(n, profile, sigma_sq=1.0):
    """Smallest N in [1, n] minimising A(n, N)."""
    n = _check_integer(n, 'n', 1)
    if not profile.covers(n):
        raise DomainError(f"profile defined only up to N={profile.n_max}, need {n}")
    _, risks = risk_curve(n, profile, sigma_sq)
    return int(np.argmin(risks)) + 1


def nikolskii_bound(profile, L_max):
    """sum_{l<=L_max} 2^(l+1/2) sqrt(rho(2^l)); math.inf when the sum has not settled."""
    L_max = _check_integer(L_max, 'L_max', 0)
    Ns = 2 ** np.arange(L_max + 1)
    rho = np.maximum(profile(Ns), 0.0)
    terms = 2.0 ** (np.arange(L_max + 1) + 0.5) * np.sqrt(rho)
    total = math.fsum(terms)
    if total == 0.0:
        return 0.0
    if terms[-1] / total > NIKOLSKII_RELATIVE_INCREMENT:
        logger.info(f"Nikol'skii sum not stabilised at L_max={L_max}")
        return math.inf
    return total


def coefficients_from_rho_model(rho_model, K, head=1.0, signs='positive', rng=None):
    """Coefficients with c_1 = head and c_k^2 = rho(k-1) - rho(k), tail model attached."""
    K = _check_integer(K, 'K', 1)
    if not isinstance(rho_model, RhoModel):
        raise DomainError("rho_model must be a RhoModel")
    if K == 1:
        return CoefficientModel([head], tail_model=rho_model)
    rho = rho_model.rho(np.arange(1, K + 1, dtype=float))
    increments = rho[:-1] - rho[1:]
    if np.any(increments < -1e-15 * np.maximum(rho[:-1], 1e-300)):
        raise DomainError("rho model must be nonincreasing to define coefficients")
    magnitudes = np.sqrt(np.maximum(increments, 0.0))
    if isinstance(signs, str):
        if signs == 'positive':
            sign_vec = np.ones(K - 1)
        elif signs == 'alternating':
            sign_vec = np.where(np.arange(K - 1) % 2 == 0, 1.0, -1.0)
        elif signs == 'random':
            if rng is None:
                raise DomainError("random signs need an rng")
            sign_vec = rng.choice([-1.0, 1.0], size=K - 1)
        else:
            raise DomainError(f"unknown sign pattern {signs!r}")
    else:
        sign_vec = np.resize(np.sign(np.asarray(signs, dtype=float)), K - 1)
    return CoefficientModel(np.concatenate([[head], sign_vec * magnitudes]), tail_model=rho_model)


def covariance_model(model, lags=None):
    """Lag-indexed sequence d_{h+1} = r(h): d_1 = sqrt(2) c_1, d_{h+1} = c_{2h}."""
    if lags is None:
        lags = model.K // 2 + 1
    lags = _check_integer(lags, 'lags', 1)
    d = np.zeros(lags)
    d[0] = SQRT2 * model.coeffs[0]
    h = np.arange(1, lags)
    inside = 2 * h <= model.K
    d[1:][inside] = model.coeffs[2 * h[inside] - 1]
    return CoefficientModel(d)
