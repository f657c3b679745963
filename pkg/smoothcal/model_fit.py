"""
Parametric smoothness models and least-squares fitting of rho_hat trajectories.

Both families are fitted on the raw trajectory by Gauss-Newton with a
backtracking line search. Parameters live in unconstrained coordinates:
quasi-power (ln c1, ln alpha, ln gamma), quasi-exp (ln c2, kappa, logit q).
"""
import logging
import math
from typing import NamedTuple

import numpy as np
from scipy import linalg

from smoothcal.confidence import theta
from smoothcal.constants import (BACKTRACK_STEPS, CONDITION_LIMIT, GRADIENT_TOLERANCE, MAX_FIT_ITERATIONS,
                                 MIN_LOGLIN_POINTS, STEP_TOLERANCE)
from smoothcal.errors import DomainError, InsufficientDataError, NumericError, RankError, TrigPolynomialError
from smoothcal.models import FitResult, GammaCheck, QuasiExp, QuasiPower, RhoModel, _check_integer

logger = logging.getLogger(__name__)

# Smallest alpha / gamma the initializer hands to the optimizer
_PARAMETER_FLOOR = 1e-8
_BOUNDARY = 1e-6


class PowerInit(NamedTuple):
    ln_c: float
    alpha: float
    gamma: float


class ExpInit(NamedTuple):
    ln_c: float
    kappa: float
    ln_q: float
    mismatch: bool


def eval_rho_model(model, N):
    """c1 N^-alpha ln^gamma(N+1) or c2 N^kappa q^N."""
    if not isinstance(model, RhoModel):
        raise DomainError("model must be a RhoModel")
    N = _check_integer(N, 'N', 1)
    return float(model.rho(N))


def _rho_callable(profile):
    if isinstance(profile, RhoModel):
        return profile.rho
    return profile


def check_gamma_condition(profile, N_max):
    """gamma_sup = max_{2 <= N <= N_max} rho(2N) / rho(N); satisfied iff gamma_sup < 1."""
    N_max = _check_integer(N_max, 'N_max', 2)
    rho = _rho_callable(profile)
    Ns = np.arange(2, N_max + 1)
    lower = np.asarray(rho(Ns), dtype=float)
    upper = np.asarray(rho(2 * Ns), dtype=float)
    for N, value in zip(np.concatenate([Ns, 2 * Ns]), np.concatenate([lower, upper])):
        if value <= 0:
            raise TrigPolynomialError(int(N))
    ratios = upper / lower
    idx = int(np.argmax(ratios))
    gamma_sup = float(ratios[idx])
    return GammaCheck(gamma_sup, gamma_sup < 1.0, int(Ns[idx]))


def _positive_points(trajectory):
    Ns, values = trajectory.positive()
    dropped = len(trajectory) - Ns.size
    if dropped:
        logger.warning(f"Dropped {dropped} nonpositive rho_hat points before the log-linear fit")
    if Ns.size < MIN_LOGLIN_POINTS:
        raise InsufficientDataError(
            f"need at least {MIN_LOGLIN_POINTS} positive rho_hat points, got {Ns.size}")
    return Ns.astype(float), values


def _normal_equations(X, target):
    gram = X.T @ X
    cond = np.linalg.cond(gram)
    if not math.isfinite(cond) or cond > CONDITION_LIMIT:
        raise RankError(f"normal matrix is singular or ill-conditioned (cond={cond:.3g})")
    return linalg.solve(gram, X.T @ target, assume_a='pos')


def loglin_init_power(trajectory):
    """OLS of ln rho_hat on [1, -ln N, ln ln(N+1)]."""
    Ns, values = _positive_points(trajectory)
    X = np.column_stack([np.ones_like(Ns), -np.log(Ns), np.log(np.log(Ns + 1.0))])
    ln_c, alpha, gamma = _normal_equations(X, np.log(values))
    return PowerInit(float(ln_c), float(alpha), float(gamma))


def loglin_init_exp(trajectory):
    """OLS of ln rho_hat on [1, ln N, N]; flags ln q >= 0 as a model mismatch."""
    Ns, values = _positive_points(trajectory)
    X = np.column_stack([np.ones_like(Ns), np.log(Ns), Ns])
    ln_c, kappa, ln_q = _normal_equations(X, np.log(values))
    mismatch = bool(ln_q > -_PARAMETER_FLOOR)
    if mismatch:
        logger.warning(f"Quasi-exponential initializer has ln q = {ln_q:.3g} >= 0; model mismatch")
    return ExpInit(float(ln_c), float(kappa), float(ln_q), mismatch)


class QuasiPowerFamily:
    name = 'quasi-power'

    @staticmethod
    def to_theta(model):
        return np.array([math.log(model.c1), math.log(model.alpha), math.log(model.gamma)])

    @staticmethod
    def to_model(params):
        u, a, g = params
        return QuasiPower(math.exp(u), math.exp(a), math.exp(g))

    @staticmethod
    def values(params, N):
        u, a, g = params
        return np.exp(u - math.exp(a) * np.log(N) + math.exp(g) * np.log(np.log(N + 1.0)))

    @classmethod
    def jacobian(cls, params, N):
        _, a, g = params
        f = cls.values(params, N)
        return np.column_stack([f, -f * math.exp(a) * np.log(N), f * math.exp(g) * np.log(np.log(N + 1.0))])

    @staticmethod
    def at_boundary(model):
        return model.alpha < _BOUNDARY or model.gamma < _BOUNDARY


class QuasiExpFamily:
    name = 'quasi-exp'

    @staticmethod
    def to_theta(model):
        return np.array([math.log(model.c2), model.kappa, math.log(model.q / (1.0 - model.q))])

    @staticmethod
    def to_model(params):
        u, kappa, s = params
        return QuasiExp(math.exp(u), kappa, 1.0 / (1.0 + math.exp(-s)))

    @staticmethod
    def values(params, N):
        u, kappa, s = params
        ln_q = -math.log1p(math.exp(-s))
        return np.exp(u + kappa * np.log(N) + N * ln_q)

    @classmethod
    def jacobian(cls, params, N):
        s = params[2]
        q = 1.0 / (1.0 + math.exp(-s))
        f = cls.values(params, N)
        return np.column_stack([f, f * np.log(N), f * N * (1.0 - q)])

    @staticmethod
    def at_boundary(model):
        return model.q < _BOUNDARY or model.q > 1.0 - _BOUNDARY


def _objective(family, params, N, y, w):
    with np.errstate(over='ignore', invalid='ignore'):
        r = family.values(params, N) - y
    value = float(np.sum(w * r * r))
    return value if math.isfinite(value) else math.inf


def gauss_newton(family, params, N, y, weights=None, max_iterations=MAX_FIT_ITERATIONS):
    """Minimise sum w (f(N; params) - y)^2; returns (params, objective, iterations, gradient norm, status, history)."""
    N = np.asarray(N, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    root_w = np.sqrt(w)
    params = np.asarray(params, dtype=float)
    z = _objective(family, params, N, y, w)
    if not math.isfinite(z):
        raise NumericError("objective is not finite at the initial point")
    history = [z]
    status = 'max-iterations'
    grad_norm = math.inf
    iteration = 0
    for iteration in range(1, max_iterations + 1):
        J = family.jacobian(params, N)
        r = family.values(params, N) - y
        grad_norm = float(np.linalg.norm(2.0 * J.T @ (w * r)))
        if grad_norm <= GRADIENT_TOLERANCE:
            status = 'converged'
            break
        step = -linalg.lstsq(root_w[:, None] * J, root_w * r)[0]
        t = 1.0
        for _ in range(BACKTRACK_STEPS):
            z_new = _objective(family, params + t * step, N, y, w)
            if z_new <= z:
                break
            t *= 0.5
        else:
            status = 'no-descent'
            break
        params = params + t * step
        z = z_new
        history.append(z)
        if np.linalg.norm(t * step) <= STEP_TOLERANCE:
            J = family.jacobian(params, N)
            grad_norm = float(np.linalg.norm(2.0 * J.T @ (w * (family.values(params, N) - y))))
            status = 'converged' if grad_norm <= GRADIENT_TOLERANCE else 'step-tolerance'
            break
    return params, z, iteration, grad_norm, status, tuple(history)


def theta_weights(trajectory, model):
    """1 / Theta(n, N, rho(N))^2 with rho taken from `model`."""
    if trajectory.n is None:
        raise DomainError("theta weighting needs the sample size n on the trajectory")
    rho = np.atleast_1d(model.rho(trajectory.N))
    return np.array([1.0 / theta(trajectory.n, int(N), float(r)) ** 2 for N, r in zip(trajectory.N, rho)])


def _fit(family, trajectory, start, initializer, weighting):
    weights = None
    if weighting == 'theta':
        weights = theta_weights(trajectory, start)
    elif weighting not in (None, 'none'):
        raise DomainError(f"unknown weighting {weighting!r}")
    params, z, iterations, grad_norm, status, history = gauss_newton(
        family, family.to_theta(start), trajectory.N, trajectory.values, weights)
    model = family.to_model(params)
    rss = float(np.sum((model.rho(trajectory.N) - trajectory.values) ** 2))
    converged = status == 'converged'
    if not converged:
        logger.warning(f"{family.name} fit stopped without converging ({status}, |grad|={grad_norm:.3g})")
    return FitResult(model, rss, iterations, converged, initializer, grad_norm,
                     family.at_boundary(model), status, history)


def fit_quasi_power(trajectory, weighting=None):
    """Least-squares fit of c1 N^-alpha ln^gamma(N+1) to the raw trajectory."""
    init = loglin_init_power(trajectory)
    start = QuasiPower(math.exp(init.ln_c), max(init.alpha, _PARAMETER_FLOOR), max(init.gamma, _PARAMETER_FLOOR))
    initializer = {'c1': math.exp(init.ln_c), 'alpha': float(init.alpha), 'gamma': float(init.gamma)}
    return _fit(QuasiPowerFamily, trajectory, start, initializer, weighting)


def fit_quasi_exp(trajectory, weighting=None):
    """Least-squares fit of c2 N^kappa q^N to the raw trajectory."""
    init = loglin_init_exp(trajectory)
    q = min(max(math.exp(init.ln_q), _PARAMETER_FLOOR), 1.0 - _PARAMETER_FLOOR)
    start = QuasiExp(math.exp(init.ln_c), init.kappa, q)
    initializer = {'c2': math.exp(init.ln_c), 'kappa': float(init.kappa), 'q': math.exp(init.ln_q),
                   'mismatch': int(init.mismatch)}
    return _fit(QuasiExpFamily, trajectory, start, initializer, weighting)


FAMILIES = {'quasi-power': fit_quasi_power, 'quasi-exp': fit_quasi_exp}


def fit_family(trajectory, family, weighting=None):
    try:
        fit = FAMILIES[family]
    except KeyError:
        raise DomainError(f"family must be one of {', '.join(FAMILIES)}") from None
    return fit(trajectory, weighting=weighting)


def fitted_curve(result, Ns):
    return np.atleast_1d(result.model.rho(np.asarray(Ns, dtype=float)))
