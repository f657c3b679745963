"""
Numerical Grand Lebesgue Space (GLS) and B(phi) calculus.

Generating functions psi(p) on [1, b) and Young-Orlicz functions phi(lambda)
on (-lambda0, lambda0) are wrapped in small evaluator classes. Conjugates and
suprema are computed by grid scans refined with bounded Brent steps; values
that the mathematics allows to be infinite come back as math.inf.
"""
import logging
import math

import numpy as np
from scipy import optimize, special

from smoothcal.constants import (CONJUGATE_DOUBLING_CAP, CONJUGATE_GRID_POINTS, CONVEXITY_GRID_POINTS,
                                 GLS_GRID_POINTS, OVERLINE_MAX_TERMS, OVERLINE_RESTARTS, ROSENTHAL_R,
                                 SHARP_DOUBLING_CAP, SHARP_GRID_POINTS)
from smoothcal.errors import DomainError
from smoothcal.models import _check_integer

logger = logging.getLogger(__name__)


def _evaluate(g, x):
    """Evaluate g on an array, falling back to elementwise calls for scalar-only callables."""
    x = np.asarray(x, dtype=float)
    with np.errstate(all='ignore'):
        try:
            values = np.asarray(g(x), dtype=float)
        except (TypeError, ValueError):
            values = np.array([float(g(xi)) for xi in x.reshape(-1)]).reshape(x.shape)
    if values.shape != x.shape:
        values = np.broadcast_to(values, x.shape).copy()
    return values


# --- Evaluator types --- #

class TailBound:
    """Upper bound t -> P(|X| >= t), valid for t >= t_min, clipped to [0, 2]."""

    def __init__(self, func, t_min=0.0, name='tail'):
        self._func = func
        self.t_min = float(t_min)
        self.name = name

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < self.t_min):
            raise DomainError(f"{self.name} bound is valid only for t >= {self.t_min}")
        out = np.clip(_evaluate(self._func, t_arr), 0.0, 2.0)
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return f'<TailBound {self.name} t>={self.t_min}>'


class GeneratingPsi:
    """A GLS generating function psi on [1, b); +inf outside its domain."""

    def __init__(self, func, b=math.inf, support=(), name='psi'):
        if not b > 1:
            raise DomainError(f"psi needs b > 1, got {b}")
        self._func = func
        self.b = float(b)
        self.support = tuple(float(p) for p in support)
        self.name = name

    @classmethod
    def power(cls, exponent=0.5):
        """psi(p) = p**exponent; exponent 1/2 is the subgaussian class."""
        return cls(lambda p: p ** exponent, name=f'p^{exponent:g}')

    @classmethod
    def degenerate(cls, r):
        """psi^(r): finite (= 1) only at p = r, so the norm is the L_r norm."""
        if r < 1:
            raise DomainError("degenerate psi needs r >= 1")
        return cls(lambda p: np.where(p == r, 1.0, np.inf), support=(r,), name=f'psi^({r:g})')

    def __call__(self, p):
        p_arr = np.asarray(p, dtype=float)
        out = np.full(p_arr.shape, np.inf)
        inside = (p_arr >= 1.0) & (p_arr < self.b)
        if np.any(inside):
            out[inside] = _evaluate(self._func, p_arr[inside])
        return float(out) if out.ndim == 0 else out

    def grid(self, points=GLS_GRID_POINTS, p_max=1024.0):
        """Geometric grid on [1, b); for finite b half of it accumulates at b."""
        if math.isfinite(self.b):
            half = points // 2
            mid = 0.5 * (1.0 + self.b)
            lower = np.geomspace(1.0, mid, points - half, endpoint=False)
            upper = self.b - (self.b - mid) * np.geomspace(1.0, 1e-9, half)
            grid = np.concatenate([lower, upper])
        else:
            grid = np.geomspace(1.0, p_max, points)
        extra = [p for p in self.support if 1.0 <= p < self.b]
        return np.unique(np.concatenate([grid, extra]))

    def check(self, points=GLS_GRID_POINTS):
        values = self(self.grid(points))
        finite = values[np.isfinite(values)]
        if finite.size == 0 or np.min(finite) <= 0:
            raise DomainError(f"{self.name}: inf psi must be positive")
        if not self.support and finite.size != values.size:
            raise DomainError(f"{self.name}: psi must be finite inside [1, b)")
        return self

    def __repr__(self):
        return f'<GeneratingPsi {self.name} b={self.b}>'


class YoungOrliczPhi:
    """A B(phi) function on (-lambda0, lambda0); +inf outside. lambda0 = 0 means finite only at 0."""

    def __init__(self, func, lambda0=math.inf, conjugate=None, name='phi', even=True):
        if not lambda0 >= 0:
            raise DomainError(f"lambda0 must be nonnegative, got {lambda0}")
        self._func = func
        self.lambda0 = float(lambda0)
        self._conjugate = conjugate
        self._memo = {}
        self.name = name
        self.even = even

    def __call__(self, lam):
        lam_arr = np.asarray(lam, dtype=float)
        out = np.full(lam_arr.shape, np.inf)
        inside = (np.abs(lam_arr) < self.lambda0) | (lam_arr == 0.0)
        if np.any(inside):
            out[inside] = _evaluate(self._func, lam_arr[inside])
        return float(out) if out.ndim == 0 else out

    def conjugate(self, t):
        """phi*(t) = sup_lambda (lambda t - phi(lambda)), memoised per t."""
        t = float(t)
        if self._conjugate is not None:
            return float(self._conjugate(t))
        if t not in self._memo:
            if self.lambda0 == 0.0:
                self._memo[t] = -float(self(0.0))
            else:
                self._memo[t] = young_fenchel(self, t, domain=(-self.lambda0, self.lambda0))
        return self._memo[t]

    def conjugate_many(self, ts):
        return np.array([self.conjugate(t) for t in np.asarray(ts, dtype=float).reshape(-1)])

    def check(self):
        """Validate evenness, phi(0) = phi'(0) = 0, phi''(0) > 0 and convexity on a grid."""
        L = min(0.99 * self.lambda0, 10.0)
        if L <= 0:
            raise DomainError(f"{self.name}: empty domain")
        grid = np.linspace(-L, L, 201)
        values = self(grid)
        problems = []
        if self.even and np.max(np.abs(values - values[::-1])) > 1e-12 * max(1.0, np.max(np.abs(values))):
            problems.append('not even')
        h = min(1e-4, L / 10)
        at0, plus, minus = self(0.0), self(h), self(-h)
        if abs(at0) > 1e-12:
            problems.append('phi(0) != 0')
        if abs(plus - minus) / (2 * h) > 1e-6:
            problems.append("phi'(0) != 0")
        if not (plus - 2 * at0 + minus) / h ** 2 > 0:
            problems.append("phi''(0) <= 0")
        if np.min(np.diff(values, 2)) < -1e-9 * max(1.0, np.max(np.abs(values))):
            problems.append('not convex')
        if problems:
            raise DomainError(f"{self.name}: {', '.join(problems)}")
        return self

    def __repr__(self):
        return f'<YoungOrliczPhi {self.name} lambda0={self.lambda0}>'


# --- Young-Fenchel transform --- #

def _conjugate_scan(g, v, a, b, points):
    grid = np.linspace(a, b, points)
    values = _evaluate(g, grid)
    with np.errstate(all='ignore'):
        objective = np.where(np.isfinite(values), v * grid - values, -np.inf)
    i = int(np.argmax(objective))
    best = float(objective[i])
    if not math.isfinite(best):
        return best
    left, right = grid[max(i - 1, 0)], grid[min(i + 1, points - 1)]
    if right > left:
        def negated(p):
            value = float(_evaluate(g, np.array([p]))[0])
            return -(v * p - value) if math.isfinite(value) else math.inf

        res = optimize.minimize_scalar(negated, bounds=(left, right), method='bounded',
                                       options={'xatol': 1e-13})
        if math.isfinite(res.fun) and -res.fun > best:
            best = -float(res.fun)
    return best


def young_fenchel(g, v, domain=(-math.inf, math.inf), points=CONJUGATE_GRID_POINTS):
    """g*(v) = sup_{p in domain} (p v - g(p)); math.inf when unbounded."""
    lo, hi = domain
    v = float(v)
    if math.isfinite(lo) and math.isfinite(hi):
        return _conjugate_scan(g, v, lo, hi, points)
    reach = 1.0 + max([abs(v)] + [abs(e) for e in (lo, hi) if math.isfinite(e)])

    def window(B):
        return (lo if math.isfinite(lo) else -B), (hi if math.isfinite(hi) else B)

    previous = _conjugate_scan(g, v, *window(reach), points)
    while True:
        reach *= 2.0
        if reach > CONJUGATE_DOUBLING_CAP:
            return math.inf
        current = _conjugate_scan(g, v, *window(reach), points)
        if current == math.inf:
            return math.inf
        if current <= previous + 1e-12 * max(1.0, abs(previous)):
            return max(current, previous)
        previous = current


# --- Standard functions --- #

def phi2():
    """phi_2(lambda) = lambda^2 / 2, the subgaussian function (self-conjugate)."""
    return YoungOrliczPhi(lambda lam: 0.5 * lam ** 2, conjugate=lambda t: 0.5 * t ** 2, name='phi2')


def upsilon(lam):
    """upsilon(lambda) = -0.5 ln(1 - 2|lambda|) - |lambda|, the log-MGF of Z^2 - 1."""
    a = np.abs(np.asarray(lam, dtype=float))
    if np.any(a >= 0.5):
        raise DomainError("upsilon is infinite for |lambda| >= 1/2 (MGF of Z^2 - 1 diverges)")
    out = -0.5 * np.log1p(-2.0 * a) - a
    return float(out) if out.ndim == 0 else out


def upsilon_conjugate(t):
    """Closed form upsilon*(t) = |t|/2 - 0.5 ln(1 + |t|)."""
    a = abs(t)
    return 0.5 * a - 0.5 * math.log1p(a)


def upsilon_phi():
    return YoungOrliczPhi(upsilon, lambda0=0.5, conjugate=upsilon_conjugate, name='upsilon')


def logcosh_phi():
    """ln cosh(lambda): the exact log-MGF of a Rademacher variable."""
    return YoungOrliczPhi(lambda lam: np.logaddexp(lam, -lam) - math.log(2.0), name='logcosh')


def b_phi_tail(phi, norm_v, t, symmetric=None):
    """
    Tchernov bound on P(|X| > t) for ||X||B(phi) <= v.

    Even phi (or symmetric=True) gives min(2, 2 exp(-phi*(t / v))); otherwise the
    two sides are bounded separately, min(2, exp(-phi*(t / v)) + exp(-phi*(-t / v))).
    """
    if not norm_v > 0:
        raise DomainError("B(phi) norm must be positive")
    if t <= 0:
        return 2.0
    if symmetric is None:
        symmetric = phi.even
    sides = (t, t) if symmetric else (t, -t)
    total = sum(math.exp(-c) if c < math.inf else 0.0 for c in (phi.conjugate(s / norm_v) for s in sides))
    return min(2.0, total)


def b_phi_tail_bound(phi, norm_v=1.0):
    return TailBound(lambda t: np.array([b_phi_tail(phi, norm_v, ti) for ti in np.atleast_1d(t)]).reshape(np.shape(t)),
                     name=f'B({phi.name})')


def combine_max(phi, nu):
    """zeta = max(phi, nu) on the intersection of the two domains."""
    lambda0 = min(phi.lambda0, nu.lambda0)
    if lambda0 <= 0:
        raise DomainError(f"domains of {phi.name} and {nu.name} have empty interior intersection")
    return YoungOrliczPhi(lambda lam: np.maximum(phi(lam), nu(lam)), lambda0=lambda0,
                          name=f'max({phi.name},{nu.name})', even=phi.even and nu.even)


# --- phi_bar: sup over unit-sphere weights --- #

def _restricted(phi, a, sign):
    return lambda s: _evaluate(phi, sign * np.sqrt(np.clip(s, 0.0, None)) * a)


def _sqrt_shape(phi, a, sign):
    """'convex', 'concave' or None for u -> phi(sign sqrt(u) a) on u in [0, 1]."""
    u = np.linspace(0.0, 1.0, CONVEXITY_GRID_POINTS)
    values = _restricted(phi, a, sign)(u)
    if not np.all(np.isfinite(values)):
        return None
    second = np.diff(values, 2)
    tol = 1e-10 * max(1.0, float(np.max(np.abs(values))))
    if np.min(second) >= -tol:
        return 'convex'
    if np.max(second) <= tol:
        return 'concave'
    return None


def _simplex_sup(g, k, rng):
    def total(s):
        return float(np.sum(g(s)))

    best = -math.inf
    constraint = {'type': 'eq', 'fun': lambda s: np.sum(s) - 1.0}
    for _ in range(OVERLINE_RESTARTS):
        res = optimize.minimize(lambda s: -total(s), rng.dirichlet(np.ones(k)), method='SLSQP',
                                bounds=[(0.0, 1.0)] * k, constraints=[constraint])
        s = np.clip(res.x, 0.0, None)
        if s.sum() > 0:
            value = total(s / s.sum())
            if math.isfinite(value):
                best = max(best, value)
    return best


def overline_phi(phi, lam, m_terms):
    """sup of sum_{j<=m} phi(gamma_j lambda) over weights with sum gamma_j^2 = 1.

    Exact when u -> phi(sqrt(u) lambda) is convex (value phi(lambda)) or concave
    (value m phi(lambda / sqrt(m))); otherwise a lower bound from constrained ascent
    over the simplex of gamma_j^2. Weights are nonnegative, so for a function that
    is not even each sign of lambda is treated separately.
    """
    m = _check_integer(m_terms, 'm_terms', 1)
    if m > OVERLINE_MAX_TERMS:
        raise DomainError(f"m_terms must be <= {OVERLINE_MAX_TERMS}")
    lam = float(lam)
    at_lam = float(phi(lam))
    if m == 1 or lam == 0.0:
        return at_lam
    a, sign = abs(lam), math.copysign(1.0, lam)
    shape = _sqrt_shape(phi, a, sign)
    if shape == 'convex':
        return at_lam
    if shape == 'concave':
        return m * float(phi(lam / math.sqrt(m)))
    g = _restricted(phi, a, sign)
    rng = np.random.default_rng(m)
    best = at_lam
    for k in range(2, m + 1):
        equal_split = k * float(phi(lam / math.sqrt(k)))
        if math.isfinite(equal_split):
            best = max(best, equal_split)
        best = max(best, _simplex_sup(g, k, rng))
    return best


def overline_function(phi, m_terms=OVERLINE_MAX_TERMS):
    """phi_bar as a YoungOrliczPhi; returns phi itself in the fixed-point case."""
    m = _check_integer(m_terms, 'm_terms', 1)
    L = phi.lambda0 * (1.0 - 1e-9) if math.isfinite(phi.lambda0) else 64.0
    if L <= 0 or m == 1:
        return phi
    # the shape of w -> phi(sqrt w) on [0, L^2] decides every |lambda| <= L at once
    shapes = {s: _sqrt_shape(phi, L, s) for s in ((1.0,) if phi.even else (1.0, -1.0))}
    if all(shape == 'convex' for shape in shapes.values()):
        return phi

    def evaluate(lams):
        lams = np.atleast_1d(np.asarray(lams, dtype=float))
        out = np.empty(lams.shape)
        for sign, shape in shapes.items():
            if phi.even:
                mask = np.ones(lams.shape, dtype=bool)
            else:
                mask = lams >= 0 if sign > 0 else lams < 0
            if shape == 'convex':
                out[mask] = phi(lams[mask])
            elif shape == 'concave':
                out[mask] = m * phi(lams[mask] / math.sqrt(m))
            else:
                out[mask] = [overline_phi(phi, lam, m) for lam in lams[mask]]
        return out

    return YoungOrliczPhi(evaluate, lambda0=phi.lambda0, name=f'bar({phi.name})', even=phi.even)


# --- phi^(s) and chi --- #

def _sharp_scan(phi, lams, refine=False):
    a = np.abs(np.atleast_1d(np.asarray(lams, dtype=float)))
    out = np.full(a.shape, np.nan)
    pending = np.arange(a.size)
    V = 1.0
    while pending.size:
        v = np.linspace(0.0, V, SHARP_GRID_POINTS)
        H = phi.conjugate_many(np.sqrt(v))
        with np.errstate(all='ignore'):
            objective = np.where(np.isfinite(H), a[pending, None] * v[None, :] - H[None, :], -np.inf)
        idx = np.argmax(objective, axis=1)
        values = objective[np.arange(pending.size), idx]
        at_edge = idx == v.size - 1
        settled = pending[~at_edge]
        out[settled] = values[~at_edge]
        if refine:
            for row, i in zip(np.flatnonzero(~at_edge), idx[~at_edge]):
                if 0 < i < v.size - 1 and math.isfinite(values[row]):
                    lam_abs = a[pending[row]]
                    res = optimize.minimize_scalar(
                        lambda x: -(lam_abs * x - phi.conjugate(math.sqrt(max(x, 0.0)))),
                        bounds=(v[i - 1], v[i + 1]), method='bounded', options={'xatol': 1e-13})
                    if -res.fun > out[pending[row]]:
                        out[pending[row]] = -float(res.fun)
        pending = pending[at_edge]
        V *= 2.0
        if V > SHARP_DOUBLING_CAP:
            out[pending] = np.inf
            break
    return out


def phi_sharp(phi, lam):
    """phi^(s)(lambda) = sup_{v >= 0} (|lambda| v - phi*(sqrt v)); math.inf when divergent."""
    return float(_sharp_scan(phi, [lam], refine=True)[0])


def sharp_domain(phi, upper=1024.0, iterations=48):
    """Largest |lambda| with finite phi^(s), by bisection; math.inf if finite at `upper`."""
    if math.isfinite(phi_sharp(phi, upper)):
        return math.inf
    lo, hi = 0.0, 1.0
    while hi < upper and math.isfinite(phi_sharp(phi, hi)):
        lo, hi = hi, 2.0 * hi
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if math.isfinite(phi_sharp(phi, mid)):
            lo = mid
        else:
            hi = mid
    if lo == 0.0:
        logger.info(f"{phi.name}: sharp transform finite only at 0")
    return lo


def chi(phi, beta_sq, lam, sharp_value=None):
    """chi(lambda) = phi^(s)(lambda) - lambda beta^2."""
    if beta_sq < 0:
        raise DomainError("beta^2 must be nonnegative")
    value = phi_sharp(phi, lam) if sharp_value is None else sharp_value
    return value - lam * beta_sq if math.isfinite(value) else math.inf


def chi_function(phi, beta_sq=1.0):
    """chi[phi] as a YoungOrliczPhi on the detected sharp domain."""
    if beta_sq < 0:
        raise DomainError("beta^2 must be nonnegative")
    lambda0 = sharp_domain(phi)

    def evaluate(lams):
        lams = np.atleast_1d(np.asarray(lams, dtype=float))
        return _sharp_scan(phi, lams) - lams * beta_sq

    return YoungOrliczPhi(evaluate, lambda0=lambda0, name=f'chi[{phi.name}]', even=False)


# --- Grand Lebesgue Spaces --- #

class GlsNorm(float):
    """A GLS norm value (a lower bound of the supremum) with the grid it was read from."""

    def __new__(cls, value, p_at_sup=math.nan, grid_points=0):
        obj = super().__new__(cls, value)
        obj.p_at_sup = p_at_sup
        obj.grid_points = grid_points
        obj.lower_bound = True
        return obj


def _moment_ratio(moment_fn, psi, grid):
    moments = _evaluate(moment_fn, grid)
    psis = psi(grid)
    with np.errstate(all='ignore'):
        ratio = moments / psis
    ratio = np.where(np.isinf(psis) & np.isfinite(moments), 0.0, ratio)
    ratio = np.where(moments == 0.0, 0.0, ratio)
    return np.where(np.isnan(ratio), np.inf, ratio)


def gls_norm(moment_fn, psi, points=GLS_GRID_POINTS, p_max=1024.0, p_cap=2.0 ** 20):
    """sup_p ||f||_p / psi(p) over a geometric grid of [1, b)."""
    grid = psi.grid(points, p_max)
    ratio = _moment_ratio(moment_fn, psi, grid)
    i = int(np.argmax(ratio))
    best = float(ratio[i])
    while not math.isfinite(psi.b) and i == grid.size - 1 and best > 0 and math.isfinite(best):
        p_max *= 2.0
        if p_max > p_cap:
            logger.info(f"GLS norm under {psi.name} grows without bound")
            return GlsNorm(math.inf, math.inf, grid.size)
        grid = psi.grid(points, p_max)
        ratio = _moment_ratio(moment_fn, psi, grid)
        i = int(np.argmax(ratio))
        best = float(ratio[i])
    return GlsNorm(best, float(grid[i]), grid.size)


def normal_moment_norm(p, sigma=1.0):
    """||N(0, sigma^2)||_p = sigma (2^{p/2} Gamma((p+1)/2) / sqrt(pi))^{1/p}."""
    p = np.asarray(p, dtype=float)
    log_moment = 0.5 * p * math.log(2.0) + special.gammaln(0.5 * (p + 1.0)) - 0.5 * math.log(math.pi)
    out = sigma * np.exp(log_moment / p)
    return float(out) if out.ndim == 0 else out


def sample_moment_norm(samples, p):
    """(mean |x|^p)^{1/p}, computed in log space."""
    x = np.abs(np.asarray(samples, dtype=float))
    p = np.asarray(p, dtype=float)
    with np.errstate(divide='ignore'):
        log_x = np.log(x)
    log_mean = special.logsumexp(np.multiply.outer(p, log_x), axis=-1) - math.log(x.size)
    out = np.exp(log_mean / p)
    return float(out) if out.ndim == 0 else out


def tail_from_gls(psi, t):
    """exp(-h*(ln t)) with h(p) = p ln psi(p), for ||X||G(psi) = 1 and t >= e."""
    if t < math.e:
        raise DomainError("GLS tail bound needs t >= e")

    def h(p):
        with np.errstate(all='ignore'):
            return p * np.log(psi(p))

    conj = young_fenchel(h, math.log(t), domain=(1.0, psi.b))
    return math.exp(-conj) if conj < math.inf else 0.0


def psi_power_transform(psi, m):
    """psi^(m)(p) = psi(m p)^m on [1, b/m)."""
    if m < 1:
        raise DomainError("power transform needs m >= 1")
    if m == 1:
        return psi
    if not psi.b / m > 1:
        raise DomainError(f"b/m must exceed 1 (b={psi.b}, m={m})")
    return GeneratingPsi(lambda p: psi(m * p) ** m, b=psi.b / m,
                         support=[p / m for p in psi.support], name=f'{psi.name}^({m:g})')


# --- Rosenthal --- #

def rosenthal_constant(p):
    """R(p) = r p / (e ln p)."""
    if p < 2:
        raise DomainError("Rosenthal bound needs p >= 2")
    return ROSENTHAL_R * p / (math.e * math.log(p))


def rosenthal_bound(p, l2_part, lp_part):
    return rosenthal_constant(p) * max(l2_part, lp_part)


def rosenthal_iid(p, n, l2_norm, lp_norm):
    """Bound on ||sum_{i<=n} xi_i||_p for i.i.d. centered xi."""
    n = _check_integer(n, 'n', 1)
    return rosenthal_bound(p, math.sqrt(n) * l2_norm, n ** (1.0 / p) * lp_norm)


def rosenthal_weighted(p, weights, l2_norm, lp_norm):
    """Bound on ||sum_i q_i eta_i||_p for i.i.d. centered eta."""
    q = np.asarray(weights, dtype=float)
    q_2 = float(np.sqrt(np.sum(q ** 2)))
    q_p = float(np.sum(np.abs(q) ** p) ** (1.0 / p))
    return rosenthal_bound(p, q_2 * l2_norm, q_p * lp_norm)


# --- Tail / moment equivalences --- #

def psi_from_phi(phi):
    """psi_phi(p) = p exp(-beta*(p)/p) with beta(y) = phi(e^y)."""
    y_max = math.log(phi.lambda0) if math.isfinite(phi.lambda0) else math.inf
    memo = {}

    def beta(y):
        with np.errstate(over='ignore'):
            return phi(np.exp(y))

    def psi_value(p):
        if p not in memo:
            conj = young_fenchel(beta, p, domain=(-math.inf, y_max))
            memo[p] = p * math.exp(-conj / p) if conj < math.inf else 0.0
        return memo[p]

    def evaluate(ps):
        return np.array([psi_value(float(p)) for p in np.atleast_1d(ps)])

    return GeneratingPsi(evaluate, name=f'psi[{phi.name}]')


def psi_from_delta(delta):
    """psi_Delta(p) = p exp(-Delta(p)/p)."""
    return GeneratingPsi(lambda p: p * np.exp(-_evaluate(delta, p) / p), name='psi_Delta')


def phi_from_psi_delta(delta):
    """phi_Delta(lambda) = Delta*(|ln|lambda||), Delta* taken over p >= 1.

    phi_Delta(0) is set to 0; for Delta = 0 every other point except |lambda| = 1 is +inf.
    """
    memo = {}

    def value(lam):
        a = abs(lam)
        if a == 0.0:
            return 0.0
        key = abs(math.log(a))
        if key not in memo:
            memo[key] = young_fenchel(delta, key, domain=(1.0, math.inf))
        return memo[key]

    def evaluate(lams):
        return np.array([value(float(lam)) for lam in np.atleast_1d(lams)])

    return YoungOrliczPhi(evaluate, name='phi_Delta')
