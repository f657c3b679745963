"""Domain types: coefficient models, smoothness profiles, data sets and results."""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from smoothcal.errors import DomainError, NumericError


def _frozen_array(values, name):
    arr = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise NumericError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


def _check_integer(value, name, minimum):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


class Problem(str, Enum):
    """The three estimation problems: regression, density and spectral density."""
    A = 'A'
    B = 'B'
    C = 'C'

    @classmethod
    def from_name(cls, name):
        aliases = {'regression': cls.A, 'density': cls.B, 'spectral': cls.C}
        if isinstance(name, cls):
            return name
        key = str(name).strip()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key.upper())
        except ValueError:
            raise DomainError(f"unknown problem {name!r}") from None

    @property
    def label(self):
        return {'A': 'regression', 'B': 'density', 'C': 'spectral'}[self.value]


# --- Parametric smoothness models --- #

class RhoModel:
    """Base class for parametric models of N -> rho(N), N >= 1."""

    family = None

    def rho(self, N):
        """Evaluate the model; accepts scalars or arrays of N >= 1."""
        N_arr = np.asarray(N, dtype=float)
        if np.any(N_arr < 1):
            raise DomainError("rho model is defined for N >= 1")
        out = np.exp(self.log_rho(N_arr))
        return float(out) if out.ndim == 0 else out

    def log_rho(self, N):
        raise NotImplementedError

    def parameters(self):
        raise NotImplementedError


@dataclass(frozen=True)
class QuasiPower(RhoModel):
    """rho(N) = c1 * N**(-alpha) * ln(N+1)**gamma."""
    c1: float
    alpha: float
    gamma: float = 0.0
    family = 'quasi-power'

    def __post_init__(self):
        if not (self.c1 > 0 and math.isfinite(self.c1)):
            raise DomainError(f"c1 must be positive, got {self.c1}")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise DomainError(f"gamma must be nonnegative, got {self.gamma}")

    def log_rho(self, N):
        return math.log(self.c1) - self.alpha * np.log(N) + self.gamma * np.log(np.log(N + 1.0))

    def parameters(self):
        return {'c1': float(self.c1), 'alpha': float(self.alpha), 'gamma': float(self.gamma)}


@dataclass(frozen=True)
class QuasiExp(RhoModel):
    """rho(N) = c2 * N**kappa * q**N."""
    c2: float
    kappa: float
    q: float
    family = 'quasi-exp'

    def __post_init__(self):
        if not (self.c2 > 0 and math.isfinite(self.c2)):
            raise DomainError(f"c2 must be positive, got {self.c2}")
        if not math.isfinite(self.kappa):
            raise DomainError("kappa must be finite")
        if not 0 < self.q < 1:
            raise DomainError(f"q must lie in (0, 1), got {self.q}")

    def log_rho(self, N):
        return math.log(self.c2) + self.kappa * np.log(N) + N * math.log(self.q)

    def parameters(self):
        return {'c2': float(self.c2), 'kappa': float(self.kappa), 'q': float(self.q)}


# --- Fourier-side types --- #

@dataclass(frozen=True, eq=False)
class CoefficientModel:
    """Coefficients c_1..c_K of f in the trigonometric basis, optionally with a rho tail model."""
    coeffs: np.ndarray
    tail_model: Optional[RhoModel] = None

    def __post_init__(self):
        arr = _frozen_array(self.coeffs, 'coefficients')
        if arr.size < 1:
            raise DomainError("a coefficient model needs at least one coefficient")
        object.__setattr__(self, 'coeffs', arr)
        if self.tail_model is not None and not isinstance(self.tail_model, RhoModel):
            raise DomainError("tail_model must be a RhoModel")

    @property
    def K(self):
        return int(self.coeffs.size)

    def truncated(self, N):
        """Keep c_1..c_N and drop any tail model."""
        _check_integer(N, 'N', 1)
        return CoefficientModel(self.coeffs[:N])

    def __repr__(self):
        tail = f", tail={self.tail_model!r}" if self.tail_model is not None else ''
        return f'<CoefficientModel K={self.K}{tail}>'


@dataclass(frozen=True, eq=False)
class SmoothnessProfile:
    """The map N -> rho(N), backed by a vectorised callable on [0, n_max]."""
    func: Callable[[np.ndarray], np.ndarray]
    n_max: Optional[int] = None
    exact: bool = True

    @classmethod
    def from_values(cls, values: Sequence[float], exact=True):
        """Profile with values[N] = rho(N) for N = 0..len(values)-1."""
        arr = _frozen_array(values, 'profile values')
        if arr.size == 0:
            raise DomainError("empty smoothness profile")
        return cls(lambda N: arr[np.asarray(N, dtype=int)], n_max=arr.size - 1, exact=exact)

    @classmethod
    def from_rho_model(cls, model: RhoModel):
        return cls(model.rho)

    def __call__(self, N):
        N_arr = np.asarray(N)
        if N_arr.size and (np.min(N_arr) < 0 or (self.n_max is not None and np.max(N_arr) > self.n_max)):
            raise DomainError(f"profile is defined on [0, {self.n_max}], requested N outside it")
        out = np.asarray(self.func(N_arr), dtype=float)
        return float(out) if out.ndim == 0 else out

    def covers(self, n):
        return self.n_max is None or self.n_max >= n


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a real function on an equispaced grid over [0,1]."""
    samples: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.samples, 'grid samples')
        if arr.size < 2:
            raise DomainError("grid size must be >= 2")
        object.__setattr__(self, 'samples', arr)

    @property
    def size(self):
        return int(self.samples.size)

    @property
    def grid(self):
        return np.linspace(0.0, 1.0, self.size)

    def __call__(self, x):
        return np.interp(x, self.grid, self.samples)


# --- Simulation types --- #

NOISE_KINDS = ('gaussian', 'rademacher', 'uniform')


@dataclass(frozen=True)
class NoiseSpec:
    """Centered noise with standard deviation `scale`."""
    kind: str = 'gaussian'
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise DomainError(f"noise kind must be one of {', '.join(NOISE_KINDS)}, got {self.kind!r}")
        if not (self.scale >= 0 and math.isfinite(self.scale)):
            raise DomainError(f"noise scale must be >= 0, got {self.scale}")

    @property
    def variance(self):
        return self.scale ** 2

    @property
    def strictly_subgaussian(self):
        return self.kind in ('gaussian', 'rademacher')

    def draw(self, rng, n):
        if self.kind == 'gaussian':
            return self.scale * rng.standard_normal(n)
        if self.kind == 'rademacher':
            return self.scale * (2.0 * rng.integers(0, 2, size=n) - 1.0)
        half_width = self.scale * math.sqrt(3.0)
        return rng.uniform(-half_width, half_width, size=n)


@dataclass(frozen=True)
class Seed:
    """64-bit seed; replication r uses SeedSequence(value, spawn_key=(r,))."""
    value: int

    def __post_init__(self):
        _check_integer(self.value, 'seed', 0)
        if self.value >= 2 ** 64:
            raise DomainError("seed must fit in 64 bits")

    def rng(self, replication=0):
        _check_integer(replication, 'replication', 0)
        sequence = np.random.SeedSequence(self.value, spawn_key=(replication,))
        return np.random.Generator(np.random.PCG64(sequence))


@dataclass(frozen=True, eq=False)
class DataSet:
    """Observations for one of the three problems; regression design is x_i = i/n."""
    problem: Problem
    observations: np.ndarray
    design: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, 'problem', Problem.from_name(self.problem))
        arr = _frozen_array(self.observations, 'observations')
        if arr.size < 2:
            raise DomainError("a data set needs n >= 2 observations")
        object.__setattr__(self, 'observations', arr)
        if self.design is not None:
            object.__setattr__(self, 'design', _frozen_array(self.design, 'design'))

    @property
    def n(self):
        return int(self.observations.size)


# --- Estimation types --- #

@dataclass(frozen=True, eq=False)
class EmpiricalCoefficients:
    """Estimates c_hat_1..c_hat_K from a sample of size n. For problem C entry k+1 holds lag k."""
    values: np.ndarray
    n: int
    problem: Problem

    def __post_init__(self):
        object.__setattr__(self, 'problem', Problem.from_name(self.problem))
        arr = _frozen_array(self.values, 'empirical coefficients')
        n = _check_integer(self.n, 'n', 1)
        if arr.size < 1 or arr.size > n:
            raise DomainError(f"need 1 <= K <= n, got K={arr.size}, n={n}")
        object.__setattr__(self, 'values', arr)
        object.__setattr__(self, 'n', n)

    @property
    def K(self):
        return int(self.values.size)

    @property
    def max_N(self):
        return self.K // 2


@dataclass(frozen=True, eq=False)
class RhoHatTrajectory:
    """rho_hat_n(N) for N in a grid; raw values may be negative."""
    N: np.ndarray
    values: np.ndarray
    n: Optional[int] = None
    problem: Optional[Problem] = None

    def __post_init__(self):
        Ns = np.array(self.N, dtype=int).reshape(-1)
        vals = _frozen_array(self.values, 'trajectory values')
        if Ns.size != vals.size:
            raise DomainError("trajectory N and values differ in length")
        if Ns.size and (Ns.min() < 1 or np.any(np.diff(Ns) <= 0)):
            raise DomainError("trajectory N must be strictly increasing and >= 1")
        Ns.setflags(write=False)
        object.__setattr__(self, 'N', Ns)
        object.__setattr__(self, 'values', vals)
        if self.problem is not None:
            object.__setattr__(self, 'problem', Problem.from_name(self.problem))

    def __len__(self):
        return int(self.N.size)

    @property
    def clamped(self):
        return np.maximum(self.values, 0.0)

    def at(self, N):
        idx = np.searchsorted(self.N, N)
        if idx >= self.N.size or self.N[idx] != N:
            raise DomainError(f"N={N} is not on the trajectory grid")
        return float(self.values[idx])

    def positive(self):
        """Points with rho_hat > 0, as (N, values)."""
        keep = self.values > 0
        return self.N[keep], self.values[keep]


# --- Inference and fitting results --- #

@dataclass(frozen=True)
class ConfidenceInterval:
    N: int
    n: int
    level: float
    lower: float
    upper: float
    method: str = 'plug-in'
    empty: bool = False

    def __post_init__(self):
        if self.lower > self.upper:
            raise DomainError("interval lower bound exceeds upper bound")

    @property
    def reported(self):
        """The interval with the lower end clamped at zero."""
        return max(self.lower, 0.0), max(self.upper, 0.0)

    def contains(self, value):
        return self.lower <= value <= self.upper


@dataclass(frozen=True, eq=False)
class ConfidenceRegion:
    a: int
    b: int
    thresholds: np.ndarray
    per_N: np.ndarray
    Q: float
    method: str = 'gaussian'

    @property
    def union_sum(self):
        return float(np.sum(self.per_N))


@dataclass(frozen=True)
class GammaCheck:
    gamma_sup: float
    satisfied: bool
    argmax_N: int


@dataclass(frozen=True, eq=False)
class FitResult:
    """Outcome of a nonlinear least-squares fit of a rho trajectory."""
    model: RhoModel
    rss: float
    iterations: int
    converged: bool
    initializer: dict
    gradient_norm: float = math.nan
    at_boundary: bool = False
    status: str = ''
    history: tuple = field(default_factory=tuple)

    def as_row(self):
        row = {'family': self.model.family}
        row.update(self.model.parameters())
        row.update({
            'rss': float(self.rss),
            'iterations': self.iterations,
            'converged': int(self.converged),
            'at_boundary': int(self.at_boundary),
            'status': self.status,
        })
        row.update({f'init_{k}': v for k, v in self.initializer.items()})
        return row


# --- Experiment configuration --- #

@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """A validated experiment: problem, true model, sizes, level and outputs."""
    problem: Problem
    model: CoefficientModel
    n: int
    K: int
    N_range: tuple
    replications: int = 1
    seed: int = 0
    alpha: float = 0.95
    family: str = 'quasi-power'
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    ci_method: str = 'plug-in'
    output: str = 'results'
    t_grid: tuple = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
    tail_N: int = 8
