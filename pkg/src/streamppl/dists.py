"""Probability distribution values.

Distributions are immutable values with sampling, log-density, exact moments,
and mixture construction.  ``gaussian(m, v)`` takes a *variance*, not a
standard deviation; that convention is used consistently by the language
operators, the conjugacy rules, and the benchmarks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import DensityUnavailableError, StreampplError, UnsupportedMomentError

_LOG_2PI = math.log(2.0 * math.pi)
_WEIGHT_TOL = 1e-9


def _is_discrete_value(v) -> bool:
    return isinstance(v, (bool, np.bool_)) or isinstance(v, (int, np.integer))


def _values_equal(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(a, b)
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(_values_equal(x, y) for x, y in zip(a, b))
    return a == b


def _vadd(a, b):
    if isinstance(a, tuple):
        return tuple(_vadd(x, y) for x, y in zip(a, b))
    return a + b


def _vscale(c, a):
    if isinstance(a, tuple):
        return tuple(_vscale(c, x) for x in a)
    return c * a


def _vzero_like(a):
    if isinstance(a, tuple):
        return tuple(_vzero_like(x) for x in a)
    if isinstance(a, np.ndarray):
        return np.zeros_like(a, dtype=float)
    return 0.0


def _vsquare(a):
    if isinstance(a, tuple):
        return tuple(_vsquare(x) for x in a)
    return a * a


def _as_float(v):
    if isinstance(v, (bool, np.bool_)):
        return 1.0 if v else 0.0
    return float(v)


class Distribution:
    """Base class; concrete families are frozen dataclasses."""

    def has_density(self) -> bool:
        return True

    def draw(self, rng):
        raise NotImplementedError

    def log_pdf(self, v) -> float:
        raise NotImplementedError

    def mean(self):
        raise UnsupportedMomentError(f"mean not defined for {type(self).__name__}")

    def variance(self):
        raise UnsupportedMomentError(f"variance not defined for {type(self).__name__}")


@dataclass(frozen=True)
class Dirac(Distribution):
    value: Any

    def has_density(self) -> bool:
        # Point masses only have a density w.r.t. the counting measure.
        return _is_discrete_value(self.value)

    def draw(self, rng):
        return self.value

    def log_pdf(self, v) -> float:
        if not self.has_density():
            raise DensityUnavailableError("Dirac over a continuous value has no density")
        return 0.0 if _values_equal(v, self.value) else -math.inf

    def mean(self):
        v = self.value
        if isinstance(v, (bool, np.bool_)):
            return 1.0 if v else 0.0
        return v

    def variance(self):
        return _vzero_like(self.mean())


@dataclass(frozen=True)
class Bernoulli(Distribution):
    p: float

    def __post_init__(self):
        if not (-1e-12 <= self.p <= 1.0 + 1e-12):
            raise StreampplError(f"Bernoulli parameter out of range: {self.p}")
        object.__setattr__(self, "p", min(1.0, max(0.0, float(self.p))))

    def draw(self, rng):
        return rng.uniform() < self.p

    def log_pdf(self, v) -> float:
        p = self.p if v else 1.0 - self.p
        return math.log(p) if p > 0.0 else -math.inf

    def mean(self):
        return self.p

    def variance(self):
        return self.p * (1.0 - self.p)


@dataclass(frozen=True)
class Beta(Distribution):
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0.0 or self.b <= 0.0:
            raise StreampplError(f"Beta parameters must be positive: {self.a}, {self.b}")

    def draw(self, rng):
        return float(rng.np_gen().beta(self.a, self.b))

    def log_pdf(self, v) -> float:
        if v <= 0.0 or v >= 1.0:
            if 0.0 <= v <= 1.0:
                # boundary: finite only when the shape allows it
                return -math.inf
            return -math.inf
        a, b = self.a, self.b
        log_norm = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
        return (a - 1.0) * math.log(v) + (b - 1.0) * math.log1p(-v) - log_norm

    def mean(self):
        return self.a / (self.a + self.b)

    def variance(self):
        s = self.a + self.b
        return self.a * self.b / (s * s * (s + 1.0))


@dataclass(frozen=True)
class Gaussian(Distribution):
    mu: float
    var: float

    def __post_init__(self):
        if not self.var > 0.0:
            raise StreampplError(f"Gaussian variance must be positive: {self.var}")

    def draw(self, rng):
        return self.mu + math.sqrt(self.var) * rng.normal()

    def log_pdf(self, v) -> float:
        d = v - self.mu
        return -0.5 * (d * d / self.var + math.log(self.var) + _LOG_2PI)

    def mean(self):
        return self.mu

    def variance(self):
        return self.var


@dataclass(frozen=True)
class MvGaussian(Distribution):
    mu: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape != (mu.size, mu.size):
            raise StreampplError(f"covariance shape {cov.shape} does not match mean {mu.shape}")
        if not np.allclose(cov, cov.T, atol=1e-9):
            raise StreampplError("covariance must be symmetric")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "cov", cov)

    def _chol(self) -> np.ndarray:
        try:
            return np.linalg.cholesky(self.cov)
        except np.linalg.LinAlgError:
            # near-singular covariances get a tiny diagonal jitter
            jitter = 1e-12 * np.eye(self.mu.size)
            return np.linalg.cholesky(self.cov + jitter)

    def draw(self, rng):
        z = np.array([rng.normal() for _ in range(self.mu.size)])
        return self.mu + self._chol() @ z

    def log_pdf(self, v) -> float:
        v = np.asarray(v, dtype=float).reshape(-1)
        chol = self._chol()
        diff = v - self.mu
        y = np.linalg.solve(chol, diff)
        log_det = 2.0 * np.sum(np.log(np.diag(chol)))
        return float(-0.5 * (y @ y + log_det + self.mu.size * _LOG_2PI))

    def mean(self):
        return self.mu

    def variance(self):
        return self.cov


@dataclass(frozen=True)
class Poisson(Distribution):
    rate: float

    def __post_init__(self):
        if self.rate < 0.0:
            raise StreampplError(f"Poisson rate must be nonnegative: {self.rate}")

    def draw(self, rng):
        return int(rng.np_gen().poisson(self.rate))

    def log_pdf(self, v) -> float:
        k = int(v)
        if k < 0:
            return -math.inf
        if self.rate == 0.0:
            return 0.0 if k == 0 else -math.inf
        return k * math.log(self.rate) - self.rate - math.lgamma(k + 1.0)

    def mean(self):
        return self.rate

    def variance(self):
        return self.rate


@dataclass(frozen=True)
class Categorical(Distribution):
    values: tuple
    probs: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if len(probs) != len(self.values):
            raise StreampplError("values/probs length mismatch")
        if any(p < -1e-15 for p in probs):
            raise StreampplError("negative categorical probability")
        total = sum(probs)
        if abs(total - 1.0) > _WEIGHT_TOL:
            raise StreampplError(f"categorical probabilities sum to {total}, not 1")
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "probs", probs)

    def has_density(self) -> bool:
        # mass function over the listed support
        return True

    def draw(self, rng):
        u = rng.uniform()
        acc = 0.0
        for v, p in zip(self.values, self.probs):
            acc += p
            if u < acc:
                return v
        return self.values[-1]

    def log_pdf(self, v) -> float:
        mass = sum(p for val, p in zip(self.values, self.probs) if _values_equal(val, v))
        return math.log(mass) if mass > 0.0 else -math.inf

    def mean(self):
        acc = None
        for v, p in zip(self.values, self.probs):
            term = _vscale(p, _numeric(v))
            acc = term if acc is None else _vadd(acc, term)
        return acc

    def variance(self):
        m = self.mean()
        if isinstance(m, np.ndarray) and m.ndim > 1:
            raise UnsupportedMomentError("variance of a matrix-valued categorical")
        acc = None
        for v, p in zip(self.values, self.probs):
            term = _vscale(p, _vsquare(_numeric(v)))
            acc = term if acc is None else _vadd(acc, term)
        return _vadd(acc, _vscale(-1.0, _vsquare(m)))


@dataclass(frozen=True)
class Mixture(Distribution):
    components: tuple  # of (Distribution, weight), weights normalized

    def __post_init__(self):
        comps = tuple((d, float(w)) for d, w in self.components)
        total = sum(w for _, w in comps)
        if abs(total - 1.0) > _WEIGHT_TOL:
            raise StreampplError(f"mixture weights sum to {total}, not 1")
        object.__setattr__(self, "components", comps)

    def has_density(self) -> bool:
        return all(d.has_density() for d, _ in self.components)

    def draw(self, rng):
        u = rng.uniform()
        acc = 0.0
        for d, w in self.components:
            acc += w
            if u < acc:
                return d.draw(rng)
        return self.components[-1][0].draw(rng)

    def log_pdf(self, v) -> float:
        if not self.has_density():
            raise DensityUnavailableError("mixture contains a density-free component")
        terms = []
        for d, w in self.components:
            if w > 0.0:
                lp = d.log_pdf(v)
                if lp > -math.inf:
                    terms.append(math.log(w) + lp)
        if not terms:
            return -math.inf
        m = max(terms)
        return m + math.log(sum(math.exp(t - m) for t in terms))

    def mean(self):
        acc = None
        for d, w in self.components:
            term = _vscale(w, _numeric_mean(d))
            acc = term if acc is None else _vadd(acc, term)
        return acc

    def variance(self):
        # law of total variance
        m = self.mean()
        acc = None
        for d, w in self.components:
            dm = _numeric_mean(d)
            term = _vscale(w, _vadd(d.variance(), _vsquare(dm)))
            acc = term if acc is None else _vadd(acc, term)
        return _vadd(acc, _vscale(-1.0, _vsquare(m)))


@dataclass(frozen=True)
class TupleDist(Distribution):
    """Pair/tuple of distributions, independent given the particle.

    Used when a model emits a tuple result: moments distribute componentwise
    and there is no joint density.
    """

    components: tuple

    def has_density(self) -> bool:
        return False

    def draw(self, rng):
        return tuple(d.draw(rng) for d in self.components)

    def log_pdf(self, v) -> float:
        raise DensityUnavailableError("tuple-valued distribution has no joint density")

    def mean(self):
        return tuple(_numeric_mean(d) for d in self.components)

    def variance(self):
        return tuple(d.variance() for d in self.components)


def _numeric(v):
    if isinstance(v, (bool, np.bool_)):
        return 1.0 if v else 0.0
    if isinstance(v, tuple):
        return tuple(_numeric(x) for x in v)
    return v


def _numeric_mean(d: Distribution):
    return _numeric(d.mean())


def mixture(components: Sequence[tuple]) -> Distribution:
    """Normalize (distribution, weight) pairs into a Mixture.

    Zero-weight components are dropped and a single surviving component
    collapses to itself.
    """
    comps = [(d, float(w)) for d, w in components]
    if any(w < 0.0 for _, w in comps):
        raise StreampplError("mixture weights must be nonnegative")
    total = sum(w for _, w in comps)
    if total <= 0.0:
        raise StreampplError("mixture weights are all zero")
    comps = [(d, w / total) for d, w in comps if w > 0.0]
    if len(comps) == 1:
        return comps[0][0]
    return Mixture(tuple(comps))


# Functional aliases mirroring the operation names used elsewhere.

def draw(d: Distribution, rng):
    return d.draw(rng)


def log_pdf(d: Distribution, v) -> float:
    if not d.has_density():
        raise DensityUnavailableError(f"{type(d).__name__} has no density")
    return d.log_pdf(v)


def mean(d: Distribution):
    return d.mean()


def variance(d: Distribution):
    return d.variance()


def has_density(d: Distribution) -> bool:
    return d.has_density()
