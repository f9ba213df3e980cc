"""Closed-form conjugate updates.

Each conditional distribution knows how to (a) push the parent's marginal
forward into the child's marginal, (b) pull a realized child value back into
the parent's posterior, and (c) collapse to a concrete distribution once the
parent has a value.  The registry is exactly: Beta-Bernoulli, scalar
affine-Gaussian, and multivariate affine-Gaussian (with its scalar-projection
special case).
"""

from __future__ import annotations

import numpy as np

from ..dists import Bernoulli, Beta, Gaussian, MvGaussian
from ..errors import NoClosedFormError


class AffineGaussianCond:
    """child | parent ~ N(a * parent + b, var), parent scalar Gaussian."""

    __slots__ = ("a", "b", "var")

    def __init__(self, a, b, var):
        self.a = float(a)
        self.b = float(b)
        self.var = float(var)

    def forward(self, p):
        if not isinstance(p, Gaussian):
            raise NoClosedFormError("affine-Gaussian child of a non-Gaussian parent")
        return Gaussian(self.a * p.mu + self.b, self.a * self.a * p.var + self.var)

    def posterior(self, p, child_value):
        a, b, r = self.a, self.b, self.var
        prec = 1.0 / p.var + a * a / r
        var = 1.0 / prec
        mean = var * (p.mu / p.var + a * (child_value - b) / r)
        return Gaussian(mean, var)

    def at_value(self, parent_value):
        return Gaussian(self.a * parent_value + self.b, self.var)

    def describe(self):
        return f"N({self.a}*parent+{self.b}, {self.var})"


class ScalarMvGaussianCond:
    """child scalar | parent vector ~ N(h . parent + b, var)."""

    __slots__ = ("h", "b", "var")

    def __init__(self, h, b, var):
        self.h = np.asarray(h, dtype=float).reshape(-1)
        self.b = float(b)
        self.var = float(var)

    def forward(self, p):
        if not isinstance(p, MvGaussian):
            raise NoClosedFormError("projection child of a non-Gaussian-vector parent")
        mean = float(self.h @ p.mu + self.b)
        var = float(self.h @ p.cov @ self.h + self.var)
        return Gaussian(mean, var)

    def posterior(self, p, child_value):
        h = self.h
        s = p.cov @ h
        innov_var = float(h @ s + self.var)
        k = s / innov_var
        mean = p.mu + k * (child_value - float(h @ p.mu) - self.b)
        cov = p.cov - np.outer(k, s)
        cov = 0.5 * (cov + cov.T)
        return MvGaussian(mean, cov)

    def at_value(self, parent_value):
        return Gaussian(float(self.h @ np.asarray(parent_value) + self.b), self.var)

    def describe(self):
        return f"N(h.parent+{self.b}, {self.var})"


class MvAffineGaussianCond:
    """child vector | parent vector ~ N(A parent + b, cov)."""

    __slots__ = ("a", "b", "cov")

    def __init__(self, a, b, cov):
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float).reshape(-1)
        self.cov = np.asarray(cov, dtype=float)

    def forward(self, p):
        if not isinstance(p, MvGaussian):
            raise NoClosedFormError("affine-Gaussian child of a non-Gaussian-vector parent")
        mean = self.a @ p.mu + self.b
        cov = self.a @ p.cov @ self.a.T + self.cov
        return MvGaussian(mean, 0.5 * (cov + cov.T))

    def posterior(self, p, child_value):
        a = self.a
        innov = np.asarray(child_value, dtype=float).reshape(-1) - (a @ p.mu + self.b)
        s_cross = p.cov @ a.T
        innov_cov = a @ s_cross + self.cov
        k = np.linalg.solve(innov_cov.T, s_cross.T).T
        mean = p.mu + k @ innov
        cov = p.cov - k @ a @ p.cov
        return MvGaussian(mean, 0.5 * (cov + cov.T))

    def at_value(self, parent_value):
        return MvGaussian(self.a @ np.asarray(parent_value, dtype=float) + self.b, self.cov)

    def describe(self):
        return "N(A.parent+b, cov)"


class BetaBernoulliCond:
    """child bool | parent ~ Bernoulli(parent), parent Beta."""

    __slots__ = ()

    def forward(self, p):
        if not isinstance(p, Beta):
            raise NoClosedFormError("Bernoulli child of a non-Beta parent")
        return Bernoulli(p.a / (p.a + p.b))

    def posterior(self, p, child_value):
        if child_value:
            return Beta(p.a + 1.0, p.b)
        return Beta(p.a, p.b + 1.0)

    def at_value(self, parent_value):
        return Bernoulli(float(parent_value))

    def describe(self):
        return "Bern(parent)"


def child_family(cond):
    """The distribution family of a child once marginalized."""
    if isinstance(cond, (AffineGaussianCond, ScalarMvGaussianCond)):
        return Gaussian
    if isinstance(cond, MvAffineGaussianCond):
        return MvGaussian
    if isinstance(cond, BetaBernoulliCond):
        return Bernoulli
    raise NoClosedFormError(f"unknown conditional {type(cond).__name__}")
