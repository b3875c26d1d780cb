"""Closed-form convex model functions with exact proximal maps.

Two families, matching the worst-case instances the toolkit certifies:

* ``AffinePlusIndicator(c)``: f(x) = c x + indicator of the nonnegative
  half-line, one-dimensional;
* ``Quadratic(mu)``: f(x) = (mu/2) ||x||^2 in any dimension.

Both expose value, subgradient, conjugate value, and the proximal maps of
f and of f*/lam, so the proximal decomposition identity
prox_{lam f}(z) + lam prox_{f*/lam}(z/lam) = z holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _vec(x):
    return np.atleast_1d(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class AffinePlusIndicator:
    """f(x) = c x + i_{R+}(x) on the real line, with c > 0."""

    c: float

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("slope c must be positive")

    dim = 1

    def value(self, x) -> float:
        x = float(_vec(x)[0])
        if x < -1e-12:
            return np.inf
        return self.c * max(x, 0.0)

    def subgradient(self, x):
        # for x > 0 the subdifferential is {c}; at 0 we return c as well
        x = float(_vec(x)[0])
        if x < -1e-12:
            raise ValueError("subgradient requested outside the domain")
        return np.array([self.c])

    def conjugate(self, v) -> float:
        v = float(_vec(v)[0])
        return 0.0 if v <= self.c + 1e-12 else np.inf

    def prox(self, z, lam: float):
        z = float(_vec(z)[0])
        return np.array([max(z - lam * self.c, 0.0)])

    def conjugate_prox(self, u, lam: float):
        """prox_{f*/lam}(u); the Moreau-complement dual point."""
        u = float(_vec(u)[0])
        return np.array([min(u, self.c)])

    def minimizer(self):
        return np.array([0.0])

    def min_value(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Quadratic:
    """f(x) = (mu/2) ||x||^2 with mu > 0."""

    mu: float

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")

    def value(self, x) -> float:
        x = _vec(x)
        return 0.5 * self.mu * float(np.dot(x, x))

    def subgradient(self, x):
        return self.mu * _vec(x)

    def conjugate(self, v) -> float:
        v = _vec(v)
        return float(np.dot(v, v)) / (2.0 * self.mu)

    def prox(self, z, lam: float):
        return _vec(z) / (1.0 + lam * self.mu)

    def conjugate_prox(self, u, lam: float):
        return _vec(u) * (lam * self.mu) / (1.0 + lam * self.mu)

    def minimizer(self, dim: int = 1):
        return np.zeros(dim)

    def min_value(self) -> float:
        return 0.0


def moreau_residual(fn, z, lam: float) -> float:
    """|| prox_{lam f}(z) + lam prox_{f*/lam}(z/lam) - z ||, which should vanish."""
    z = _vec(z)
    lhs = fn.prox(z, lam) + lam * fn.conjugate_prox(z / lam, lam)
    return float(np.linalg.norm(lhs - z))
