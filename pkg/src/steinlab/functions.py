"""Test functions with analytic gradients, vectorized over sample batches."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .special import hermite_eval


class TestFunction:
    """Callable on batches (n, d) -> (n,); subclasses with analytic gradients
    implement ``grad`` returning (n, d)."""

    is_complex = False
    has_gradient = True

    def __call__(self, x: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def grad(self, x: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError


@dataclass
class Character(TestFunction):
    """x -> exp(i <xi, x>)."""

    xi: np.ndarray
    is_complex = True

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=float).ravel()

    def __call__(self, x):
        x = np.atleast_2d(x)
        return np.exp(1j * x @ self.xi)

    def grad(self, x):
        return 1j * self.xi[None, :] * self(x)[:, None]


@dataclass
class HermiteProduct(TestFunction):
    """Probabilists' Hermite product indexed by a multi-index; eigenfunction
    of the negated Ornstein-Uhlenbeck generator with eigenvalue |k|."""

    k: Sequence[int]

    def __post_init__(self):
        self.k = tuple(int(m) for m in self.k)

    @property
    def eigenvalue(self) -> int:
        return sum(self.k)

    def __call__(self, x):
        return hermite_eval(self.k, x)[0]

    def grad(self, x):
        return hermite_eval(self.k, x)[1]


@dataclass
class SmoothBump(TestFunction):
    """Compactly supported C-infinity bump exp(-w^2 / (w^2 - ||x-c||^2))."""

    center: np.ndarray
    width: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        self.center = np.atleast_1d(np.asarray(self.center, dtype=float))

    @property
    def support_radius(self) -> float:
        return self.width

    def __call__(self, x):
        x = np.atleast_2d(x)
        u = np.sum((x - self.center) ** 2, axis=1)
        w2 = self.width ** 2
        out = np.zeros(x.shape[0])
        inside = u < w2
        out[inside] = self.amplitude * np.exp(1.0 - w2 / (w2 - u[inside]))
        return out

    def grad(self, x):
        x = np.atleast_2d(x)
        diff = x - self.center
        u = np.sum(diff ** 2, axis=1)
        w2 = self.width ** 2
        g = np.zeros_like(x)
        inside = u < w2
        if np.any(inside):
            val = self.amplitude * np.exp(1.0 - w2 / (w2 - u[inside]))
            dval_du = -val * w2 / (w2 - u[inside]) ** 2
            g[inside] = (2.0 * dval_du)[:, None] * diff[inside]
        return g

    def hess(self, x):
        """Analytic Hessian: with phi(u) = -w^2/(w^2-u) and u = ||x-c||^2,
        Hess = 2 phi' b I + 4 (phi'^2 + phi'') b (x-c)(x-c)^T."""
        x = np.atleast_2d(x)
        n, d = x.shape
        diff = x - self.center
        u = np.sum(diff ** 2, axis=1)
        w2 = self.width ** 2
        H = np.zeros((n, d, d))
        inside = u < w2
        if np.any(inside):
            b = self.amplitude * np.exp(1.0 - w2 / (w2 - u[inside]))
            p1 = -w2 / (w2 - u[inside]) ** 2
            p2 = -2.0 * w2 / (w2 - u[inside]) ** 3
            eye = np.eye(d)
            H[inside] = (2.0 * p1 * b)[:, None, None] * eye \
                + (4.0 * (p1 ** 2 + p2) * b)[:, None, None] \
                * np.einsum("ni,nj->nij", diff[inside], diff[inside])
        return H


@dataclass
class Coordinate(TestFunction):
    j: int = 0

    def __call__(self, x):
        return np.atleast_2d(x)[:, self.j].copy()

    def grad(self, x):
        x = np.atleast_2d(x)
        g = np.zeros_like(x)
        g[:, self.j] = 1.0
        return g


@dataclass
class Constant(TestFunction):
    c: float = 1.0

    def __call__(self, x):
        return np.full(np.atleast_2d(x).shape[0], self.c)

    def grad(self, x):
        return np.zeros_like(np.atleast_2d(x))


@dataclass
class UserCallback(TestFunction):
    fn: Callable[[np.ndarray], np.ndarray]
    grad_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    support_radius: Optional[float] = None  # None means unbounded support

    def __post_init__(self):
        self.has_gradient = self.grad_fn is not None

    def __call__(self, x):
        return self.fn(np.atleast_2d(x))

    def grad(self, x):
        if self.grad_fn is None:
            raise ValueError("callback has no analytic gradient")
        return self.grad_fn(np.atleast_2d(x))


def fd_gradient(f: TestFunction, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite differences; used only as a cross-check."""
    x = np.atleast_2d(x).astype(float)
    g = np.zeros(x.shape, dtype=complex if f.is_complex else float)
    for j in range(x.shape[1]):
        e = np.zeros(x.shape[1])
        e[j] = h
        g[:, j] = (f(x + e) - f(x - e)) / (2 * h)
    return g
