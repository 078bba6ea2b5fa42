"""Versioned function dictionaries used by the verifier suites.

All members carry closed-form gradients; Lipschitz and Hessian constants are
certified by construction (unit directions, normalized feature sums), never
by numerical sup-search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

DICT_VERSION = "v1"


@dataclass
class DictFn:
    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    grad_fn: Callable[[np.ndarray], np.ndarray]
    lip: Optional[float] = None       # certified global Lipschitz bound
    hess_op: Optional[float] = None   # certified sup of the Hessian operator norm

    def __call__(self, x):
        return self.fn(np.atleast_2d(x))

    def grad(self, x):
        return self.grad_fn(np.atleast_2d(x))


@dataclass
class VectorFn:
    name: str
    fn: Callable[[np.ndarray], np.ndarray]      # (n, d) -> (n, d)
    jac_fn: Callable[[np.ndarray], np.ndarray]  # (n, d) -> (n, d, d)

    def __call__(self, x):
        return self.fn(np.atleast_2d(x))

    def jac(self, x):
        return self.jac_fn(np.atleast_2d(x))


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def _pad_dir(base, d):
    a = np.zeros(d)
    base = np.asarray(base, dtype=float)
    a[: min(len(base), d)] = base[:d] if len(base) >= d else base
    if np.linalg.norm(a) == 0:
        a[0] = 1.0
    return _unit(a)


# ---------------------------------------------------------------------------
# scalar dictionary
# ---------------------------------------------------------------------------

def _hermite_member(name, k):
    from .functions import HermiteProduct

    h = HermiteProduct(k)
    return DictFn(name, lambda x, h=h: h(x), lambda x, h=h: h.grad(x))


def _bump_member(name, center, width):
    from .functions import SmoothBump

    b = SmoothBump(np.asarray(center, dtype=float), width)
    return DictFn(name, lambda x, b=b: b(x), lambda x, b=b: b.grad(x))


def _ridge(name, a, g, dg, lip=None, hess_op=None):
    a = np.asarray(a, dtype=float)

    def fn(x):
        return g(x @ a)

    def grad(x):
        return dg(x @ a)[:, None] * a[None, :]

    return DictFn(name, fn, grad, lip=lip, hess_op=hess_op)


def scalar_dictionary(d: int) -> list[DictFn]:
    """Twenty scalar test functions with analytic gradients; polynomial
    members have all L^p(gaussian) moments finite."""
    out: list[DictFn] = []
    ks = [tuple([1] + [0] * (d - 1)), tuple([2] + [0] * (d - 1)), tuple([3] + [0] * (d - 1))]
    out.append(_hermite_member("H1_x1", ks[0]))
    out.append(_hermite_member("H2_x1", ks[1]))
    out.append(_hermite_member("H3_x1", ks[2]))
    if d >= 2:
        out.append(_hermite_member("H1_x2", (0, 1) + (0,) * (d - 2)))
        out.append(_hermite_member("H2_x2", (0, 2) + (0,) * (d - 2)))
        out.append(_hermite_member("H1H1", (1, 1) + (0,) * (d - 2)))
    else:
        out.append(_hermite_member("H4_x1", (4,)))
        out.append(_hermite_member("H5_x1", (5,)))
        out.append(_hermite_member("H2H2", (2,)))

    out.append(_bump_member("bump0", np.zeros(d), 2.0))
    out.append(_bump_member("bump_off", _pad_dir([1.0, 0.5], d), 1.5))

    def gauss_fn(x, s=4.0):
        return np.exp(-np.sum(x ** 2, axis=1) / s)

    def gauss_grad(x, s=4.0):
        return (-2.0 / s) * x * gauss_fn(x, s)[:, None]

    out.append(DictFn("radial_gauss", gauss_fn, gauss_grad))

    c = _pad_dir([0.7, -0.4], d)

    def gauss_sh(x):
        return np.exp(-np.sum((x - c) ** 2, axis=1) / 2.0)

    def gauss_sh_grad(x):
        return -(x - c) * gauss_sh(x)[:, None]

    out.append(DictFn("gauss_shifted", gauss_sh, gauss_sh_grad))

    a1 = _pad_dir([1.0, 1.0], d)
    a2 = _pad_dir([1.0, -2.0], d)
    out.append(_ridge("tanh_ridge", a1, np.tanh, lambda u: 1.0 / np.cosh(u) ** 2,
                      lip=1.0, hess_op=4.0 / (3.0 * np.sqrt(3.0))))
    out.append(_ridge("sin_ridge", a2, np.sin, np.cos, lip=1.0, hess_op=1.0))
    out.append(_ridge("cos_ridge", a1, lambda u: np.cos(u + 0.5),
                      lambda u: -np.sin(u + 0.5), lip=1.0, hess_op=1.0))
    out.append(_ridge("logcosh", _pad_dir([1.0], d),
                      lambda u: np.logaddexp(u, -u) - np.log(2.0), np.tanh,
                      lip=1.0, hess_op=1.0))
    out.append(_ridge("linear_diag", a1, lambda u: u, lambda u: np.ones_like(u),
                      lip=1.0, hess_op=0.0))
    out.append(_ridge("sigmoid", a2, lambda u: 1.0 / (1.0 + np.exp(-u)),
                      lambda u: np.exp(-u) / (1.0 + np.exp(-u)) ** 2))

    def cubic_fn(x):
        u = x[:, 0]
        return u ** 3 / (1.0 + u ** 2)

    def cubic_grad(x):
        u = x[:, 0]
        g = np.zeros_like(x)
        g[:, 0] = (3.0 * u ** 2 + u ** 4) / (1.0 + u ** 2) ** 2
        return g

    out.append(DictFn("cubic_rational", cubic_fn, cubic_grad))

    j2 = 1 if d >= 2 else 0

    def clip_fn(x):
        return 2.0 * np.tanh(x[:, j2] / 2.0)

    def clip_grad(x):
        g = np.zeros_like(x)
        g[:, j2] = 1.0 / np.cosh(x[:, j2] / 2.0) ** 2
        return g

    out.append(DictFn("soft_clip", clip_fn, clip_grad, lip=1.0))

    Q = np.eye(d)
    if d >= 2:
        Q[0, 1] = Q[1, 0] = 0.3

    def quad_fn(x):
        return 0.5 * np.einsum("ni,ij,nj->n", x, Q, x)

    def quad_grad(x):
        return x @ Q

    out.append(DictFn("quadratic_form", quad_fn, quad_grad))

    def sinprod_fn(x):
        return np.sin(x[:, 0]) * np.exp(-np.sum(x ** 2, axis=1) / 8.0)

    def sinprod_grad(x):
        e = np.exp(-np.sum(x ** 2, axis=1) / 8.0)
        g = -0.25 * x * (np.sin(x[:, 0]) * e)[:, None]
        g[:, 0] += np.cos(x[:, 0]) * e
        return g

    out.append(DictFn("sin_window", sinprod_fn, sinprod_grad))

    assert len(out) == 20
    return out


# ---------------------------------------------------------------------------
# certified-Lipschitz dictionary
# ---------------------------------------------------------------------------

def lipschitz_dictionary(d: int) -> list[DictFn]:
    """Twenty members with certified Lipschitz constant 1; most also carry a
    certified Hessian operator-norm bound <= 1."""
    out: list[DictFn] = []
    dirs = [_pad_dir(v, d) for v in ([1.0], [0.0, 1.0], [1.0, 1.0], [1.0, -1.0, 0.5])]
    for i, a in enumerate(dirs):
        out.append(_ridge(f"linear_{i}", a, lambda u: u, lambda u: np.ones_like(u),
                          lip=1.0, hess_op=0.0))

    for j in range(2):
        jj = min(j, d - 1)

        def t_fn(x, jj=jj):
            return np.tanh(x[:, jj])

        def t_grad(x, jj=jj):
            g = np.zeros_like(x)
            g[:, jj] = 1.0 / np.cosh(x[:, jj]) ** 2
            return g

        out.append(DictFn(f"tanh_{j}", t_fn, t_grad, lip=1.0,
                          hess_op=4.0 / (3.0 * np.sqrt(3.0))))

    for i, a in enumerate([_pad_dir([1.0], d), _pad_dir([0.6, 0.8], d),
                           _pad_dir([-0.5, 1.0, 0.25], d)]):
        out.append(_ridge(f"sin_{i}", a, np.sin, np.cos, lip=1.0, hess_op=1.0))

    for i, cvec in enumerate([[0.0], [1.0, -1.0], [-0.5, 0.5]]):
        c = np.zeros(d)
        c[: min(len(cvec), d)] = np.asarray(cvec)[:d]

        def n_fn(x, c=c):
            return np.sqrt(1.0 + np.sum((x - c) ** 2, axis=1))

        def n_grad(x, c=c):
            return (x - c) / n_fn(x, c)[:, None]

        out.append(DictFn(f"smooth_norm_{i}", n_fn, n_grad, lip=1.0, hess_op=1.0))

    for i, a in enumerate([_pad_dir([1.0, 0.3], d), _pad_dir([0.2, -1.0], d)]):
        out.append(_ridge(f"logcosh_{i}", a,
                          lambda u: np.logaddexp(u, -u) - np.log(2.0), np.tanh,
                          lip=1.0, hess_op=1.0))

    # random features: sum_k beta_k sin(<w_k, x> + b_k), sum |beta_k| ||w_k|| = 1
    rng = np.random.default_rng(101)
    for i in range(3):
        K = 6
        W = rng.standard_normal((K, d))
        W /= np.maximum(np.linalg.norm(W, axis=1, keepdims=True), 1.0)  # ||w_k|| <= 1
        beta = rng.standard_normal(K)
        phase = rng.uniform(0, 2 * np.pi, K)
        norm = np.sum(np.abs(beta) * np.linalg.norm(W, axis=1))
        beta = beta / norm

        def rf_fn(x, W=W, beta=beta, phase=phase):
            return np.sin(x @ W.T + phase) @ beta

        def rf_grad(x, W=W, beta=beta, phase=phase):
            return (np.cos(x @ W.T + phase) * beta) @ W

        out.append(DictFn(f"ridge_features_{i}", rf_fn, rf_grad, lip=1.0, hess_op=1.0))

    def ctanh_fn(x):
        return 2.0 * np.tanh(x[:, 0] / 2.0)

    def ctanh_grad(x):
        g = np.zeros_like(x)
        g[:, 0] = 1.0 / np.cosh(x[:, 0] / 2.0) ** 2
        return g

    out.append(DictFn("scaled_tanh", ctanh_fn, ctanh_grad, lip=1.0,
                      hess_op=2.0 / (3.0 * np.sqrt(3.0))))

    a = _pad_dir([0.8, 0.6], d)
    out.append(_ridge("arctan", a, np.arctan, lambda u: 1.0 / (1.0 + u * u),
                      lip=1.0, hess_op=3.0 * np.sqrt(3.0) / 8.0))

    u1, u2 = _pad_dir([1.0], d), _pad_dir([0.0, 1.0] if d >= 2 else [1.0], d)

    def softmin_fn(x):
        a_ = x @ u1
        b_ = x @ u2 + 0.5
        return -np.logaddexp(-a_, -b_)

    def softmin_grad(x):
        a_ = x @ u1
        b_ = x @ u2 + 0.5
        p = 1.0 / (1.0 + np.exp(a_ - b_))
        return p[:, None] * u1[None, :] + (1.0 - p)[:, None] * u2[None, :]

    out.append(DictFn("soft_min", softmin_fn, softmin_grad, lip=1.0, hess_op=1.0))

    assert len(out) == 20
    return out


# ---------------------------------------------------------------------------
# vector dictionary
# ---------------------------------------------------------------------------

def vector_dictionary(d: int) -> list[VectorFn]:
    """Twelve vector-valued maps with analytic Jacobians."""
    out: list[VectorFn] = []
    eye = np.eye(d)

    out.append(VectorFn("identity", lambda x: x.copy(),
                        lambda x: np.broadcast_to(eye, (x.shape[0], d, d)).copy()))

    A1 = np.eye(d) + 0.2 * np.triu(np.ones((d, d)), 1)
    out.append(VectorFn("linear_shear", lambda x: x @ A1.T,
                        lambda x: np.broadcast_to(A1, (x.shape[0], d, d)).copy()))

    A2 = np.diag(1.0 + 0.5 * np.arange(d))
    out.append(VectorFn("linear_diag", lambda x: x @ A2.T,
                        lambda x: np.broadcast_to(A2, (x.shape[0], d, d)).copy()))

    w = np.pi / (2.0 * np.sqrt(3.0))  # Neumann eigenprofile of the unit-variance uniform

    def sine_fn(x):
        return np.sin(w * x)

    def sine_jac(x):
        J = np.zeros((x.shape[0], d, d))
        idx = np.arange(d)
        J[:, idx, idx] = w * np.cos(w * x)
        return J

    out.append(VectorFn("sine_profile", sine_fn, sine_jac))

    def tanh_fn(x):
        return np.tanh(x)

    def tanh_jac(x):
        J = np.zeros((x.shape[0], d, d))
        idx = np.arange(d)
        J[:, idx, idx] = 1.0 / np.cosh(x) ** 2
        return J

    out.append(VectorFn("tanh_map", tanh_fn, tanh_jac))

    def h2_fn(x):
        return x ** 2 - 1.0

    def h2_jac(x):
        J = np.zeros((x.shape[0], d, d))
        idx = np.arange(d)
        J[:, idx, idx] = 2.0 * x
        return J

    out.append(VectorFn("hermite2_map", h2_fn, h2_jac))

    def h3_fn(x):
        return x ** 3 - 3.0 * x

    def h3_jac(x):
        J = np.zeros((x.shape[0], d, d))
        idx = np.arange(d)
        J[:, idx, idx] = 3.0 * x ** 2 - 3.0
        return J

    out.append(VectorFn("hermite3_map", h3_fn, h3_jac))

    def radial_fn(x):
        return x * np.exp(-np.sum(x ** 2, axis=1) / 4.0)[:, None]

    def radial_jac(x):
        e = np.exp(-np.sum(x ** 2, axis=1) / 4.0)
        J = np.einsum("n,ij->nij", e, eye) - 0.5 * np.einsum("n,ni,nj->nij", e, x, x)
        return J

    out.append(VectorFn("radial_window", radial_fn, radial_jac))

    b = _pad_dir([1.0, 1.0], d)

    def ridge_fn(x):
        return np.tanh(x @ b)[:, None] * b[None, :]

    def ridge_jac(x):
        s = (1.0 / np.cosh(x @ b) ** 2)
        return np.einsum("n,i,j->nij", s, b, b)

    out.append(VectorFn("ridge_vector", ridge_fn, ridge_jac))

    def swirl_fn(x):
        return np.sin(np.roll(x, 1, axis=1))

    def swirl_jac(x):
        J = np.zeros((x.shape[0], d, d))
        c = np.cos(np.roll(x, 1, axis=1))
        for j in range(d):
            J[:, j, (j - 1) % d] = c[:, j]
        return J

    out.append(VectorFn("swirl", swirl_fn, swirl_jac))

    from .functions import SmoothBump

    bump = SmoothBump(np.zeros(d), 2.5)

    def gradbump_fn(x):
        return bump.grad(x)

    def gradbump_jac(x, h=1e-5):
        # Hessian of the bump by central differences of its analytic gradient
        J = np.zeros((x.shape[0], d, d))
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            J[:, :, j] = (bump.grad(x + e) - bump.grad(x - e)) / (2 * h)
        return J

    out.append(VectorFn("bump_gradient", gradbump_fn, gradbump_jac))

    def cos_fn(x):
        return np.cos(x) - np.broadcast_to(np.exp(-0.5), x.shape)

    def cos_jac(x):
        J = np.zeros((x.shape[0], d, d))
        idx = np.arange(d)
        J[:, idx, idx] = -np.sin(x)
        return J

    out.append(VectorFn("cos_map", cos_fn, cos_jac))

    assert len(out) == 12
    return out
