"""Verifier suite: covariance representations, asymmetric covariance
estimates and Lp-Poincare-type inequalities checked on fixed dictionaries
with Monte Carlo error bars, plus a Rayleigh-quotient estimator of the
Poincare functional."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dictionaries import VectorFn
from .functions import SmoothBump, TestFunction
from .measures import (Beta, Gamma, Gaussian, LogConcave, MeasureSpec, Stable,
                       StableRotInv, polar_weight_ratio, sample,
                       sample_interpolation_pair)
from .special import adaptive_quad, gaussian_abs_moment, ou_resolvent_time_integral, q_alpha_integral


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    std_error: float
    equality: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lhs", float(self.lhs))
        object.__setattr__(self, "rhs", float(self.rhs))
        object.__setattr__(self, "std_error", float(self.std_error))
        object.__setattr__(self, "equality", bool(self.equality))

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        # the absolute guard keeps zero-variance equality-saturating checks
        # from failing on float roundoff
        guard = 1e-12 * max(1.0, abs(self.lhs), abs(self.rhs))
        if self.equality:
            return abs(self.margin) <= 4.0 * self.std_error + guard
        return self.lhs <= self.rhs + 4.0 * self.std_error + guard

    def row(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "margin": self.margin, "std_error": self.std_error,
                "pass": self.passed}


@dataclass(frozen=True)
class PoincareEstimate:
    lower_bound: float
    std_error: float
    best_member: str
    analytic_upper: Optional[float] = None


def _pth_norm(values: np.ndarray, p: float) -> tuple[float, float]:
    """(E |v|^p)^(1/p) with a delta-method standard error."""
    a = np.abs(values) ** p
    m = float(np.mean(a))
    se_m = float(np.std(a) / np.sqrt(len(a)))
    if m <= 0:
        return 0.0, 0.0
    return m ** (1.0 / p), se_m / (p * m ** (1.0 - 1.0 / p))


def _gl_nodes_01(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


# ---------------------------------------------------------------------------
# covariance representations
# ---------------------------------------------------------------------------

def verify_cov_representation_gaussian(f, g, Sigma: np.ndarray,
                                       z_nodes: int = 16, mc_budget: int = 100_000,
                                       seed: int = 0,
                                       name: str = "cov_rep_gaussian") -> InequalityReport:
    """Equality check of the Gaussian covariance representation: the covariance
    equals the z-average over the interpolation coupling of
    E <Sigma grad f(X_z) ; grad g(Y_z)>."""
    Sigma = np.atleast_2d(np.asarray(Sigma, dtype=float))
    spec = Gaussian(Sigma)
    X = sample(spec, mc_budget, seed, substream=0).data
    fv = f(X)
    gv = g(X)
    prod = (fv - fv.mean()) * (gv - gv.mean())
    lhs = float(prod.mean())
    se_lhs = float(prod.std() / np.sqrt(mc_budget))

    zs, ws = _gl_nodes_01(z_nodes)
    rhs = 0.0
    var_rhs = 0.0
    for i, (z, w) in enumerate(zip(zs, ws)):
        Xz, Yz = sample_interpolation_pair(spec, float(z), mc_budget, seed, substream=i + 1)
        terms = np.einsum("ni,ni->n", f.grad(Xz.data) @ Sigma.T, g.grad(Yz.data))
        rhs += w * float(terms.mean())
        var_rhs += (w ** 2) * float(terms.var()) / mc_budget
    se = float(np.sqrt(se_lhs ** 2 + var_rhs))
    return InequalityReport(name=name, lhs=lhs, rhs=rhs, std_error=se, equality=True)


def stable_levy_nodes_1d(alpha: float, u_cut: float = 64.0,
                         singular_nodes: int = 16, panel_nodes: int = 16):
    """Quadrature nodes and weights for the 1d stable Levy integral, weights
    already containing c_alpha |u|^(-1-alpha) du.

    The (0, 1] panel uses the substitution u = w^(1/(2-alpha)) which removes
    the u^(1-alpha) endpoint exactly; dyadic panels follow out to u_cut.
    Returns (nodes, weights, tail_mass) for one sign; the caller mirrors.
    """
    c_alpha = 0.25 / polar_weight_ratio(alpha)
    gx, gw = np.polynomial.legendre.leggauss(singular_nodes)
    w01, ww01 = 0.5 * (gx + 1.0), 0.5 * gw
    expo = 1.0 / (2.0 - alpha)
    u_sing = w01 ** expo
    du_dw = expo * w01 ** (expo - 1.0)
    nodes = [u_sing]
    weights = [ww01 * c_alpha * u_sing ** (-1.0 - alpha) * du_dw]
    gx, gw = np.polynomial.legendre.leggauss(panel_nodes)
    lo = 1.0
    while lo < u_cut:
        hi = min(2.0 * lo, u_cut)
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        u = mid + half * gx
        nodes.append(u)
        weights.append(half * gw * c_alpha * u ** (-1.0 - alpha))
        lo = hi
    tail_mass = c_alpha * u_cut ** (-alpha) / alpha
    return np.concatenate(nodes), np.concatenate(weights), tail_mass


def verify_cov_representation_stable_1d(f: SmoothBump, g: SmoothBump, alpha: float,
                                        z_nodes: int = 16, mc_budget: int = 30_000,
                                        quad_tol: float = 1e-9, seed: int = 0,
                                        name: str = "cov_rep_stable") -> InequalityReport:
    """Equality check of the non-local covariance representation for the 1d
    symmetric alpha-stable law: the covariance equals the z-average of
    E integral of Delta_u f(X_z) Delta_u g(Y_z) against the Levy measure.

    The inner integral is evaluated on a fixed node set (singular panel with
    the exact substitution, dyadic panels, and the analytic constant tail
    where both bumps vanish)."""
    spec = StableRotInv(alpha, 1)
    X = sample(spec, mc_budget, seed, substream=0).data
    fv, gv = f(X), g(X)
    prod = (fv - fv.mean()) * (gv - gv.mean())
    lhs = float(prod.mean())
    se_lhs = float(prod.std() / np.sqrt(mc_budget))

    u_nodes, u_weights, tail = stable_levy_nodes_1d(alpha)
    zs, ws = _gl_nodes_01(z_nodes)
    rhs = 0.0
    var_rhs = 0.0
    for i, (z, w) in enumerate(zip(zs, ws)):
        Xz, Yz = sample_interpolation_pair(spec, float(z), mc_budget, seed, substream=i + 1)
        x = Xz.data[:, 0]
        y = Yz.data[:, 0]
        fx = f(x[:, None])
        gy = g(y[:, None])
        acc = np.zeros(mc_budget)
        for sgn in (1.0, -1.0):
            for u, wu in zip(u_nodes, u_weights):
                df = f((x + sgn * u)[:, None]) - fx
                dg = g((y + sgn * u)[:, None]) - gy
                acc += wu * df * dg
        # beyond the cut both shifted bumps vanish: Delta_u f = -f(x)
        acc += 2.0 * tail * fx * gy
        rhs += w * float(acc.mean())
        var_rhs += (w ** 2) * float(acc.var()) / mc_budget
    se = float(np.sqrt(se_lhs ** 2 + var_rhs))
    return InequalityReport(name=name, lhs=lhs, rhs=rhs, std_error=se, equality=True)


# ---------------------------------------------------------------------------
# Lp-Poincare family
# ---------------------------------------------------------------------------

def lp_poincare_gaussian(f, p: float, Sigma: np.ndarray, mc_budget: int = 100_000,
                         seed: int = 0, name: Optional[str] = None) -> InequalityReport:
    """|| f - mean ||_p <= sqrt(p-1) || Sigma^(1/2) grad f ||_p under the
    centered Gaussian with covariance Sigma, p >= 2."""
    if p < 2:
        raise ConfigError("the sharp Lp-Poincare inequality needs p >= 2")
    Sigma = np.atleast_2d(np.asarray(Sigma, dtype=float))
    X = sample(Gaussian(Sigma), mc_budget, seed).data
    fv = f(X)
    lhs, se_l = _pth_norm(fv - fv.mean(), p)
    root = np.linalg.cholesky(Sigma)
    gnorm = np.linalg.norm(f.grad(X) @ root, axis=1)
    rq, se_r = _pth_norm(gnorm, p)
    rhs = np.sqrt(p - 1.0) * rq
    se = float(np.hypot(se_l, np.sqrt(p - 1.0) * se_r))
    return InequalityReport(name=name or f"lp_poincare_p{p}", lhs=lhs, rhs=rhs, std_error=se)


def pisier_check(f, p: float, d: int, mc_budget: int = 100_000, seed: int = 0,
                 name: Optional[str] = None) -> InequalityReport:
    """|| f - mean ||_p <= (pi/2) (E|Z|^p)^(1/p) || grad f ||_p under the
    standard Gaussian, p in (1, inf)."""
    if p <= 1:
        raise ConfigError("need p > 1")
    X = sample(Gaussian(np.eye(d)), mc_budget, seed).data
    fv = f(X)
    lhs, se_l = _pth_norm(fv - fv.mean(), p)
    gnorm = np.linalg.norm(f.grad(X), axis=1)
    gq, se_r = _pth_norm(gnorm, p)
    const = (np.pi / 2.0) * gaussian_abs_moment(p)
    rhs = const * gq
    se = float(np.hypot(se_l, const * se_r))
    return InequalityReport(name=name or f"pisier_p{p}", lhs=lhs, rhs=rhs, std_error=se)


def stable_lp_poincare(f, p: float, p1: float, alpha: float, spec: MeasureSpec,
                       mc_budget: int = 100_000, seed: int = 0,
                       name: Optional[str] = None) -> InequalityReport:
    """|| f - mean ||_p <= (integral q_alpha) (E ||X||^p1)^(1/p1) || grad f ||_p2
    for the nondegenerate symmetric alpha-stable law, 1/p = 1/p1 + 1/p2.

    The heavy-tailed moment uses a median-of-means estimate."""
    if not (1.0 < p1 < alpha):
        raise ConfigError(f"moment guard: need 1 < p1 < alpha, got p1={p1}, alpha={alpha}")
    if not (p < p1):
        raise ConfigError("need p < p1 so that p2 = 1/(1/p - 1/p1) is positive")
    p2 = 1.0 / (1.0 / p - 1.0 / p1)
    X = sample(spec, mc_budget, seed).data
    fv = f(X)
    lhs, se_l = _pth_norm(fv - fv.mean(), p)
    qint = q_alpha_integral(alpha)

    norms = np.linalg.norm(X, axis=1) ** p1
    blocks = np.array_split(norms, 32)
    bm = np.array([b.mean() for b in blocks])
    mom = float(np.median(bm))
    mad = float(np.median(np.abs(bm - mom)))
    se_mom = 1.4826 * mad / np.sqrt(len(blocks))
    mom_root = mom ** (1.0 / p1)
    se_mom_root = se_mom / (p1 * mom ** (1.0 - 1.0 / p1))

    gq, se_g = _pth_norm(np.linalg.norm(f.grad(X), axis=1), p2)
    rhs = qint * mom_root * gq
    se = float(np.hypot(se_l, qint * np.hypot(mom_root * se_g, gq * se_mom_root)))
    return InequalityReport(name=name or f"stable_lp_p{p}", lhs=lhs, rhs=rhs, std_error=se)


def sobolev_type_check(coeffs: Sequence[tuple[float, "TestFunction"]], p: float,
                       lam: float, d: int, mc_budget: int = 100_000, seed: int = 0,
                       name: Optional[str] = None) -> InequalityReport:
    """|| f ||_p <= sqrt(p-1) C(lam, p) (lam || f ||_p + || (-L) f ||_p) for a
    centered Hermite combination f under the standard Gaussian, where the
    generator action is analytic on the Hermite span."""
    if p < 2:
        raise ConfigError("need p >= 2")
    for _, h in coeffs:
        if h.eigenvalue == 0:
            raise ConfigError("Hermite combination must be centered (no constant term)")
    X = sample(Gaussian(np.eye(d)), mc_budget, seed).data
    fv = np.zeros(X.shape[0])
    lv = np.zeros(X.shape[0])
    for c, h in coeffs:
        hv = h(X)
        fv += c * hv
        lv += c * h.eigenvalue * hv
    lhs, se_l = _pth_norm(fv, p)
    ln, se_ln = _pth_norm(lv, p)
    q = p / (p - 1.0)
    C = gaussian_abs_moment(q) * ou_resolvent_time_integral(lam).value
    rhs = np.sqrt(p - 1.0) * C * (lam * lhs + ln)
    se = float(np.hypot((1.0 + np.sqrt(p - 1.0) * C * lam) * se_l,
                        np.sqrt(p - 1.0) * C * se_ln))
    return InequalityReport(name=name or f"sobolev_p{p}_lam{lam}", lhs=lhs, rhs=rhs,
                            std_error=se)


# ---------------------------------------------------------------------------
# asymmetric covariance estimates
# ---------------------------------------------------------------------------

def _cov_and_se(fv, gv):
    prod = (fv - fv.mean()) * (gv - gv.mean())
    return float(prod.mean()), float(prod.std() / np.sqrt(len(prod)))


def nonlocal_gradient_length_1d(f, x: np.ndarray, alpha: float) -> np.ndarray:
    """Gradient length of the 1d stable Dirichlet form,
    (integral |f(x+u) - f(x)|^2 Levy(du))^(1/2), on a batch."""
    u_nodes, u_weights, tail = stable_levy_nodes_1d(alpha)
    x = np.asarray(x, dtype=float).ravel()
    fx = f(x[:, None])
    acc = np.zeros_like(x)
    for sgn in (1.0, -1.0):
        for u, wu in zip(u_nodes, u_weights):
            df = f((x + sgn * u)[:, None]) - fx
            acc += wu * df * df
    acc += 2.0 * tail * fx * fx
    return np.sqrt(np.maximum(acc, 0.0))


def asymmetric_cov_suite(family: str, f, g, p: float, mc_budget: int = 100_000,
                         seed: int = 0, spec: Optional[MeasureSpec] = None,
                         kappa: Optional[float] = None,
                         name: Optional[str] = None) -> InequalityReport:
    """|Cov(f, g)| <= constant * ||grad f||_p ||grad g||_q with the family's
    gradient notion and q = p / (p - 1)."""
    if p <= 1:
        raise ConfigError("need p > 1")
    q = p / (p - 1.0)
    label = name or f"asym_cov_{family}_p{p}"

    if family == "gaussian":
        spec = spec or Gaussian(np.eye(1))
        X = sample(spec, mc_budget, seed).data
        lhs, se_c = _cov_and_se(f(X), g(X))
        a, se_a = _pth_norm(np.linalg.norm(f.grad(X), axis=1), p)
        b, se_b = _pth_norm(np.linalg.norm(g.grad(X), axis=1), q)
        const = 1.0
    elif family == "laguerre":
        if not isinstance(spec, Gamma):
            raise ConfigError("laguerre family needs a Gamma spec")
        X = sample(spec, mc_budget, seed).data
        lhs, se_c = _cov_and_se(f(X), g(X))
        w = np.sqrt(X[:, 0])
        a, se_a = _pth_norm(w * f.grad(X)[:, 0], p)
        b, se_b = _pth_norm(w * g.grad(X)[:, 0], q)
        const = 2.0
    elif family == "jacobi":
        if not isinstance(spec, Beta):
            raise ConfigError("jacobi family needs a Beta spec")
        if kappa is None:
            raise ConfigError("jacobi curvature constant kappa_{a,b} must be supplied")
        X = sample(spec, mc_budget, seed).data
        lhs, se_c = _cov_and_se(f(X), g(X))
        w = np.sqrt(np.maximum(1.0 - X[:, 0] ** 2, 0.0))
        a, se_a = _pth_norm(w * f.grad(X)[:, 0], p)
        b, se_b = _pth_norm(w * g.grad(X)[:, 0], q)
        const = 1.0 / kappa
    elif family == "logconcave":
        if not isinstance(spec, LogConcave):
            raise ConfigError("logconcave family needs a LogConcave spec")
        X = sample(spec, mc_budget, seed).data
        lhs, se_c = _cov_and_se(f(X), g(X))
        a, se_a = _pth_norm(np.linalg.norm(f.grad(X), axis=1), p)
        b, se_b = _pth_norm(np.linalg.norm(g.grad(X), axis=1), q)
        const = 1.0 / spec.kappa
    elif family == "stable_nonlocal":
        if not isinstance(spec, (Stable, StableRotInv)) or spec.d != 1:
            raise ConfigError("stable_nonlocal family needs a 1d stable spec")
        X = sample(spec, mc_budget, seed).data
        lhs, se_c = _cov_and_se(f(X), g(X))
        a, se_a = _pth_norm(nonlocal_gradient_length_1d(f, X[:, 0], spec.alpha), p)
        b, se_b = _pth_norm(nonlocal_gradient_length_1d(g, X[:, 0], spec.alpha), q)
        const = 1.0
    else:
        raise ConfigError(f"unknown family {family!r}")

    rhs = const * a * b
    se = float(np.sqrt(se_c ** 2 + (const * b * se_a) ** 2 + (const * a * se_b) ** 2))
    return InequalityReport(name=label, lhs=abs(lhs), rhs=rhs, std_error=se)


# ---------------------------------------------------------------------------
# Rayleigh quotient estimator of the Poincare functional
# ---------------------------------------------------------------------------

def poincare_rayleigh(spec: MeasureSpec, Sigma: np.ndarray,
                      dictionary: Sequence[VectorFn], mc_budget: int = 100_000,
                      seed: int = 0, n_blocks: int = 32) -> PoincareEstimate:
    """Lower bound on the Poincare functional: the best Rayleigh quotient
    variance-sum / Sigma-weighted Dirichlet energy over the vector dictionary,
    with common random numbers and a block-jackknife error on the best ratio."""
    Sigma = np.atleast_2d(np.asarray(Sigma, dtype=float))
    X = sample(spec, mc_budget, seed).data
    best = -np.inf
    best_name = ""
    best_se = 0.0
    for member in dictionary:
        vals = member(X)
        J = member.jac(X)
        num_samples = np.sum((vals - vals.mean(axis=0)) ** 2, axis=1)
        den_samples = np.einsum("nij,jk,nik->n", J, Sigma, J)
        num = float(num_samples.mean())
        den = float(den_samples.mean())
        if den <= 0:
            continue
        ratio = num / den
        nb = np.array([b.mean() for b in np.array_split(num_samples, n_blocks)])
        db = np.array([b.mean() for b in np.array_split(den_samples, n_blocks)])
        ratios = nb / db
        se = float(ratios.std() / np.sqrt(n_blocks))
        if ratio > best:
            best, best_name, best_se = ratio, member.name, se
    upper = None
    if isinstance(spec, LogConcave):
        upper = 1.0 / spec.kappa
    elif isinstance(spec, Gaussian) and np.allclose(spec.Sigma, Sigma):
        upper = 1.0
    return PoincareEstimate(lower_bound=best, std_error=best_se,
                            best_member=best_name, analytic_upper=upper)


# ---------------------------------------------------------------------------
# weighted exponential inequality
# ---------------------------------------------------------------------------

def exp_weighted_vs_nonlocal(f, df, quad_tol: float = 1e-10,
                             name: str = "exp_weighted") -> InequalityReport:
    """For the standard exponential measure on (0, inf) with Levy density
    e^{-u}/u: the non-local energy is dominated by the weighted local one,
    integral integral |f(x+u)-f(x)|^2 Levy(du) mu(dx) <= integral w f'(w)^2 mu(dw)."""
    def inner(x):
        # integrand ~ u (f')^2 near u = 0: integrable
        r = adaptive_quad(lambda u: (f(x + u) - f(x)) ** 2 * np.exp(-u) / u,
                          0.0, np.inf, tol=quad_tol)
        return r.value

    lhs = adaptive_quad(lambda x: inner(x) * np.exp(-x), 0.0, np.inf,
                        tol=max(quad_tol, 1e-10), limit=400).value
    rhs = adaptive_quad(lambda w: w * df(w) ** 2 * np.exp(-w), 0.0, np.inf,
                        tol=quad_tol).value
    return InequalityReport(name=name, lhs=lhs, rhs=rhs, std_error=0.0)
