"""Named check bundles driven by the command-line runner and the acceptance
tests.  Every bundle is a pure function of (params, seed, budget_scale) and
returns InequalityReport-like rows."""

from __future__ import annotations

import numpy as np

from . import stein as _stein
from .dictionaries import lipschitz_dictionary, scalar_dictionary, vector_dictionary
from .functions import Character, HermiteProduct, SmoothBump
from .inequalities import (InequalityReport, asymmetric_cov_suite,
                           exp_weighted_vs_nonlocal, lp_poincare_gaussian,
                           pisier_check, poincare_rayleigh, sobolev_type_check,
                           stable_lp_poincare, verify_cov_representation_gaussian,
                           verify_cov_representation_stable_1d)
from .measures import (Beta, CenteredExponential, Gamma, Gaussian, LogConcave,
                       StableRotInv, UniformProduct, make_rng)
from .semigroups import bismut_stable_check, gaussian_hessian_bismut, t_family_1d, \
    dual_semigroup_1d, p_t_gridded, _density_cache
from .special import q_alpha_integral
from .stein import solve_stein_equation


def _scaled(budget: int, scale: float) -> int:
    return max(1000, int(budget * scale))


def _sigma_pair():
    return [("I2", np.eye(2)), ("diag41", np.diag([4.0, 1.0]))]


def lp_poincare_default(seed: int, scale: float = 1.0) -> list[InequalityReport]:
    budget = _scaled(100_000, scale)
    out = []
    fdict = scalar_dictionary(2)
    for tag, Sigma in _sigma_pair():
        for p in (2, 3, 4, 6):
            for fn in fdict:
                out.append(lp_poincare_gaussian(
                    fn, p, Sigma, mc_budget=budget, seed=seed,
                    name=f"lp_poincare_{tag}_p{p}_{fn.name}"))
    return out


def pisier_default(seed: int, scale: float = 1.0) -> list[InequalityReport]:
    budget = _scaled(100_000, scale)
    out = []
    fdict = scalar_dictionary(2)
    for p in (1.5, 2, 3):
        for fn in fdict[:8]:
            out.append(pisier_check(fn, p, d=2, mc_budget=budget, seed=seed,
                                    name=f"pisier_p{p}_{fn.name}"))
    return out


def _gaussian_pairs():
    h = [HermiteProduct((1, 0)), HermiteProduct((2, 0)), HermiteProduct((0, 1)),
         HermiteProduct((1, 1)), HermiteProduct((3, 0))]
    b = [SmoothBump(np.zeros(2), 2.0), SmoothBump(np.array([1.0, 0.0]), 1.5)]
    pairs = [(h[0], h[0]), (h[1], h[1]), (h[1], h[4]), (h[0], h[2]), (h[3], h[3]),
             (h[0], b[0]), (b[0], b[0]), (b[0], b[1]), (h[1], b[1]), (h[2], h[3])]
    return pairs


def cov_rep_gaussian_default(seed: int, scale: float = 1.0) -> list[InequalityReport]:
    budget = _scaled(100_000, scale)
    out = []
    for i, (f, g) in enumerate(_gaussian_pairs()):
        out.append(verify_cov_representation_gaussian(
            f, g, np.eye(2), mc_budget=budget, seed=seed + i,
            name=f"cov_rep_gaussian_{i}"))
    return out


def cov_rep_stable_default(seed: int, scale: float = 1.0) -> list[InequalityReport]:
    budget = _scaled(30_000, scale)
    out = []
    pairs = [(SmoothBump(np.zeros(1), 2.0), SmoothBump(np.zeros(1), 2.0)),
             (SmoothBump(np.zeros(1), 2.0), SmoothBump(np.array([1.0]), 1.5))]
    for alpha in (1.3, 1.7):
        for i, (f, g) in enumerate(pairs):
            out.append(verify_cov_representation_stable_1d(
                f, g, alpha, mc_budget=budget, seed=seed + i,
                name=f"cov_rep_stable_a{alpha}_{i}"))
    return out


def sobolev_default(seed: int, scale: float = 1.0) -> list[InequalityReport]:
    budget = _scaled(100_000, scale)
    combos = [
        [(1.0, HermiteProduct((1, 0)))],
        [(1.0, HermiteProduct((2, 0)))],
        [(1.0, HermiteProduct((1, 0))), (0.5, HermiteProduct((0, 2)))],
    ]
    out = []
    for i, combo in enumerate(combos):
        for p in (2, 4):
            for lam in (0.0, 1.0):
                out.append(sobolev_type_check(combo, p, lam, d=2, mc_budget=budget,
                                              seed=seed + i,
                                              name=f"sobolev_{i}_p{p}_lam{lam}"))
    return out


def _logconcave_1d(kappa0: float = 0.5):
    """1d test measure exp(-V), V = kappa0 x^2/2 + (1-kappa0) log cosh x;
    Hess V >= kappa0 so the Sigma-relative constant is kappa0 * variance."""
    def V(x):
        x = np.atleast_2d(x)
        u = x[:, 0]
        return kappa0 * u * u / 2.0 + (1.0 - kappa0) * (np.logaddexp(u, -u) - np.log(2.0))

    from .special import adaptive_quad
    Z = adaptive_quad(lambda u: np.exp(-float(V(np.array([[u]]))[0])), -np.inf, np.inf,
                      tol=1e-12).value
    var = adaptive_quad(lambda u: u * u * np.exp(-float(V(np.array([[u]]))[0])) / Z,
                        -np.inf, np.inf, tol=1e-12).value
    kappa = kappa0 * var  # Hess V >= kappa * Sigma^{-1} with Sigma = var
    return LogConcave(V=V, kappa=kappa, Sigma=np.array([[var]])), var


def asym_cov_default(seed: int, scale: float = 1.0,
                     jacobi_kappa: float = 3.0) -> list[InequalityReport]:
    budget = _scaled(100_000, scale)
    out = []
    d2 = scalar_dictionary(2)
    d1 = scalar_dictionary(1)
    f2, g2 = d2[0], d2[1]
    out.append(asymmetric_cov_suite("gaussian", f2, f2, 2.0, budget, seed,
                                    spec=Gaussian(np.eye(2)), name="asym_gaussian_h1h1"))
    out.append(asymmetric_cov_suite("gaussian", f2, g2, 3.0, budget, seed,
                                    spec=Gaussian(np.eye(2)), name="asym_gaussian_h1h2"))

    lag = Gamma(1.0)
    out.append(asymmetric_cov_suite("laguerre", d1[0], d1[0], 2.0, budget, seed,
                                    spec=lag, name="asym_laguerre_xx"))
    out.append(asymmetric_cov_suite("laguerre", d1[0], d1[1], 2.0, budget, seed,
                                    spec=lag, name="asym_laguerre_xh2"))

    jac = Beta(2.0, 2.0)
    out.append(asymmetric_cov_suite("jacobi", d1[0], d1[0], 2.0, budget, seed,
                                    spec=jac, kappa=jacobi_kappa, name="asym_jacobi_xx"))

    lc, _ = _logconcave_1d()
    out.append(asymmetric_cov_suite("logconcave", d1[0], d1[0], 2.0,
                                    min(budget, 50_000), seed, spec=lc,
                                    name="asym_logconcave_xx"))

    bump = SmoothBump(np.zeros(1), 2.0)
    bump2 = SmoothBump(np.array([0.5]), 1.5)
    st = StableRotInv(1.5, 1)
    out.append(asymmetric_cov_suite("stable_nonlocal", bump, bump, 2.0,
                                    min(budget, 50_000), seed, spec=st,
                                    name="asym_stable_bumpbump"))
    out.append(asymmetric_cov_suite("stable_nonlocal", bump, bump2, 2.0,
                                    min(budget, 50_000), seed, spec=st,
                                    name="asym_stable_bumpshift"))
    return out


def stable_lp_default(seed: int, scale: float = 1.0) -> list[InequalityReport]:
    budget = _scaled(100_000, scale)
    bump = SmoothBump(np.zeros(1), 2.0)
    out = []
    for alpha, p, p1 in ((1.7, 1.2, 1.3), (1.5, 1.1, 1.3), (1.7, 1.25, 1.5)):
        out.append(stable_lp_poincare(bump, p, p1, alpha, StableRotInv(alpha, 1),
                                      mc_budget=budget, seed=seed,
                                      name=f"stable_lp_a{alpha}_p{p}"))
    return out


def exp_weighted_default(seed: int, scale: float = 1.0) -> list[InequalityReport]:
    out = [
        exp_weighted_vs_nonlocal(lambda w: w, lambda w: 1.0, name="exp_weighted_linear"),
        exp_weighted_vs_nonlocal(lambda w: w * w, lambda w: 2.0 * w,
                                 name="exp_weighted_square"),
        exp_weighted_vs_nonlocal(
            np.tanh,
            lambda w: 4.0 * np.exp(-2.0 * abs(w)) / (1.0 + np.exp(-2.0 * abs(w))) ** 2,
            name="exp_weighted_tanh"),
    ]
    # the linear case is an exact equality
    out[0] = InequalityReport(name=out[0].name, lhs=out[0].lhs, rhs=out[0].rhs,
                              std_error=1e-8, equality=True)
    return out


def poincare_rayleigh_default(seed: int, scale: float = 1.0) -> list[InequalityReport]:
    budget = _scaled(100_000, scale)
    out = []
    vdict = vector_dictionary(2)
    est = poincare_rayleigh(Gaussian(np.eye(2)), np.eye(2), vdict, budget, seed)
    out.append(InequalityReport(name="rayleigh_gaussian_vs_rigidity",
                                lhs=est.lower_bound, rhs=1.0,
                                std_error=est.std_error))
    est = poincare_rayleigh(UniformProduct(2), np.eye(2), vdict, budget, seed)
    out.append(InequalityReport(name="rayleigh_uniform_vs_neumann",
                                lhs=est.lower_bound, rhs=12.0 / np.pi ** 2,
                                std_error=est.std_error))
    lc, var = _logconcave_1d()
    est = poincare_rayleigh(lc, lc.Sigma, vector_dictionary(1),
                            min(budget, 50_000), seed)
    out.append(InequalityReport(name="rayleigh_logconcave_vs_brascamp_lieb",
                                lhs=est.lower_bound, rhs=1.0 / lc.kappa,
                                std_error=est.std_error))
    return out


# ---------------------------------------------------------------------------
# stein bundles
# ---------------------------------------------------------------------------

def stein_gaussian_self(seed: int, scale: float = 1.0) -> list[InequalityReport]:
    field = _stein.kernel_for_spec(Gaussian(np.eye(1)))
    rep = _stein.stein_discrepancy(field, Gaussian(np.eye(1)), seed=seed)
    return [InequalityReport(name="stein_gaussian_self_discrepancy",
                             lhs=rep.discrepancy, rhs=0.0, std_error=0.0,
                             equality=True)]


def stein_exponential_product(seed: int, scale: float = 1.0, d: int = 2,
                              n_values=(1, 100)) -> list[InequalityReport]:
    budget = _scaled(100_000, scale)
    field = _stein.product_kernel([_stein.kernel_for_spec(CenteredExponential(1))
                                   for _ in range(d)])
    spec = CenteredExponential(d)
    rep = _stein.stein_discrepancy(field, spec, mc_budget=budget, seed=seed)
    out = [InequalityReport(name=f"stein_exp_product_d{d}_discrepancy",
                            lhs=rep.discrepancy, rhs=float(d), std_error=rep.std_error,
                            equality=True)]
    for n in n_values:
        disc_n, _ = _stein.sum_discrepancy_bound(rep, n, np.eye(d))
        out.append(InequalityReport(name=f"stein_exp_product_d{d}_sum_n{n}",
                                    lhs=disc_n, rhs=rep.discrepancy / n,
                                    std_error=0.0, equality=True))
    return out


def stein_factor_suite(seed: int, scale: float = 1.0, Sigma=None,
                       n_points: int = 100, n_h: int = 20) -> list[InequalityReport]:
    """Monte Carlo sup of ||Hess f_h||_HS and ||grad f_h|| over the certified
    Lipschitz dictionary, against the dimension-free factors."""
    Sigma = np.eye(2) if Sigma is None else np.atleast_2d(Sigma)
    d = Sigma.shape[0]
    budget = _scaled(2_000, scale)
    hdict = lipschitz_dictionary(d)[:n_h]
    pts = make_rng(seed, 7).standard_normal((n_points, d)) @ np.linalg.cholesky(Sigma).T
    op_bound = _stein.op_norm_inv_sqrt(Sigma)

    worst_hs = -np.inf
    worst_hs_se = 0.0
    worst_op_half = -np.inf
    for h in hdict:
        for x in pts[: max(2, n_points // n_h)]:
            hess, se = gaussian_hessian_bismut(h, x, Sigma, mc_budget=budget, seed=seed)
            hs = float(np.linalg.norm(hess))
            if hs > worst_hs:
                worst_hs, worst_hs_se = hs, se
            if h.hess_op is not None and h.hess_op <= 1.0:
                op = float(np.linalg.norm(hess, 2))
                worst_op_half = max(worst_op_half, op)
    out = [InequalityReport(name="stein_factor_hess_hs", lhs=worst_hs, rhs=op_bound,
                            std_error=worst_hs_se)]
    if worst_op_half > -np.inf:
        out.append(InequalityReport(name="stein_factor_hess_op_half",
                                    lhs=worst_op_half, rhs=0.5,
                                    std_error=worst_hs_se))

    worst_grad = -np.inf
    worst_grad_se = 0.0
    grad_budget = _scaled(20_000, scale)
    for h in hdict:
        for x in pts[: max(2, 50 // n_h)]:
            sol = solve_stein_equation(h, x, Sigma, mc_budget=grad_budget, seed=seed)
            gn = float(np.linalg.norm(sol.gradient))
            if gn > worst_grad:
                worst_grad, worst_grad_se = gn, sol.gradient_se
    out.append(InequalityReport(name="stein_factor_grad", lhs=worst_grad, rhs=1.0,
                                std_error=worst_grad_se))
    return out


def stein_gaussian_norm_constant(seed: int, scale: float = 1.0) -> list[InequalityReport]:
    """E || Y / sqrt(2) || under the standard 2d Gaussian equals sqrt(pi)/2."""
    budget = _scaled(1_000_000, scale)
    Y = make_rng(seed, 11).standard_normal((budget, 2))
    vals = np.linalg.norm(Y, axis=1) / np.sqrt(2.0)
    est = float(vals.mean())
    se = float(vals.std() / np.sqrt(budget))
    return [InequalityReport(name="stein_sqrt_pi_over_2_constant", lhs=est,
                             rhs=float(np.sqrt(np.pi) / 2.0), std_error=se,
                             equality=True)]


# ---------------------------------------------------------------------------
# semigroup bundles
# ---------------------------------------------------------------------------

def bismut_characters(seed: int, scale: float = 1.0,
                      alphas=(1.2, 1.5, 1.8), n_triples: int = 30) -> list[InequalityReport]:
    rng = make_rng(seed, 13)
    out = []
    worst = 0.0
    for alpha in alphas:
        spec = StableRotInv(alpha, 1)
        for _ in range(n_triples // len(alphas)):
            xi = rng.uniform(0.2, 3.0, 1) * (rng.integers(0, 2) * 2 - 1)
            t = rng.uniform(0.05, 3.0)
            x = rng.uniform(-3.0, 3.0, 1)
            chk = bismut_stable_check(Character(xi), float(t), x, spec)
            worst = max(worst, chk.gap)
    out.append(InequalityReport(name="bismut_character_max_gap", lhs=worst,
                                rhs=1e-6, std_error=0.0))
    return out


def t_family_properties(seed: int, scale: float = 1.0,
                        alpha: float = 1.5) -> list[InequalityReport]:
    grid = _density_cache(alpha)
    out = []
    fixed = t_family_1d(grid.p, 0.3, alpha, grid)
    out.append(InequalityReport(name="t_family_fixed_point",
                                lhs=float(np.max(np.abs(fixed - grid.p))),
                                rhs=1e-6, std_error=0.0))
    g = np.exp(-((grid.x - 1.0) ** 2))
    a = t_family_1d(g, 0.6, alpha, grid)
    b = t_family_1d(t_family_1d(g, 0.3, alpha, grid), 0.3, alpha, grid)
    out.append(InequalityReport(name="t_family_semigroup",
                                lhs=float(np.max(np.abs(a - b))), rhs=1e-6,
                                std_error=0.0))
    wide = np.exp(-(grid.x / 80.0) ** 8)
    tw = t_family_1d(wide, 0.3, alpha, grid)
    i0 = len(grid.x) // 2
    out.append(InequalityReport(name="t_family_mass_expansion",
                                lhs=float(abs(tw[i0] - np.exp(0.3))), rhs=1e-3,
                                std_error=0.0))
    # duality pairing against the forward semigroup
    fb = SmoothBump(np.zeros(1), 2.0)
    gb = SmoothBump(np.array([0.7]), 1.5)
    fvals = fb(grid.x[:, None])
    gvals = gb(grid.x[:, None])
    t = 0.4
    lhs = np.trapezoid(dual_semigroup_1d(gvals, t, alpha, grid) * fvals * grid.p, grid.x)
    rhs = np.trapezoid(gvals * p_t_gridded(fvals, t, alpha, grid) * grid.p, grid.x)
    out.append(InequalityReport(name="t_family_duality",
                                lhs=float(abs(lhs - rhs)), rhs=1e-5, std_error=0.0))
    return out


def q_alpha_table(seed: int, scale: float = 1.0,
                  alphas=None) -> list[InequalityReport]:
    alphas = alphas or [1.1 + 0.04 * i for i in range(20)]
    vals = [q_alpha_integral(a) for a in alphas]
    jumps = np.abs(np.diff(vals))
    return [InequalityReport(name="q_alpha_monotone_continuity",
                             lhs=float(jumps.max()), rhs=0.1, std_error=0.0)]


VERIFY_BUNDLES = {
    "lp_poincare_default": lp_poincare_default,
    "pisier_default": pisier_default,
    "cov_rep_gaussian_default": cov_rep_gaussian_default,
    "cov_rep_stable_default": cov_rep_stable_default,
    "sobolev_default": sobolev_default,
    "asym_cov_default": asym_cov_default,
    "stable_lp_default": stable_lp_default,
    "exp_weighted_default": exp_weighted_default,
    "poincare_rayleigh_default": poincare_rayleigh_default,
}

STEIN_BUNDLES = {
    "gaussian_self": stein_gaussian_self,
    "exponential_product": stein_exponential_product,
    "stein_factor_suite": stein_factor_suite,
    "gaussian_norm_constant": stein_gaussian_norm_constant,
}

SEMIGROUP_BUNDLES = {
    "bismut_characters": bismut_characters,
    "t_family_properties": t_family_properties,
    "q_alpha_table": q_alpha_table,
}
