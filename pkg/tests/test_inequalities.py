import numpy as np
import pytest
from scipy import integrate

from steinlab.dictionaries import scalar_dictionary, vector_dictionary
from steinlab.functions import Constant, HermiteProduct, SmoothBump
from steinlab.inequalities import (ConfigError, asymmetric_cov_suite,
                                   exp_weighted_vs_nonlocal, lp_poincare_gaussian,
                                   nonlocal_gradient_length_1d, pisier_check,
                                   poincare_rayleigh, sobolev_type_check,
                                   stable_lp_poincare, stable_levy_nodes_1d,
                                   verify_cov_representation_gaussian,
                                   verify_cov_representation_stable_1d)
from steinlab.measures import (Beta, Gamma, Gaussian, LogConcave, StableRotInv,
                               UniformProduct, polar_weight_ratio)

SEED = 555


# ---------------------------------------------------------------------------
# covariance representations
# ---------------------------------------------------------------------------

def test_cov_rep_gaussian_linear_pair():
    rep = verify_cov_representation_gaussian(
        HermiteProduct((1, 0)), HermiteProduct((1, 0)), np.eye(2),
        mc_budget=50_000, seed=SEED)
    # rhs is exactly 1 at every z node; lhs is the MC variance of H1
    assert rep.rhs == pytest.approx(1.0, abs=1e-12)
    assert rep.passed


def test_cov_rep_gaussian_h2_pair_oracle():
    # Hermite moments oracle: Cov(H2, H2) = 2! = 2
    rep = verify_cov_representation_gaussian(
        HermiteProduct((2, 0)), HermiteProduct((2, 0)), np.eye(2),
        mc_budget=200_000, seed=SEED)
    assert abs(rep.lhs - 2.0) < 4 * rep.std_error + 0.05
    assert abs(rep.rhs - 2.0) < 4 * rep.std_error + 0.05
    assert rep.passed


def test_cov_rep_gaussian_odd_even_orthogonality():
    rep = verify_cov_representation_gaussian(
        HermiteProduct((2, 0)), HermiteProduct((3, 0)), np.eye(2),
        mc_budget=100_000, seed=SEED)
    assert abs(rep.lhs) < 5 * rep.std_error
    assert rep.passed


def test_cov_rep_gaussian_anisotropic():
    rep = verify_cov_representation_gaussian(
        HermiteProduct((1, 1)), HermiteProduct((2, 0)),
        np.array([[2.0, 0.5], [0.5, 1.0]]), mc_budget=150_000, seed=SEED)
    assert rep.passed


def test_levy_nodes_match_adaptive_quad():
    # the fixed node set integrates a difference-kernel product (vanishing
    # quadratically at 0, constant beyond the cut) to quadrature accuracy
    alpha = 1.5
    nodes, weights, tail = stable_levy_nodes_1d(alpha)
    c = 0.25 / polar_weight_ratio(alpha)
    g = lambda u: np.exp(-(u - 0.4) ** 2) - np.exp(-0.16)
    F = lambda u: g(u) * g(u)  # O(u^2) at zero, -> e^{-0.32} at infinity

    got = float(np.sum(weights * F(nodes)))
    want = integrate.quad(lambda u: F(u) * c * u ** (-1 - alpha), 0, 64.0,
                          limit=600, epsabs=1e-13, epsrel=1e-13)[0]
    assert abs(got - want) < 1e-7
    # beyond the cut the kernel is the constant g(inf)^2 = e^{-0.32}
    got_tail = tail * np.exp(-0.32)
    want_tail = integrate.quad(lambda u: np.exp(-0.32) * c * u ** (-1 - alpha),
                               64.0, np.inf)[0]
    assert abs(got_tail - want_tail) < 1e-10


@pytest.mark.parametrize("alpha", [1.3, 1.7])
def test_cov_rep_stable_self_pair(alpha):
    f = SmoothBump(np.zeros(1), 2.0)
    rep = verify_cov_representation_stable_1d(f, f, alpha, mc_budget=30_000,
                                              seed=SEED)
    assert rep.lhs > 0  # a variance
    assert rep.passed, (rep.lhs, rep.rhs, rep.std_error)


def test_cov_rep_stable_constant_g():
    # a zero-amplitude bump is a constant: both sides vanish identically
    f = SmoothBump(np.zeros(1), 2.0)
    rep = verify_cov_representation_stable_1d(f, SmoothBump(np.zeros(1), 2.0, 0.0),
                                              1.5, mc_budget=5_000, seed=SEED)
    assert rep.lhs == 0.0 and rep.rhs == 0.0


def test_cov_rep_stable_bilinearity():
    alpha = 1.5
    f = SmoothBump(np.zeros(1), 2.0)
    g1 = SmoothBump(np.array([0.5]), 1.2)
    g2 = SmoothBump(np.array([-0.7]), 1.0)

    class Sum:
        is_complex = False

        def __init__(self):
            self.center = np.array([0.0])
            self.width = 2.0

        def __call__(self, x):
            return g1(x) + g2(x)

    # rhs is bilinear in (f, g): compare rhs(f, g1+g2) with rhs(f,g1)+rhs(f,g2)
    r1 = verify_cov_representation_stable_1d(f, g1, alpha, mc_budget=20_000, seed=SEED)
    r2 = verify_cov_representation_stable_1d(f, g2, alpha, mc_budget=20_000, seed=SEED)
    r12 = verify_cov_representation_stable_1d(f, Sum(), alpha, mc_budget=20_000, seed=SEED)
    se = np.sqrt(r1.std_error ** 2 + r2.std_error ** 2 + r12.std_error ** 2)
    assert abs(r12.rhs - (r1.rhs + r2.rhs)) < 4 * se


# ---------------------------------------------------------------------------
# Lp-Poincare and relatives
# ---------------------------------------------------------------------------

def test_lp_poincare_equality_witness():
    fdict = scalar_dictionary(2)
    f = next(fn for fn in fdict if fn.name == "H1_x1")
    rep = lp_poincare_gaussian(f, 2, np.eye(2), mc_budget=100_000, seed=SEED)
    assert abs(rep.lhs - rep.rhs) < 4 * rep.std_error
    assert rep.passed


def test_lp_poincare_h2_p4():
    f = next(fn for fn in scalar_dictionary(2) if fn.name == "H2_x1")
    rep = lp_poincare_gaussian(f, 4, np.eye(2), mc_budget=100_000, seed=SEED)
    assert rep.passed


def test_lp_poincare_scaling_margin_ratio():
    # scaling oracle: for f = x1 and Sigma = diag(4, 1) both sides are exactly
    # twice their Sigma = I values, and the margin ratio is
    # sqrt(p-1) / (E|Z|^p)^{1/p} since the gradient is constant
    from steinlab.special import gaussian_abs_moment
    f = next(fn for fn in scalar_dictionary(2) if fn.name == "H1_x1")
    Sigma = np.diag([4.0, 1.0])
    for p in (2, 4):
        rep4 = lp_poincare_gaussian(f, p, Sigma, mc_budget=200_000, seed=SEED)
        rep1 = lp_poincare_gaussian(f, p, np.eye(2), mc_budget=200_000, seed=SEED)
        assert rep4.lhs == pytest.approx(2.0 * rep1.lhs, rel=1e-12)
        assert rep4.rhs == pytest.approx(2.0 * rep1.rhs, rel=1e-12)
        want_ratio = np.sqrt(p - 1.0) / gaussian_abs_moment(p)
        assert rep4.rhs / rep4.lhs == pytest.approx(want_ratio, rel=0.02)
        assert rep4.passed


def test_lp_poincare_rejects_small_p():
    f = scalar_dictionary(2)[0]
    with pytest.raises(ConfigError):
        lp_poincare_gaussian(f, 1.5, np.eye(2))


def test_lp_poincare_margin_monotone_in_p():
    # common random numbers across p
    for fn in scalar_dictionary(2)[:8]:
        margins = [lp_poincare_gaussian(fn, p, np.eye(2), mc_budget=50_000,
                                        seed=SEED).margin for p in (2, 3, 4, 6)]
        assert all(b >= a - 1e-3 for a, b in zip(margins, margins[1:])), fn.name


def test_pisier_h1_margin():
    f = next(fn for fn in scalar_dictionary(2) if fn.name == "H1_x1")
    rep = pisier_check(f, 2, d=2, mc_budget=100_000, seed=SEED)
    assert abs(rep.margin - (np.pi / 2 - 1.0)) < 0.02
    assert rep.passed
    # the Pisier constant is looser than the sharp Lp constant at p = 2
    sharp = lp_poincare_gaussian(f, 2, np.eye(2), mc_budget=100_000, seed=SEED)
    assert rep.rhs > sharp.rhs


def test_pisier_h2_p3():
    f = next(fn for fn in scalar_dictionary(2) if fn.name == "H2_x1")
    rep = pisier_check(f, 3, d=2, mc_budget=100_000, seed=SEED)
    assert rep.passed


def test_stable_lp_poincare_bump():
    f = SmoothBump(np.zeros(1), 2.0)
    rep = stable_lp_poincare(f, 1.2, 1.3, 1.7, StableRotInv(1.7, 1),
                             mc_budget=100_000, seed=SEED)
    assert rep.passed


def test_stable_lp_poincare_constant_lhs_zero():
    f = Constant(2.0)

    class WithGrad(Constant):
        def grad(self, x):
            return np.zeros_like(np.atleast_2d(x))

    rep = stable_lp_poincare(WithGrad(2.0), 1.2, 1.3, 1.7, StableRotInv(1.7, 1),
                             mc_budget=20_000, seed=SEED)
    assert rep.lhs == pytest.approx(0.0, abs=1e-12)
    assert rep.passed


def test_stable_lp_poincare_moment_guard():
    f = SmoothBump(np.zeros(1), 2.0)
    with pytest.raises(ConfigError, match="moment guard"):
        stable_lp_poincare(f, 1.2, 1.9, 1.7, StableRotInv(1.7, 1))


def test_sobolev_type_h1_margin():
    # at lam -> 0 the inequality reduces to the resolvent form with constant
    # (pi/2) sqrt(p-1) gamma_2(q); H1 has eigenvalue 1 so lhs = ||f||_p and
    # rhs = (pi/2) sqrt(p-1) gamma_2(q) ||f||_p
    rep = sobolev_type_check([(1.0, HermiteProduct((1, 0)))], 2, 0.0, d=2,
                             mc_budget=100_000, seed=SEED)
    from steinlab.special import gaussian_abs_moment
    expected_ratio = (np.pi / 2) * gaussian_abs_moment(2.0)
    assert rep.rhs / rep.lhs == pytest.approx(expected_ratio, rel=1e-6)
    assert rep.passed


def test_sobolev_type_h2():
    rep = sobolev_type_check([(1.0, HermiteProduct((2, 0)))], 2, 1.0, d=2,
                             mc_budget=100_000, seed=SEED)
    assert rep.passed


def test_sobolev_constant_at_lam_zero():
    from steinlab.special import gaussian_abs_moment, ou_resolvent_time_integral
    C = gaussian_abs_moment(2.0) * ou_resolvent_time_integral(0.0).value
    assert abs(C - np.pi / 2) < 1e-8  # gamma_2(2) = 1


def test_sobolev_rejects_uncentered():
    with pytest.raises(ConfigError):
        sobolev_type_check([(1.0, HermiteProduct((0, 0)))], 2, 0.0, d=2)


# ---------------------------------------------------------------------------
# asymmetric covariance estimates
# ---------------------------------------------------------------------------

def test_asym_gaussian_equality_case():
    f = next(fn for fn in scalar_dictionary(2) if fn.name == "H1_x1")
    rep = asymmetric_cov_suite("gaussian", f, f, 2.0, mc_budget=100_000,
                               seed=SEED, spec=Gaussian(np.eye(2)))
    assert abs(rep.lhs - 1.0) < 0.02 and abs(rep.rhs - 1.0) < 0.02
    assert rep.passed


def test_asym_laguerre_oracle():
    # gamma moments oracle (shape 1, scale 1): E X = 1, E X^2 = 2 so
    # Var(x) = 1 and || partial_sigma x ||_2^2 = E X = 1, rhs = 2
    f = next(fn for fn in scalar_dictionary(1) if fn.name == "H1_x1")
    rep = asymmetric_cov_suite("laguerre", f, f, 2.0, mc_budget=200_000,
                               seed=SEED, spec=Gamma(1.0))
    assert abs(rep.lhs - 1.0) < 0.03
    assert abs(rep.rhs - 2.0) < 0.03
    assert rep.passed


def test_asym_jacobi_with_supplied_kappa():
    # symmetric Jacobi with a + b = 4 satisfies CD(3, 4): kappa = 3
    f = next(fn for fn in scalar_dictionary(1) if fn.name == "H1_x1")
    rep = asymmetric_cov_suite("jacobi", f, f, 2.0, mc_budget=200_000,
                               seed=SEED, spec=Beta(2.0, 2.0), kappa=3.0)
    # oracle: X = 2 Beta(2,2) - 1: Var = 4 * 4/(16*5) = 0.2; E(1-X^2) = 0.8
    assert abs(rep.lhs - 0.2) < 0.01
    assert abs(rep.rhs - 0.8 / 3.0) < 0.01
    assert rep.passed
    with pytest.raises(ConfigError, match="kappa"):
        asymmetric_cov_suite("jacobi", f, f, 2.0, spec=Beta(2.0, 2.0))


def test_asym_stable_nonlocal():
    f = SmoothBump(np.zeros(1), 2.0)
    g = SmoothBump(np.array([0.5]), 1.5)
    rep = asymmetric_cov_suite("stable_nonlocal", f, g, 2.0, mc_budget=50_000,
                               seed=SEED, spec=StableRotInv(1.5, 1))
    assert rep.passed


def test_nonlocal_gradient_length_scaling():
    # homogeneity oracle: doubling f doubles the gradient length exactly
    f1 = SmoothBump(np.zeros(1), 1.5, amplitude=1.0)
    f2 = SmoothBump(np.zeros(1), 1.5, amplitude=2.0)
    pts = np.linspace(-2, 2, 9)
    v1 = nonlocal_gradient_length_1d(f1, pts, 1.5)
    v2 = nonlocal_gradient_length_1d(f2, pts, 1.5)
    assert np.allclose(v2, 2.0 * v1, rtol=1e-12)
    assert np.all(v1 > 0)


# ---------------------------------------------------------------------------
# Poincare Rayleigh quotients
# ---------------------------------------------------------------------------

def test_rayleigh_gaussian_rigidity():
    est = poincare_rayleigh(Gaussian(np.eye(2)), np.eye(2), vector_dictionary(2),
                            mc_budget=100_000, seed=SEED)
    assert est.analytic_upper == 1.0
    assert abs(est.lower_bound - 1.0) <= 4 * est.std_error + 0.01


def _neumann_constant_oracle(n=4000):
    """Dense-grid diagonalization of -f'' with Neumann conditions on
    [-sqrt(3), sqrt(3)]: the Poincare constant is 1/lambda_1."""
    L = np.sqrt(3.0)
    h = 2 * L / n
    main = np.full(n, 2.0)
    main[0] = main[-1] = 1.0  # Neumann mirror
    A = (np.diag(main) - np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)) / h ** 2
    evals = np.linalg.eigvalsh(A)
    lam1 = evals[1]  # first nonzero eigenvalue
    return 1.0 / lam1


def test_rayleigh_uniform_vs_neumann_oracle():
    oracle = _neumann_constant_oracle()
    assert abs(oracle - 12.0 / np.pi ** 2) < 1e-3
    est = poincare_rayleigh(UniformProduct(2), np.eye(2), vector_dictionary(2),
                            mc_budget=200_000, seed=SEED)
    assert est.best_member == "sine_profile"
    assert abs(est.lower_bound - oracle) <= 4 * est.std_error + 0.02
    assert est.lower_bound <= 12.0 / np.pi ** 2 + 4 * est.std_error


def test_rayleigh_logconcave_brascamp_lieb():
    kappa0 = 0.5

    def V(x):
        u = np.atleast_2d(x)[:, 0]
        return kappa0 * u * u / 2.0 + (1 - kappa0) * (np.logaddexp(u, -u) - np.log(2.0))

    Z = integrate.quad(lambda u: np.exp(-kappa0 * u * u / 2.0
                                        - (1 - kappa0) * (np.logaddexp(u, -u) - np.log(2.0))),
                       -np.inf, np.inf)[0]
    var = integrate.quad(lambda u: u * u * np.exp(-kappa0 * u * u / 2.0
                                                  - (1 - kappa0) * (np.logaddexp(u, -u) - np.log(2.0))),
                         -np.inf, np.inf)[0] / Z
    kappa = kappa0 * var
    spec = LogConcave(V=V, kappa=kappa, Sigma=np.array([[var]]))
    est = poincare_rayleigh(spec, spec.Sigma, vector_dictionary(1),
                            mc_budget=50_000, seed=SEED)
    assert est.analytic_upper == pytest.approx(1.0 / kappa)
    assert est.lower_bound <= est.analytic_upper + 4 * est.std_error


# ---------------------------------------------------------------------------
# exponential weighted inequality
# ---------------------------------------------------------------------------

def test_exp_weighted_equality_linear():
    rep = exp_weighted_vs_nonlocal(lambda w: w, lambda w: 1.0)
    # closed-form oracle: both sides equal 1
    assert abs(rep.lhs - 1.0) < 1e-8
    assert abs(rep.rhs - 1.0) < 1e-10
    assert abs(rep.margin) < 1e-8


def test_exp_weighted_square_strict_margin():
    rep = exp_weighted_vs_nonlocal(lambda w: w * w, lambda w: 2.0 * w)
    # closed-form oracle: lhs = 22, rhs = 24 (gamma integrals by hand)
    assert abs(rep.lhs - 22.0) < 1e-6
    assert abs(rep.rhs - 24.0) < 1e-8
    assert rep.margin > 1.9


def test_cov_rep_residual_budget_scaling():
    # |lhs - rhs| shrinks like 1/sqrt(budget): log-log slope -0.5 +- 0.15
    f = HermiteProduct((2, 0))
    budgets = [10_000, 100_000, 1_000_000]
    mean_resid = []
    for b in budgets:
        resids = []
        for rep_i in range(16):
            rep = verify_cov_representation_gaussian(
                f, f, np.eye(2), z_nodes=8, mc_budget=b, seed=1000 * rep_i + b)
            resids.append(abs(rep.lhs - rep.rhs))
        mean_resid.append(np.mean(resids))
    slope = np.polyfit(np.log(budgets), np.log(mean_resid), 1)[0]
    assert -0.65 < slope < -0.35
