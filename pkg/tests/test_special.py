import numpy as np
import pytest
from scipy import integrate

from steinlab.special import (GridError, QuadratureError, adaptive_quad,
                              gaussian_abs_moment, hermite_eval, log_derivative_stable,
                              ou_resolvent_time_integral, q_alpha, q_alpha_integral,
                              stable_density_1d, stable_tail_amplitude,
                              upper_incomplete_gamma)


def test_quad_exponential():
    r = adaptive_quad(lambda t: np.exp(-t), 0, np.inf, tol=1e-12)
    assert abs(r.value - 1.0) < 1e-12
    assert r.evaluations > 0 and r.abs_error_estimate >= 0


def test_quad_pi_over_two_anchor():
    r = adaptive_quad(lambda t: np.exp(-t) / np.sqrt(1 - np.exp(-2 * t)), 0, np.inf,
                      tol=1e-12)
    assert abs(r.value - np.pi / 2) < 1e-10


def test_quad_gamma_half_integer():
    # independent oracle: Gamma(3/2) = sqrt(pi)/2 from the half-integer recurrence
    oracle = np.sqrt(np.pi) / 2.0
    r = adaptive_quad(lambda t: t ** 0.5 * np.exp(-t), 0, np.inf, tol=1e-12)
    assert abs(r.value - oracle) < 1e-10


def test_quad_budget_doubling_never_hurts():
    cases = [
        (lambda t: np.exp(-t), 0, np.inf, 1.0),
        (lambda t: np.exp(-t) / np.sqrt(1 - np.exp(-2 * t)), 0, np.inf, np.pi / 2),
        (lambda t: t ** 0.5 * np.exp(-t), 0, np.inf, np.sqrt(np.pi) / 2.0),
    ]
    for f, a, b, oracle in cases:
        e1 = abs(adaptive_quad(f, a, b, tol=1e-12, limit=100).value - oracle)
        e2 = abs(adaptive_quad(f, a, b, tol=1e-12, limit=200).value - oracle)
        assert e2 <= e1 + 1e-14


def test_quad_nonconvergence_raises():
    with pytest.raises(QuadratureError):
        # highly oscillatory integrand with a tiny subdivision budget
        adaptive_quad(lambda t: np.sin(1e6 * t * t), 0, 50.0, tol=1e-14, limit=2)


def test_ou_resolvent_integral():
    assert abs(ou_resolvent_time_integral(0.0).value - np.pi / 2) < 1e-12


def test_gaussian_abs_moment():
    from scipy.special import gamma
    for p in (1.0, 2.0, 3.0, 4.5):
        closed = (2 ** (p / 2) * gamma((p + 1) / 2) / np.sqrt(np.pi)) ** (1 / p)
        assert abs(gaussian_abs_moment(p) - closed) < 1e-10


# ---------------------------------------------------------------------------
# q_alpha
# ---------------------------------------------------------------------------

def _q_int_simpson_oracle(alpha, n=1_000_001):
    """Composite-Simpson oracle on the substituted integrand; the endpoint
    powers are flattened with u = w^alpha (left) and 1-u = w^alpha (right),
    keeping u and 1-u as separate inputs to avoid float cancellation."""
    inv = 1.0 / alpha

    def base(u, omu):
        return (u ** (inv - 1.0) * omu ** (inv - 1.0)
                * (u ** (alpha - 1.0) + omu) ** inv) / alpha

    w = np.linspace(1e-12, 0.5 ** (1 / alpha), n)
    jac = alpha * w ** (alpha - 1.0)
    left = integrate.simpson(base(w ** alpha, 1.0 - w ** alpha) * jac, x=w)
    right = integrate.simpson(base(1.0 - w ** alpha, w ** alpha) * jac, x=w)
    return left + right


def test_q_alpha_value_against_simpson_oracle():
    got = q_alpha_integral(1.5)
    oracle = _q_int_simpson_oracle(1.5)
    assert abs(got - oracle) < 1e-8


def test_q_alpha_near_two_approaches_pi_half():
    assert abs(q_alpha_integral(1.999) - np.pi / 2) < 1e-2


def test_q_alpha_tail_dominant_term():
    assert abs(q_alpha(40.0, 1.5) / np.exp(-40.0) - 1.0) < 1e-10


def test_q_alpha_domain():
    with pytest.raises(ValueError):
        q_alpha_integral(2.0)
    with pytest.raises(ValueError):
        q_alpha_integral(1.0)


def test_q_alpha_monotone_continuity():
    alphas = np.linspace(1.05, 1.95, 20)
    vals = [q_alpha_integral(a) for a in alphas]
    assert np.max(np.abs(np.diff(vals))) < 0.1


# ---------------------------------------------------------------------------
# stable density grid
# ---------------------------------------------------------------------------

def test_density_mass_and_symmetry(density15):
    assert abs(density15.mass() + 2 * stable_tail_amplitude(1.5) / 1.5 * 200.0 ** -1.5
               - 1.0) < 1e-6
    N = len(density15.x)
    p = density15.p
    assert np.max(np.abs(p[1:] - p[1:][::-1])) < 1e-10  # p(x) = p(-x)
    assert np.all(p > 0)


def test_density_center_matches_quadrature(density15):
    oracle = integrate.quad(lambda s: np.exp(-s ** 1.5 / 2) / np.pi, 0, np.inf,
                            epsabs=1e-13, limit=300)[0]
    i0 = len(density15.x) // 2
    assert abs(density15.p[i0] - oracle) < 1e-8


def test_density_derivative_matches_quadrature(density15):
    x0 = 10.0
    i = len(density15.x) // 2 + int(round(x0 / density15.dx))
    oracle = integrate.quad(
        lambda s: -s * np.sin(s * density15.x[i]) * np.exp(-s ** 1.5 / 2) / np.pi,
        0, np.inf, epsabs=1e-13, limit=300)[0]
    assert abs(density15.dp[i] - oracle) < 1e-8


@pytest.mark.parametrize("alpha", [1.3, 1.5])
def test_density_two_sided_tail_bounds(alpha, density15, density13):
    grid = density15 if alpha == 1.5 else density13
    sel = (np.abs(grid.x) >= 10.0) & (np.abs(grid.x) <= 50.0)
    ratio = grid.p[sel] * (1.0 + np.abs(grid.x[sel])) ** (alpha + 1.0)
    assert ratio.min() > 0
    assert ratio.max() / ratio.min() <= 20.0


def test_density_aliasing_check_raises():
    with pytest.raises(GridError):
        stable_density_1d(1.5, n_points=2 ** 8, half_width=5.0)


def test_log_derivative(density15):
    logd = log_derivative_stable(density15)
    assert abs(logd(np.array([0.0]))[0]) < 1e-10  # odd function
    sup = logd.sup_on(-50.0, 50.0)
    assert np.isfinite(sup) and sup < 10.0
    # L2(mu_alpha) norm by the grid trapezoid
    l2 = np.trapezoid(density15.p * (density15.dp / density15.p) ** 2, density15.x)
    assert np.isfinite(l2) and 0 < l2 < 10.0
    # tail asymptote: p'/p ~ -(alpha+1)/x far out
    assert abs(logd(np.array([500.0]))[0] + 2.5 / 500.0) < 1e-6


# ---------------------------------------------------------------------------
# incomplete gamma and Hermite
# ---------------------------------------------------------------------------

def test_upper_incomplete_gamma_closed_forms():
    assert abs(upper_incomplete_gamma(1.0, 1.0) - np.exp(-1.0)) < 1e-14
    assert abs(upper_incomplete_gamma(2.0, 0.0) - 1.0) < 1e-14
    # integration by parts: (x + 1) e^{-x} at a = 2
    assert abs(upper_incomplete_gamma(2.0, 3.0) - 4.0 * np.exp(-3.0)) < 1e-12
    with pytest.raises(ValueError):
        upper_incomplete_gamma(-1.0, 1.0)
    with pytest.raises(ValueError):
        upper_incomplete_gamma(1.0, -0.5)


def test_hermite_closed_form():
    val, grad, eig = hermite_eval((2,), np.array([[2.0]]))
    assert val[0] == pytest.approx(3.0)  # x^2 - 1 at 2
    assert grad[0, 0] == pytest.approx(4.0)  # 2x
    assert eig == 2


def test_hermite_generator_action():
    # (-L) H_k = |k| H_k checked by finite differences of the analytic values
    rng = np.random.default_rng(3)
    pts = rng.uniform(-2, 2, (20, 2))
    k = (2, 1)
    h = 1e-5
    val, grad, eig = hermite_eval(k, pts)
    lap = np.zeros(len(pts))
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        lap += (hermite_eval(k, pts + e)[0] - 2 * val + hermite_eval(k, pts - e)[0]) / h ** 2
    neg_L = np.einsum("ni,ni->n", pts, grad) - lap
    assert eig == 3
    assert np.max(np.abs(neg_L - eig * val)) < 1e-4


def test_hermite_orthogonality_mc():
    from steinlab.measures import Gaussian, sample
    n = 200_000
    X = sample(Gaussian(np.eye(2)), n, 99).data
    h21 = hermite_eval((2, 1), X)[0]
    h12 = hermite_eval((1, 2), X)[0]
    prod = h21 * h12
    assert abs(prod.mean()) < 3 * prod.std() / np.sqrt(n)
    sq = h21 * h21
    # E H_k^2 = k! = 2
    assert abs(sq.mean() - 2.0) < 3 * sq.std() / np.sqrt(n)


def test_hermite_degree_guard():
    with pytest.raises(ValueError):
        hermite_eval((6, 5), np.zeros((1, 2)))


def test_density_csv_export(tmp_path, density15):
    out = tmp_path / "grid.csv"
    density15.to_csv(out)
    head = out.read_text().splitlines()
    assert head[0] == "x,p,dp"
    assert len(head) == len(density15.x) + 1
