"""Acceptance gate: each criterion runs at its stated tolerance and prints
one pass/fail line.  Run with `pytest tests/test_acceptance.py -v -s`."""

import numpy as np
import pytest

from steinlab.clt import ExperimentConfig, run_clt_experiment
from steinlab.dictionaries import lipschitz_dictionary, scalar_dictionary
from steinlab.functions import SmoothBump
from steinlab.inequalities import lp_poincare_gaussian
from steinlab.measures import Gaussian, UniformProduct, make_rng, sample
from steinlab.semigroups import gaussian_hessian_bismut, t_family_1d, dual_semigroup_1d, \
    p_t_gridded
from steinlab.special import adaptive_quad
from steinlab.stein import (F_delta, f_delta, kernel_1d_from_density, kernel_for_spec,
                            solve_stein_equation)
from steinlab.suites import (bismut_characters, cov_rep_gaussian_default,
                             cov_rep_stable_default)
from steinlab.transport import (EmpiricalPair, w1_dual_lower_bound, w1_exact_1d,
                                w1_exact_assignment, w1_sinkhorn)

SEED = 20_240


def _report(num, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_01_quadrature_anchor():
    r = adaptive_quad(lambda t: np.exp(-t) / np.sqrt(1 - np.exp(-2 * t)),
                      0.0, np.inf, tol=1e-12)
    err = abs(r.value - np.pi / 2)
    _report(1, err < 1e-10, f"pi/2 anchor error {err:.3e} (< 1e-10)")


def test_criterion_02_gaussian_lp_poincare():
    budget = 100_000
    fdict = scalar_dictionary(2)
    worst = None
    for Sigma in (np.eye(2), np.diag([4.0, 1.0])):
        for p in (2, 3, 4, 6):
            for fn in fdict:
                rep = lp_poincare_gaussian(fn, p, Sigma, mc_budget=budget, seed=SEED)
                slack = rep.margin + 4 * rep.std_error
                if worst is None or slack < worst[0]:
                    worst = (slack, fn.name, p)
                assert rep.passed, (fn.name, p, Sigma, rep.lhs, rep.rhs)
    # equality witness: f = x1 at p = 2 saturates to 4 sigma
    wit = lp_poincare_gaussian(next(f for f in fdict if f.name == "H1_x1"), 2,
                               np.eye(2), mc_budget=budget, seed=SEED)
    eq_ok = abs(wit.margin) <= 4 * wit.std_error
    _report(2, eq_ok, f"160 dictionary checks pass; tightest slack "
                      f"{worst[0]:.4f} at {worst[1]} p={worst[2]}; equality "
                      f"witness gap {abs(wit.margin):.2e} <= 4se")


def test_criterion_03_covariance_representations():
    reps = cov_rep_gaussian_default(SEED, scale=1.0)
    assert len(reps) == 10
    for rep in reps:
        assert rep.passed, (rep.name, rep.lhs, rep.rhs, rep.std_error)
    sreps = cov_rep_stable_default(SEED, scale=1.0)
    assert len(sreps) == 4
    for rep in sreps:
        assert rep.passed, (rep.name, rep.lhs, rep.rhs, rep.std_error)
    gworst = max(abs(r.margin) / max(r.std_error, 1e-15) for r in reps)
    sworst = max(abs(r.margin) / max(r.std_error, 1e-15) for r in sreps)
    _report(3, True, f"gaussian 10 pairs (worst {gworst:.2f} se) and stable 4 "
                     f"pairs (worst {sworst:.2f} se) within 4 se")


def test_criterion_04_bismut_characters():
    out = bismut_characters(SEED, alphas=(1.2, 1.5, 1.8), n_triples=30)
    gap = out[0].lhs
    _report(4, gap <= 1e-6, f"stable Bismut character identity max gap "
                            f"{gap:.2e} over 30 triples (<= 1e-6)")


def test_criterion_05_stein_factors():
    Sigma = np.eye(2)
    op_bound = 1.0
    hdict = lipschitz_dictionary(2)
    pts = make_rng(SEED, 7).standard_normal((100, 2))
    worst_hs, worst_hs_se = -np.inf, 0.0
    for h in hdict:
        for x in pts[:5]:
            hess, se = gaussian_hessian_bismut(h, x, Sigma, mc_budget=2_000,
                                               seed=SEED)
            hs = float(np.linalg.norm(hess))
            if hs > worst_hs:
                worst_hs, worst_hs_se = hs, se
    hs_ok = worst_hs <= op_bound + 4 * worst_hs_se

    worst_grad, worst_grad_se = -np.inf, 0.0
    for h in hdict[:10]:
        for x in pts[:5]:
            sol = solve_stein_equation(h, x, Sigma, mc_budget=8_000, seed=SEED)
            gn = float(np.linalg.norm(sol.gradient))
            if gn > worst_grad:
                worst_grad, worst_grad_se = gn, sol.gradient_se
    grad_ok = worst_grad <= 1.0 + 4 * worst_grad_se + 1e-9

    n = 1_000_000
    Y = make_rng(SEED, 11).standard_normal((n, 2))
    vals = np.linalg.norm(Y, axis=1) / np.sqrt(2.0)
    const_err = abs(vals.mean() - np.sqrt(np.pi) / 2.0)
    const_ok = const_err <= 3 * vals.std() / np.sqrt(n)
    _report(5, hs_ok and grad_ok and const_ok,
            f"sup ||Hess f_h||_HS = {worst_hs:.3f} <= 1 + 4se; "
            f"sup ||grad f_h|| = {worst_grad:.4f} <= 1 + 4se; "
            f"E||Y/sqrt(2)|| error {const_err:.2e} <= 3se")


def test_criterion_06_stein_kernels():
    # Gaussian kernel is exactly 1
    gf = kernel_for_spec(Gaussian(np.eye(1)))
    g_ok = np.all(gf(np.linspace(-3, 3, 7)[:, None])[:, 0, 0] == 1.0)
    # centered exponential through the quadrature path, pointwise 1e-9
    p = lambda y: np.where(np.asarray(y) > -1.0, np.exp(-(np.asarray(y) + 1.0)), 0.0)
    qf = kernel_1d_from_density(p, support=(-1.0, np.inf))
    exp_err = max(abs(qf(np.array([[x]]))[0, 0, 0] - (x + 1.0))
                  for x in (-0.9, -0.25, 0.0, 0.5, 1.5, 4.0))
    e_ok = exp_err < 1e-9
    # weighted-equation residuals over the bump dictionary
    bumps = [SmoothBump(np.array([c]), w) for c, w in
             ((0.0, 1.0), (0.5, 1.2), (-0.8, 0.9), (1.5, 1.0), (-0.3, 1.4),
              (0.9, 0.7), (-1.2, 1.1), (0.2, 1.6), (1.0, 1.3), (-0.5, 0.8))]
    worst_f, worst_F = 0.0, 0.0
    for delta in (0.3, 0.5, 0.8):
        sol = f_delta(SmoothBump(np.array([0.3]), 1.2), delta)
        F = F_delta(SmoothBump(np.array([0.3]), 1.2), delta)
        for psi in bumps:
            worst_f = max(worst_f, sol.weak_residual(psi))
            worst_F = max(worst_F, F.weak_residual(psi))
    fF_ok = worst_f <= 1e-5 and worst_F <= 1e-5
    _report(6, g_ok and e_ok and fF_ok,
            f"tau=1 exact; exponential tau error {exp_err:.1e} (<= 1e-9); "
            f"weak residuals f {worst_f:.1e}, F {worst_F:.1e} (<= 1e-5)")


def test_criterion_07_t_family(density15):
    alpha = 1.5
    grid = density15
    fp = float(np.max(np.abs(t_family_1d(grid.p, 0.4, alpha, grid) - grid.p)))
    g = np.exp(-((grid.x - 1.0) ** 2))
    comp = float(np.max(np.abs(
        t_family_1d(g, 0.6, alpha, grid)
        - t_family_1d(t_family_1d(g, 0.3, alpha, grid), 0.3, alpha, grid))))
    fb = SmoothBump(np.zeros(1), 2.0)(grid.x[:, None])
    gb = SmoothBump(np.array([0.7]), 1.5)(grid.x[:, None])
    lhs = np.trapezoid(dual_semigroup_1d(gb, 0.4, alpha, grid) * fb * grid.p, grid.x)
    rhs = np.trapezoid(gb * p_t_gridded(fb, 0.4, alpha, grid) * grid.p, grid.x)
    dual = float(abs(lhs - rhs))
    ok = fp <= 1e-6 and comp <= 1e-6 and dual <= 1e-5
    _report(7, ok, f"fixed point {fp:.1e} (<= 1e-6), composition {comp:.1e} "
                   f"(<= 1e-6), duality {dual:.1e} (<= 1e-5)")


def test_criterion_08_clt_headline():
    U = 12.0 / np.pi ** 2
    bound_ok = True
    slopes = {}
    details = []
    for d in (1, 2, 4):
        cfg = ExperimentConfig(spec=UniformProduct(d), Sigma=np.eye(d), U=U,
                               n_grid=(1, 4, 16, 64, 256), m=2048, reps=8,
                               seed=SEED + d)
        rep = run_clt_experiment(cfg, jobs=8)
        bound_ok &= rep.bound_respected()
        slopes[d] = rep.slope
        n_inf = sum(r.informative for r in rep.rows)
        details.append(f"d={d}: bound {'ok' if rep.bound_respected() else 'VIOLATED'}, "
                       f"{n_inf} informative rows, slope={rep.slope}")

    gcfg = ExperimentConfig(spec=Gaussian(np.eye(2)), Sigma=np.eye(2), U=1.0,
                            n_grid=(1, 4, 16, 64, 256), m=2048, reps=8, seed=SEED)
    grep = run_clt_experiment(gcfg, jobs=8)
    gauss_ok = all(abs(r.w1_hat - r.w1_floor) <= 4 * r.std_error for r in grep.rows)

    fitted = {d: s for d, s in slopes.items() if s is not None}
    slope_in_window = all(-0.65 < s < -0.35 for s in fitted.values())
    slope_ok = len(fitted) > 0 and slope_in_window

    print("\n  " + "\n  ".join(details))
    _report(8, bound_ok and gauss_ok and slope_ok,
            f"bound respected: {bound_ok}; gaussian flat within 4se: {gauss_ok}; "
            f"informative-row slopes {slopes} must include a fit in "
            f"-0.5 +- 0.15 -- at m=2048 the uniform-product signal clears "
            f"twice the empirical-W1 floor only at n=1 (d<=2) and never at "
            f"d=4, so no slope is fittable under the 2x-floor gating")


def test_criterion_09_transport_cross_validation():
    rng_seed = SEED
    worst_1d = 0.0
    for k in range(20):
        a = sample(Gaussian(np.eye(1)), 128, rng_seed + k, substream=0).data
        b = sample(Gaussian(np.eye(1)), 128, rng_seed + k, substream=1).data
        pair = EmpiricalPair(a, b)
        worst_1d = max(worst_1d, abs(w1_exact_1d(pair) - w1_exact_assignment(pair)))
    a = sample(Gaussian(np.eye(2)), 512, rng_seed, substream=2).data
    b = sample(Gaussian(np.eye(2)), 512, rng_seed, substream=3).data
    pair = EmpiricalPair(a, b)
    exact = w1_exact_assignment(pair)
    sk = w1_sinkhorn(pair, eps=1e-3)
    sk_gap = abs(sk.value - exact)
    dual_ok = True
    ldict = lipschitz_dictionary(2)
    for k in range(5):
        a = sample(Gaussian(np.eye(2)), 256, rng_seed + k, substream=4).data
        b = sample(Gaussian(np.eye(2)), 256, rng_seed + k, substream=5).data + 0.15 * k
        p = EmpiricalPair(a, b)
        dual_ok &= w1_dual_lower_bound(p, ldict) <= w1_exact_assignment(p) + 1e-12
    ok = worst_1d < 1e-9 and sk_gap <= 1e-2 and dual_ok
    _report(9, ok, f"1d-vs-assignment max gap {worst_1d:.1e} (< 1e-9); "
                   f"sinkhorn gap {sk_gap:.2e} (<= 1e-2); dual bound never "
                   f"exceeds assignment: {dual_ok}")


def test_criterion_10_exponential_weighted_inequality():
    from steinlab.inequalities import exp_weighted_vs_nonlocal
    lin = exp_weighted_vs_nonlocal(lambda w: w, lambda w: 1.0)
    sq = exp_weighted_vs_nonlocal(lambda w: w * w, lambda w: 2.0 * w)
    eq_err = abs(lin.lhs - lin.rhs)
    ok = eq_err < 1e-8 and sq.margin > 1e-6
    _report(10, ok, f"linear equality error {eq_err:.1e} (< 1e-8); square "
                    f"margin {sq.margin:.3f} > 0")
