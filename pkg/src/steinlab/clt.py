"""Quantitative high-dimensional CLT bench: normalized sums, empirical W1
against the target Gaussian with its statistical floor, the theoretical rate
bound, and the log-log rate fit on informative rows."""

from __future__ import annotations

import csv
import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .measures import (CenteredExponential, Gaussian, LogConcave, MeasureSpec,
                       SampleBatch, UniformProduct, sample)
from .stein import op_norm_inv_sqrt
from .transport import ASSIGNMENT_GUARD, EmpiricalPair, w1_exact_1d, w1_exact_assignment, w1_sinkhorn


class ExperimentError(ValueError):
    pass


def theoretical_bound(Sigma: np.ndarray, U: float, n: int) -> float:
    """||Sigma^(-1/2)||_op ||Sigma||_HS sqrt(U - 1) / sqrt(n)."""
    Sigma = np.atleast_2d(np.asarray(Sigma, dtype=float))
    if n < 1:
        raise ExperimentError("need n >= 1")
    if U < 1.0:
        warnings.warn("Poincare constant below 1 clamped to the Gaussian value 0")
        return 0.0
    hs = float(np.linalg.norm(Sigma))
    return float(op_norm_inv_sqrt(Sigma) * hs * np.sqrt(U - 1.0) / np.sqrt(n))


def non_iid_bound(Us: Sequence[float], Sigma: np.ndarray, n: int) -> float:
    """Independent non-identically-distributed version:
    (||Sigma^(-1/2)||_op ||Sigma||_HS / n) (sum_k (U_k - 1))^(1/2)."""
    Us = list(Us)
    if len(Us) != n:
        raise ExperimentError("need one constant per summand")
    if any(u < 1.0 for u in Us):
        raise ExperimentError("summand constants must be >= 1")
    Sigma = np.atleast_2d(np.asarray(Sigma, dtype=float))
    hs = float(np.linalg.norm(Sigma))
    return float(op_norm_inv_sqrt(Sigma) * hs / n * np.sqrt(sum(u - 1.0 for u in Us)))


def sample_normalized_sum(spec: MeasureSpec, n: int, m: int, seed: int,
                          substream: int = 0) -> SampleBatch:
    """m draws of S_n = n^(-1/2) sum of n iid copies of the spec."""
    if n < 1:
        raise ExperimentError("need n >= 1")
    base = sample(spec, m * n, seed, substream).data
    d = base.shape[1]
    s = base.reshape(m, n, d).sum(axis=1) / np.sqrt(n)
    return SampleBatch(data=s, seed=seed, substream=substream)


def known_poincare_upper(spec: MeasureSpec) -> Optional[float]:
    """Analytic Poincare constants for the shipped inputs: Gaussian is exactly
    1, the unit-variance uniform product has the Neumann value 12/pi^2, and a
    strongly log-concave spec is bounded by 1/kappa."""
    if isinstance(spec, Gaussian):
        return 1.0
    if isinstance(spec, UniformProduct):
        return 12.0 / np.pi ** 2
    if isinstance(spec, CenteredExponential):
        return 4.0  # spectral gap of Exp(1) against the flat energy
    if isinstance(spec, LogConcave):
        return 1.0 / spec.kappa
    return None


@dataclass(frozen=True)
class ExperimentConfig:
    spec: MeasureSpec
    Sigma: np.ndarray
    U: float
    n_grid: tuple[int, ...] = (1, 4, 16, 64, 256)
    m: int = 2048
    reps: int = 8
    estimator: str = "assignment"
    seed: int = 0
    sinkhorn_eps: float = 1e-3
    U_std_error: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "Sigma", np.atleast_2d(np.asarray(self.Sigma, dtype=float)))
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        if self.estimator not in ("assignment", "sinkhorn"):
            raise ExperimentError("estimator must be 'assignment' or 'sinkhorn'")
        if self.estimator == "assignment" and self.m > ASSIGNMENT_GUARD:
            raise ExperimentError(f"assignment estimator guard: m <= {ASSIGNMENT_GUARD}")
        if self.U < 1.0 - 4.0 * self.U_std_error:
            raise ExperimentError("Poincare constant below the rigidity floor U >= 1")

    def validate_covariance(self, budget: int = 20_000) -> None:
        """Monte Carlo check that the spec's covariance matches Sigma to 4 sigma."""
        X = sample(self.spec, budget, self.seed, substream=999_983).data
        d = X.shape[1]
        if d != self.Sigma.shape[0]:
            raise ExperimentError("spec dimension does not match Sigma")
        emp = X.T @ X / budget
        prods = np.einsum("ni,nj->nij", X, X)
        se = prods.std(axis=0) / np.sqrt(budget)
        gap = np.abs(emp - self.Sigma)
        if np.any(gap > 4.0 * se + 1e-12):
            raise ExperimentError(f"spec covariance mismatch: max gap {gap.max():.4g}")


@dataclass(frozen=True)
class RateRow:
    n: int
    w1_hat: float
    w1_floor: float
    bound: float
    std_error: float

    def __post_init__(self):
        for f in ("w1_hat", "w1_floor", "bound", "std_error"):
            object.__setattr__(self, f, float(getattr(self, f)))

    @property
    def informative(self) -> bool:
        return self.w1_hat > 2.0 * self.w1_floor


@dataclass(frozen=True)
class RateReport:
    rows: tuple[RateRow, ...]
    slope: Optional[float]
    slope_ci: tuple[Optional[float], Optional[float]]
    uninformative: bool
    config_echo: dict

    def bound_respected(self) -> bool:
        return all(r.w1_hat <= r.bound + r.w1_floor + 4.0 * r.std_error for r in self.rows)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "w1_hat", "w1_floor", "bound", "std_error"])
            for r in self.rows:
                w.writerow([r.n, repr(r.w1_hat), repr(r.w1_floor),
                            repr(r.bound), repr(r.std_error)])

    def to_json(self) -> str:
        return json.dumps({
            "slope": self.slope,
            "slope_ci": list(self.slope_ci),
            "uninformative": self.uninformative,
            "rows": [{"n": r.n, "w1_hat": r.w1_hat, "w1_floor": r.w1_floor,
                      "bound": r.bound, "std_error": r.std_error,
                      "informative": r.informative} for r in self.rows],
            "config": self.config_echo,
        }, indent=2)


def _estimate_w1(a: np.ndarray, b: np.ndarray, estimator: str, eps: float) -> float:
    pair = EmpiricalPair(a, b)
    if estimator == "sinkhorn":
        return w1_sinkhorn(pair, eps=eps).value
    if pair.d == 1:
        return w1_exact_1d(pair)
    return w1_exact_assignment(pair)


def _cell(args) -> tuple[int, int, float, float]:
    (spec, Sigma, n, m, seed, base_sub, estimator, eps) = args
    s_batch = sample_normalized_sum(spec, n, m, seed, substream=base_sub).data
    g_spec = Gaussian(Sigma)
    g_hat = sample(g_spec, m, seed, substream=base_sub + 1).data
    g_a = sample(g_spec, m, seed, substream=base_sub + 2).data
    g_b = sample(g_spec, m, seed, substream=base_sub + 3).data
    hat = _estimate_w1(s_batch, g_hat, estimator, eps)
    floor = _estimate_w1(g_a, g_b, estimator, eps)
    return n, base_sub, hat, floor


def run_clt_experiment(cfg: ExperimentConfig, jobs: int = 1,
                       validate: bool = True) -> RateReport:
    """Full bench: per n, the mean over reps of the W1 estimate between the
    S_n batch and an independent Gaussian batch, the self-distance floor
    between two further Gaussian batches, and the theoretical bound; the rate
    is fit on rows where the estimate clears twice the floor.

    (n, rep) cells are independent jobs on disjoint substreams, so the result
    is bit-identical for any worker count."""
    if validate:
        cfg.validate_covariance()
    tasks = []
    for i, n in enumerate(cfg.n_grid):
        for rep in range(cfg.reps):
            base_sub = (i * 10_000 + rep) * 8
            tasks.append((cfg.spec, cfg.Sigma, n, cfg.m, cfg.seed, base_sub,
                          cfg.estimator, cfg.sinkhorn_eps))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_cell, tasks, chunksize=1))
    else:
        results = [_cell(t) for t in tasks]
    # aggregate in fixed substream order regardless of worker scheduling
    by_n: dict[int, list[tuple[float, float]]] = {n: [] for n in cfg.n_grid}
    for n, sub, hat, floor in sorted(results, key=lambda r: r[1]):
        by_n[n].append((hat, floor))

    rows = []
    for n in cfg.n_grid:
        hs = np.array([h for h, _ in by_n[n]])
        fs = np.array([f for _, f in by_n[n]])
        se = float(np.sqrt(hs.var(ddof=1) / len(hs) + fs.var(ddof=1) / len(fs))) \
            if len(hs) > 1 else 0.0
        rows.append(RateRow(n=n, w1_hat=float(hs.mean()), w1_floor=float(fs.mean()),
                            bound=theoretical_bound(cfg.Sigma, cfg.U, n),
                            std_error=se))

    informative = [r for r in rows if r.informative]
    uninformative = len(informative) == 0
    slope = None
    ci: tuple[Optional[float], Optional[float]] = (None, None)
    if len(informative) >= 2:
        lx = np.log([r.n for r in informative])
        ly = np.log([r.w1_hat for r in informative])
        A = np.vstack([lx, np.ones_like(lx)]).T
        coef, res, *_ = np.linalg.lstsq(A, ly, rcond=None)
        slope = float(coef[0])
        if len(informative) > 2 and res.size:
            sxx = np.sum((lx - lx.mean()) ** 2)
            se_s = float(np.sqrt(res[0] / (len(lx) - 2) / sxx))
        else:
            se_s = 0.0
        ci = (slope - 2 * se_s, slope + 2 * se_s)

    echo = {"spec": cfg.spec.kind, "d": cfg.spec.d, "U": cfg.U,
            "n_grid": list(cfg.n_grid), "m": cfg.m, "reps": cfg.reps,
            "estimator": cfg.estimator, "seed": cfg.seed}
    return RateReport(rows=tuple(rows), slope=slope, slope_ci=ci,
                      uninformative=uninformative, config_echo=echo)
