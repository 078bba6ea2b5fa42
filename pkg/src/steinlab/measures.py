"""Probability-measure specifications, exact samplers and characteristic functions.

Every sampler is a pure function of ``(spec, n, seed, substream)``: regenerating
with the same arguments reproduces the batch bit-exactly.  Substreams are
realized with a counter-keyed Philox generator, so batches may be produced
concurrently on non-overlapping substreams.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special as _sp

MASK64 = (1 << 64) - 1

# lambda_1 = K(alpha) * sigma on the sphere, alpha in (1, 2)
def polar_weight_ratio(alpha: float) -> float:
    """Ratio between the spectral measure entering the characteristic function
    and the sphere factor of the polar-decomposed Levy measure."""
    return -np.cos(alpha * np.pi / 2.0) * _sp.gamma(2.0 - alpha) / (alpha * (alpha - 1.0))


def make_rng(seed: int, substream: int = 0) -> np.random.Generator:
    """Counter-keyed generator; (seed, substream) pairs give independent streams."""
    key = np.array([seed & MASK64, substream & MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class MeasureError(ValueError):
    pass


class SamplerError(RuntimeError):
    pass


@dataclass(frozen=True)
class SampleBatch:
    """n x d matrix of draws plus the stream metadata that produced it."""

    data: np.ndarray
    seed: int
    substream: int = 0

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class SpectralMeasure:
    """Symmetric discrete measure on the unit sphere.

    ``weights`` are the atom masses of the measure entering the stable
    characteristic function exp(-sum_i w_i |<s_i, xi>|^alpha).
    """

    directions: np.ndarray  # (k, d), unit rows
    weights: np.ndarray     # (k,), positive

    def __post_init__(self):
        dirs = np.atleast_2d(np.asarray(self.directions, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "weights", w)
        if dirs.shape[0] != w.shape[0]:
            raise MeasureError("directions and weights length mismatch")
        if np.any(w <= 0):
            raise MeasureError("spectral weights must be positive")
        norms = np.linalg.norm(dirs, axis=1)
        if not np.allclose(norms, 1.0, atol=1e-12):
            raise MeasureError("spectral directions must be unit vectors")
        if not self._is_symmetric():
            raise MeasureError("spectral measure must be closed under s -> -s with equal weights")

    def _is_symmetric(self, tol: float = 1e-12) -> bool:
        for s, w in zip(self.directions, self.weights):
            hit = np.all(np.abs(self.directions + s) < tol, axis=1)
            if not np.any(np.abs(self.weights[hit] - w) < 1e-12 * max(1.0, w)):
                return False
        return True

    @property
    def d(self) -> int:
        return self.directions.shape[1]

    @staticmethod
    def axes(d: int, weight: float = 0.25) -> "SpectralMeasure":
        """Atoms at +-e_j, each with the given weight (1/4 reproduces the
        coordinate-wise standard symmetric stable in each axis)."""
        eye = np.eye(d)
        dirs = np.vstack([eye, -eye])
        return SpectralMeasure(dirs, np.full(2 * d, weight))

    @staticmethod
    def rotation_like_2d(alpha: float, n_atoms: int = 64) -> "SpectralMeasure":
        """Equispaced discretization in d=2 scaled so the atom sum matches
        exp(-||xi||^alpha / 2) up to discretization error."""
        if n_atoms % 2 != 0:
            raise MeasureError("need an even atom count for a symmetric measure")
        theta = np.arange(n_atoms) * 2 * np.pi / n_atoms
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        mean_abs = _sp.gamma((alpha + 1) / 2) / (np.sqrt(np.pi) * _sp.gamma(alpha / 2 + 1))
        w = 1.0 / (2.0 * n_atoms * mean_abs)
        return SpectralMeasure(dirs, np.full(n_atoms, w))


# ---------------------------------------------------------------------------
# measure specifications
# ---------------------------------------------------------------------------

class MeasureSpec:
    """Base for tagged sampleable measures; subclasses set ``kind``."""

    kind: str = "abstract"

    @property
    def d(self) -> int:  # pragma: no cover - overridden
        raise NotImplementedError

    def validate(self) -> None:
        pass

    def to_json(self) -> str:
        return json.dumps(self._payload())

    def _payload(self) -> dict:
        raise NotImplementedError


def _check_spd(S: np.ndarray) -> np.ndarray:
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if S.shape[0] != S.shape[1]:
        raise MeasureError("covariance must be square")
    if not np.allclose(S, S.T, atol=1e-12):
        raise MeasureError("covariance must be symmetric")
    if np.min(np.linalg.eigvalsh(S)) <= 0:
        raise MeasureError("covariance must be positive definite")
    return S


@dataclass(frozen=True)
class Gaussian(MeasureSpec):
    Sigma: np.ndarray

    kind = "gaussian"

    def __post_init__(self):
        object.__setattr__(self, "Sigma", _check_spd(self.Sigma))
        object.__setattr__(self, "_chol", np.linalg.cholesky(self.Sigma))

    @property
    def d(self):
        return self.Sigma.shape[0]

    def _payload(self):
        return {"kind": self.kind, "Sigma": list(map(float, self.Sigma.ravel())), "d": self.d}


@dataclass(frozen=True)
class Stable(MeasureSpec):
    alpha: float
    spectral: SpectralMeasure

    kind = "stable"

    def __post_init__(self):
        if not (1.0 < self.alpha < 2.0):
            raise MeasureError("alpha must lie strictly in (1, 2)")

    @property
    def d(self):
        return self.spectral.d

    def _payload(self):
        return {
            "kind": self.kind,
            "alpha": self.alpha,
            "directions": [list(map(float, s)) for s in self.spectral.directions],
            "weights": list(map(float, self.spectral.weights)),
        }


@dataclass(frozen=True)
class StableRotInv(MeasureSpec):
    alpha: float
    dim: int

    kind = "stable_rot_inv"

    def __post_init__(self):
        if not (1.0 < self.alpha < 2.0):
            raise MeasureError("alpha must lie strictly in (1, 2)")
        if self.dim < 1:
            raise MeasureError("dimension must be >= 1")

    @property
    def d(self):
        return self.dim

    def _payload(self):
        return {"kind": self.kind, "alpha": self.alpha, "d": self.dim}


@dataclass(frozen=True)
class ExpPower(MeasureSpec):
    """Product of iid coordinates with density proportional to exp(-|x|^delta)."""

    delta: float
    dim: int = 1

    kind = "exp_power"

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0):
            raise MeasureError("delta must lie strictly in (0, 1)")
        if self.dim < 1:
            raise MeasureError("dimension must be >= 1")

    @property
    def d(self):
        return self.dim

    def marginal_variance(self) -> float:
        return _sp.gamma(3.0 / self.delta) / _sp.gamma(1.0 / self.delta)

    def _payload(self):
        return {"kind": self.kind, "delta": self.delta, "d": self.dim}


@dataclass(frozen=True)
class ExpPowerRadial(MeasureSpec):
    """Radial density proportional to exp(-||x||^delta) on R^d, d >= 2."""

    delta: float
    dim: int

    kind = "exp_power_radial"

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0):
            raise MeasureError("delta must lie strictly in (0, 1)")
        if self.dim < 2:
            raise MeasureError("radial exp-power is for d >= 2")

    @property
    def d(self):
        return self.dim

    def _payload(self):
        return {"kind": self.kind, "delta": self.delta, "d": self.dim}


@dataclass(frozen=True)
class Gamma(MeasureSpec):
    shape: float

    kind = "gamma"

    def __post_init__(self):
        if self.shape < 0.5:
            raise MeasureError("gamma shape must be >= 1/2")

    @property
    def d(self):
        return 1

    def _payload(self):
        return {"kind": self.kind, "shape": self.shape, "d": 1}


@dataclass(frozen=True)
class Beta(MeasureSpec):
    """Density proportional to (1-x)^(a-1) (1+x)^(b-1) on [-1, 1]."""

    a: float
    b: float

    kind = "beta"

    def __post_init__(self):
        if min(self.a, self.b) <= 1.5:
            raise MeasureError("beta parameters must both exceed 3/2")

    @property
    def d(self):
        return 1

    def _payload(self):
        return {"kind": self.kind, "a": self.a, "b": self.b, "d": 1}


@dataclass(frozen=True)
class CenteredExponential(MeasureSpec):
    """Product of iid Exp(1) - 1 coordinates."""

    dim: int = 1

    kind = "centered_exponential"

    @property
    def d(self):
        return self.dim

    def _payload(self):
        return {"kind": self.kind, "d": self.dim}


@dataclass(frozen=True)
class UniformProduct(MeasureSpec):
    """Product of iid uniforms on [-sqrt(3), sqrt(3)] (centered, unit variance)."""

    dim: int = 1

    kind = "uniform_product"

    @property
    def d(self):
        return self.dim

    def _payload(self):
        return {"kind": self.kind, "d": self.dim}


@dataclass(frozen=True)
class LogConcave(MeasureSpec):
    """exp(-V) density with Hess V >= kappa * Sigma^{-1}; V minimized at 0."""

    V: Callable[[np.ndarray], np.ndarray]
    kappa: float
    Sigma: np.ndarray
    grad_V: Optional[Callable[[np.ndarray], np.ndarray]] = None

    kind = "log_concave"

    def __post_init__(self):
        if not (0.0 < self.kappa <= 1.0):
            raise MeasureError("kappa must lie in (0, 1]")
        object.__setattr__(self, "Sigma", _check_spd(self.Sigma))
        if self.Sigma.shape[0] > 4:
            raise MeasureError("log-concave rejection sampler restricted to d <= 4")

    @property
    def d(self):
        return self.Sigma.shape[0]

    def _payload(self):
        return {"kind": self.kind, "kappa": self.kappa,
                "Sigma": list(map(float, self.Sigma.ravel())), "d": self.d}


def spec_from_json(text: str) -> MeasureSpec:
    doc = json.loads(text)
    kind = doc["kind"]
    if kind == "gaussian":
        d = doc["d"]
        return Gaussian(np.array(doc["Sigma"], dtype=float).reshape(d, d))
    if kind == "stable":
        sm = SpectralMeasure(np.array(doc["directions"], dtype=float),
                             np.array(doc["weights"], dtype=float))
        return Stable(doc["alpha"], sm)
    if kind == "stable_rot_inv":
        return StableRotInv(doc["alpha"], doc["d"])
    if kind == "exp_power":
        return ExpPower(doc["delta"], doc["d"])
    if kind == "exp_power_radial":
        return ExpPowerRadial(doc["delta"], doc["d"])
    if kind == "gamma":
        return Gamma(doc["shape"])
    if kind == "beta":
        return Beta(doc["a"], doc["b"])
    if kind == "centered_exponential":
        return CenteredExponential(doc["d"])
    if kind == "uniform_product":
        return UniformProduct(doc["d"])
    raise MeasureError(f"cannot deserialize measure kind {kind!r}")


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def _stable_symmetric_1d(alpha: float, size, rng: np.random.Generator) -> np.ndarray:
    """Symmetric alpha-stable draws with characteristic function exp(-|xi|^alpha / 2),
    by the polar (Chambers-Mallows-Stuck) transformation."""
    V = rng.uniform(-np.pi / 2, np.pi / 2, size)
    W = rng.exponential(1.0, size)
    X = (np.sin(alpha * V) / np.cos(V) ** (1.0 / alpha)
         * (np.cos((1.0 - alpha) * V) / W) ** ((1.0 - alpha) / alpha))
    return X * 0.5 ** (1.0 / alpha)


def _positive_stable(rho: float, size, rng: np.random.Generator) -> np.ndarray:
    """Kanter's representation of the one-sided stable amplitude with Laplace
    transform exp(-s^rho), 0 < rho < 1."""
    u = rng.uniform(0.0, 1.0, size)
    w = rng.exponential(1.0, size)
    b = (np.sin(rho * np.pi * u) ** rho
         * np.sin((1.0 - rho) * np.pi * u) ** (1.0 - rho)
         / np.sin(np.pi * u))
    return b ** (1.0 / rho) * w ** (-(1.0 - rho) / rho)


def _sample_rot_inv(alpha: float, n: int, d: int, rng) -> np.ndarray:
    # sub-Gaussian representation: sqrt(A) Z with a positive (alpha/2)-stable A
    rho = alpha / 2.0
    A = _positive_stable(rho, n, rng) * 2.0 ** ((rho - 1.0) / rho)
    Z = rng.standard_normal((n, d))
    return np.sqrt(A)[:, None] * Z


def _sample_exp_power_1d(delta: float, size, rng) -> np.ndarray:
    # |X|^delta ~ Gamma(1/delta), the incomplete-gamma tail representation
    g = rng.gamma(1.0 / delta, 1.0, size)
    s = rng.integers(0, 2, size) * 2 - 1
    return s * g ** (1.0 / delta)


def _sample_log_concave(spec: LogConcave, n: int, rng) -> np.ndarray:
    # rejection from the Gaussian envelope matched to the kappa Sigma^{-1} bound
    d = spec.d
    Sinv = np.linalg.inv(spec.Sigma)
    chol = np.linalg.cholesky(spec.Sigma / spec.kappa)
    v0 = float(np.asarray(spec.V(np.zeros((1, d)))).ravel()[0])
    out = np.empty((n, d))
    got = 0
    proposals = 0
    cap = 1_000_000
    while got < n:
        m = min(max(4 * (n - got), 1024), cap - proposals)
        if m <= 0:
            raise SamplerError("log-concave rejection sampler exceeded the proposal cap")
        proposals += m
        x = rng.standard_normal((m, d)) @ chol.T
        quad = 0.5 * spec.kappa * np.einsum("ij,jk,ik->i", x, Sinv, x)
        logr = -(np.asarray(spec.V(x)).ravel() - v0 - quad)
        if np.any(logr > 1e-9):
            raise SamplerError("envelope violated: V(x) < V(0) + kappa |x|^2_Sigma / 2 somewhere")
        keep = np.log(rng.uniform(0.0, 1.0, m)) < logr
        k = int(np.sum(keep))
        take = min(k, n - got)
        out[got:got + take] = x[keep][:take]
        got += take
    return out


def sample(spec: MeasureSpec, n: int, seed: int, substream: int = 0) -> SampleBatch:
    """Draw ``n`` iid rows from ``spec``; deterministic given (seed, substream)."""
    if n < 1:
        raise MeasureError("need n >= 1")
    rng = make_rng(seed, substream)
    if isinstance(spec, Gaussian):
        data = rng.standard_normal((n, spec.d)) @ spec._chol.T
    elif isinstance(spec, Stable):
        # sum_i (2 w_i)^{1/alpha} Z_i s_i with iid 1d symmetric stable Z_i
        k = spec.spectral.directions.shape[0]
        Z = _stable_symmetric_1d(spec.alpha, (n, k), rng)
        scales = (2.0 * spec.spectral.weights) ** (1.0 / spec.alpha)
        data = (Z * scales) @ spec.spectral.directions
    elif isinstance(spec, StableRotInv):
        data = _sample_rot_inv(spec.alpha, n, spec.d, rng)
    elif isinstance(spec, ExpPower):
        data = _sample_exp_power_1d(spec.delta, (n, spec.d), rng)
    elif isinstance(spec, ExpPowerRadial):
        g = rng.gamma(spec.d / spec.delta, 1.0, n)
        r = g ** (1.0 / spec.delta)
        z = rng.standard_normal((n, spec.d))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        data = r[:, None] * z
    elif isinstance(spec, Gamma):
        data = rng.gamma(spec.shape, 1.0, (n, 1))
    elif isinstance(spec, Beta):
        data = 2.0 * rng.beta(spec.b, spec.a, (n, 1)) - 1.0
    elif isinstance(spec, CenteredExponential):
        data = rng.exponential(1.0, (n, spec.d)) - 1.0
    elif isinstance(spec, UniformProduct):
        data = rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), (n, spec.d))
    elif isinstance(spec, LogConcave):
        data = _sample_log_concave(spec, n, rng)
    else:
        raise MeasureError(f"unsupported measure kind {type(spec).__name__}")
    return SampleBatch(data=data, seed=seed, substream=substream)


# ---------------------------------------------------------------------------
# characteristic functions
# ---------------------------------------------------------------------------

def characteristic_function(spec: MeasureSpec, xi: np.ndarray) -> complex:
    """Closed-form characteristic function; defined for the Gaussian and the
    symmetric stable families only."""
    xi = np.asarray(xi, dtype=float).ravel()
    if isinstance(spec, Gaussian):
        return complex(np.exp(-0.5 * xi @ spec.Sigma @ xi))
    if isinstance(spec, Stable):
        proj = spec.spectral.directions @ xi
        return complex(np.exp(-np.sum(spec.spectral.weights * np.abs(proj) ** spec.alpha)))
    if isinstance(spec, StableRotInv):
        return complex(np.exp(-np.linalg.norm(xi) ** spec.alpha / 2.0))
    raise MeasureError(f"no closed-form characteristic function for kind {spec.kind!r}")


def empirical_cf(data: np.ndarray, xi: np.ndarray) -> complex:
    xi = np.asarray(xi, dtype=float).ravel()
    return complex(np.mean(np.exp(1j * data @ xi)))


# ---------------------------------------------------------------------------
# interpolation coupling
# ---------------------------------------------------------------------------

def sample_interpolation_pair(spec: MeasureSpec, z: float, n: int, seed: int,
                              substream: int = 0) -> tuple[SampleBatch, SampleBatch]:
    """Coupled pair (X_z, Y_z) whose joint characteristic function is
    (phi(xi1) phi(xi2))^{1-z} phi(xi1 + xi2)^z.

    Realized as X_z = W + V, Y_z = W + V' where W carries the z-fraction of
    the triplet and V, V' are iid carrying the (1-z)-fraction.
    """
    if not (0.0 <= z <= 1.0):
        raise MeasureError("z must lie in [0, 1]")
    rng = make_rng(seed, substream)
    d = spec.d
    if isinstance(spec, Gaussian):
        chol = spec._chol
        W = np.sqrt(z) * rng.standard_normal((n, d)) @ chol.T
        V = np.sqrt(1.0 - z) * rng.standard_normal((n, d)) @ chol.T
        Vp = np.sqrt(1.0 - z) * rng.standard_normal((n, d)) @ chol.T
    elif isinstance(spec, (Stable, StableRotInv)):
        def draw():
            if isinstance(spec, Stable):
                k = spec.spectral.directions.shape[0]
                Z = _stable_symmetric_1d(spec.alpha, (n, k), rng)
                scales = (2.0 * spec.spectral.weights) ** (1.0 / spec.alpha)
                return (Z * scales) @ spec.spectral.directions
            return _sample_rot_inv(spec.alpha, n, d, rng)

        a = spec.alpha
        W = z ** (1.0 / a) * draw()
        V = (1.0 - z) ** (1.0 / a) * draw()
        Vp = (1.0 - z) ** (1.0 / a) * draw()
    else:
        raise MeasureError("interpolation coupling needs an infinitely divisible "
                           "spec with a scaling realization (gaussian or stable)")
    X = SampleBatch(W + V, seed, substream)
    Y = SampleBatch(W + Vp, seed, substream)
    return X, Y


# ---------------------------------------------------------------------------
# nondegeneracy
# ---------------------------------------------------------------------------

def sphere_grid(d: int, size: int) -> np.ndarray:
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        th = np.arange(size) * 2 * np.pi / size
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    g = make_rng(0, 2 * d).standard_normal((size, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def check_nondegenerate(spectral: SpectralMeasure, alpha: float,
                        grid_size: int = 10_000) -> float:
    """Minimum over a deterministic sphere grid of sum_i w_i |<y, s_i>|^alpha.

    A value at numerical zero means the stable law degenerates on some
    direction; the caller decides the tolerance.
    """
    ys = sphere_grid(spectral.d, grid_size)
    proj = np.abs(ys @ spectral.directions.T) ** alpha
    return float(np.min(proj @ spectral.weights))
