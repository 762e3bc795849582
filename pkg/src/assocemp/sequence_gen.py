"""Stationary associated sequences with uniform marginals.

The latent process is a one-sided moving average with non-negative weights,

    Z_t = sum_{j=0}^{J} a_j eps_{t-j},   eps iid N(0, 1),   sum a_j^2 = 1,

and the observed sequence is X_t = Phi(Z_t).  Non-negative linear
combinations of independent Gaussians are associated, and monotone
transforms preserve association, so X is associated with exactly known
pair laws: (X_0, X_k) has the Gaussian copula with correlation
rho_k = sum_j a_j a_{j+k}.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
import hashlib

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import zeta

from ._normal import norm_cdf
from .errors import CapacityError, DomainError, ParameterError
from .rng import stream

__all__ = [
    "GaussianLinearModel",
    "MarginalSpec",
    "SamplePath",
    "PathEnsemble",
    "CovarianceDecayCertificate",
    "build_gaussian_linear_model",
    "latent_autocorrelation",
    "uniform_pair_covariance",
    "uniform01",
    "exponential",
    "sample_paths",
    "verify_decay_certificate",
    "minimal_decay_constant",
]

DEFAULT_J_MAX = 4096
MAX_VALUES = 2 * 10**8


@dataclass(frozen=True, eq=False)
class GaussianLinearModel:
    """Moving-average latent model.

    Attributes
    ----------
    kind : {'iid', 'ar1', 'power_law'}
    params : tuple of (name, value) pairs used to build the model
    coefficients : ndarray
        Normalised weights a_0..a_J, all non-negative, unit sum of squares.
    variance_norm : float
        Factor that was applied to the raw weights to reach unit variance.
    truncated_mass : float
        Fraction of latent variance dropped by truncating the infinite
        moving average at J (0 for finite models).
    """

    kind: str
    params: tuple
    coefficients: np.ndarray
    variance_norm: float
    truncated_mass: float = 0.0

    @property
    def j_max(self):
        return len(self.coefficients) - 1

    @property
    def model_id(self):
        inner = ",".join(f"{k}={v!r}" for k, v in self.params)
        return f"{self.kind}({inner})"

    @cached_property
    def model_hash(self):
        """64-bit digest of kind, parameters and coefficient bytes."""
        h = hashlib.sha256(self.model_id.encode())
        h.update(np.ascontiguousarray(self.coefficients, dtype="<f8").tobytes())
        return int.from_bytes(h.digest()[:8], "little")

    @cached_property
    def autocorrelations(self):
        """rho_0..rho_J by direct convolution of the coefficients."""
        a = self.coefficients
        rho = np.correlate(a, a, mode="full")[len(a) - 1:]
        rho[0] = 1.0
        # the exact values are sums of non-negative terms
        return np.clip(rho, 0.0, 1.0)

    def rho(self, k):
        """Latent autocorrelation at lag(s) k; zero beyond J and symmetric in k."""
        k = np.abs(np.asarray(k, dtype=np.int64))
        r = self.autocorrelations
        out = np.where(k < len(r), r[np.minimum(k, len(r) - 1)], 0.0)
        return out if out.ndim else float(out)


def build_gaussian_linear_model(kind, **params):
    """Construct a :class:`GaussianLinearModel`.

    ``kind='iid'`` takes no parameters, ``kind='ar1'`` takes ``phi`` in
    [0, 1) and optional ``j_max``, ``kind='power_law'`` takes ``alpha > 0``
    and optional ``j_max``.

    Power-law weights are a_j = (j + 1)^(-gamma) with
    gamma = max(alpha, (alpha + 1) / 2): for alpha > 1 this gives
    rho_k ~ zeta(alpha)/zeta(2 alpha) k^(-alpha), for alpha < 1 the
    long-memory regime rho_k ~ c k^(-alpha).
    """
    if kind == "iid":
        if params:
            raise ParameterError(f"iid model takes no parameters, got {sorted(params)}")
        return GaussianLinearModel("iid", (), np.ones(1), 1.0, 0.0)

    j_max = int(params.pop("j_max", DEFAULT_J_MAX))
    if j_max < 0:
        raise ParameterError("j_max must be >= 0")
    j = np.arange(j_max + 1, dtype=float)

    if kind == "ar1":
        phi = float(params.pop("phi"))
        if params:
            raise ParameterError(f"unknown ar1 parameters {sorted(params)}")
        if not 0.0 <= phi < 1.0:
            raise ParameterError(f"ar1 requires 0 <= phi < 1, got {phi}")
        raw = phi**j
        tail = phi ** (2 * (j_max + 1))
        key = (("phi", phi), ("j_max", j_max))
    elif kind == "power_law":
        alpha = float(params.pop("alpha"))
        if params:
            raise ParameterError(f"unknown power_law parameters {sorted(params)}")
        if not alpha > 0.0:
            raise ParameterError(f"power_law requires alpha > 0, got {alpha}")
        gamma = max(alpha, 0.5 * (alpha + 1.0))
        raw = (j + 1.0) ** (-gamma)
        if 2 * gamma > 1.0:
            tail = float(zeta(2 * gamma, j_max + 2) / zeta(2 * gamma, 1))
        else:
            tail = float("nan")
        key = (("alpha", alpha), ("j_max", j_max))
    else:
        raise ParameterError(f"unknown model kind {kind!r}")

    norm = 1.0 / np.sqrt(np.sum(raw * raw))
    coef = raw * norm
    return GaussianLinearModel(kind, key, coef, float(norm), tail)


def latent_autocorrelation(model, k):
    if np.any(np.asarray(k) < 0):
        raise ParameterError("lag must be >= 0")
    return model.rho(k)


def uniform_pair_covariance(rho):
    """cov(Phi(Z_0), Phi(Z_k)) = arcsin(rho/2) / (2 pi) for correlation rho."""
    rho = np.asarray(rho, dtype=float)
    if np.any(np.abs(rho) > 1.0) or np.any(np.isnan(rho)):
        raise DomainError("correlation must lie in [-1, 1]")
    out = np.arcsin(0.5 * rho) / (2.0 * np.pi)
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class MarginalSpec:
    """Marginal law of the observed sequence.

    ``cdf`` and ``ppf`` are vectorised, continuous and strictly increasing
    on the support.  ``density_bound`` is the Lipschitz constant of ``cdf``
    when known.
    """

    name: str
    cdf: object = None
    ppf: object = None
    density_bound: float | None = 1.0
    finite_variance: bool = True
    mean: float | None = None

    @property
    def is_uniform(self):
        return self.name == "uniform01"

    def to_uniform(self, x):
        return x if self.is_uniform else self.cdf(x)

    def from_uniform(self, u):
        return u if self.is_uniform else self.ppf(u)


def _identity(u):
    return u


def uniform01():
    return MarginalSpec("uniform01", _identity, _identity, 1.0, True, 0.5)


def exponential(lam=1.0):
    """Exponential(lam) marginal; its density is bounded by lam."""
    lam = float(lam)
    if lam <= 0:
        raise ParameterError("rate must be positive")

    def cdf(x):
        return -np.expm1(-lam * np.asarray(x))

    def ppf(u):
        return -np.log1p(-np.asarray(u)) / lam

    return MarginalSpec(f"exponential({lam!r})", cdf, ppf, lam, True, 1.0 / lam)


@dataclass(frozen=True, eq=False)
class SamplePath:
    values: np.ndarray
    model_id: str
    seed: int
    marginal: MarginalSpec
    replicate: int = 0

    @property
    def n(self):
        return len(self.values)


@dataclass(frozen=True, eq=False)
class PathEnsemble:
    """R independent sample paths of length n, stored row-wise."""

    values: np.ndarray
    model: GaussianLinearModel
    marginal: MarginalSpec
    seed: int
    stream_prefix: tuple = field(default=())

    @property
    def n(self):
        return self.values.shape[1]

    @property
    def replicates(self):
        return self.values.shape[0]

    def uniform_values(self):
        """Values on the uniform scale, U = F(X)."""
        return self.marginal.to_uniform(self.values)

    def path(self, r):
        return SamplePath(self.values[r], self.model.model_id, self.seed, self.marginal, r)


def _latent_path(model, n, seed, path):
    a = model.coefficients
    burn = len(a) - 1
    eps = stream(seed, path).standard_normal(n + burn)
    if burn == 0:
        return eps * a[0]
    return fftconvolve(eps, a, mode="valid")


def sample_paths(model, marginal, n, replicates, seed, *, threads=1, stream_prefix=()):
    """Simulate ``replicates`` stationary paths of length ``n``.

    Replicate r draws its innovations from ``stream(seed, stream_prefix + (r,))``;
    the first J innovations serve as burn-in so every returned window is
    exactly stationary.
    """
    n, replicates = int(n), int(replicates)
    if n < 1 or replicates < 1:
        raise ParameterError("n and replicates must be >= 1")
    if n * replicates > MAX_VALUES:
        raise CapacityError(f"n*R = {n * replicates} exceeds guard {MAX_VALUES}")
    marginal = marginal if marginal is not None else uniform01()
    out = np.empty((replicates, n))
    prefix = tuple(stream_prefix)

    def fill(r):
        u = norm_cdf(_latent_path(model, n, seed, prefix + (r,)))
        out[r] = marginal.from_uniform(u)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, range(replicates)))
    else:
        for r in range(replicates):
            fill(r)
    return PathEnsemble(out, model, marginal, int(seed), prefix)


@dataclass(frozen=True)
class CovarianceDecayCertificate:
    """Outcome of checking cov(X_0, X_k) <= C k^(-alpha) for k <= K_max."""

    C: float
    alpha: float
    K_max: int
    margin: float
    valid: bool
    worst_k: int
    complete: bool
    tail_note: str


def _exact_covariances(model, K_max):
    return uniform_pair_covariance(model.rho(np.arange(1, K_max + 1)))


def verify_decay_certificate(model, C, alpha, K_max):
    """Check the exact covariances against C k^(-alpha) for k = 1..K_max.

    ``margin`` is C - max_k cov(X_0, X_k) k^alpha; the certificate is
    valid iff it is non-negative.
    """
    C, alpha, K_max = float(C), float(alpha), int(K_max)
    if C <= 0 or alpha <= 0:
        raise ParameterError("C and alpha must be positive")
    if K_max < 1:
        raise ParameterError("K_max must be >= 1")
    k = np.arange(1, K_max + 1, dtype=float)
    # slack in units of k^-alpha, so margin = C - minimal valid constant
    scaled = _exact_covariances(model, K_max) * k**alpha
    worst = int(np.argmax(scaled))
    margin = C - float(scaled[worst])
    complete = K_max >= model.j_max
    if complete:
        note = f"cov = 0 for k > J = {model.j_max} (finite moving average)"
    else:
        note = f"lags {K_max + 1}..{model.j_max} unchecked"
    return CovarianceDecayCertificate(C, alpha, K_max, margin, margin >= 0.0, worst + 1, complete, note)


def minimal_decay_constant(model, alpha, K_max):
    """Smallest C with cov(X_0, X_k) <= C k^(-alpha) for all k <= K_max."""
    k = np.arange(1, int(K_max) + 1, dtype=float)
    return float(np.max(_exact_covariances(model, int(K_max)) * k**alpha))
