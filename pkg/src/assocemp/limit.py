"""Limit covariance of the empirical process and sampling of its Gaussian limit.

For a reversible Gaussian-copula model the limit covariance is

    Gamma(x, y) = min(x, y) - x y + 2 sum_{k >= 1} (C_{rho_k}(x, y) - x y),

truncated at a lag K whose remainder is certified through the bound
|C_rho(x, y) - x y| <= 4 arcsin(rho / 2) / (2 pi) on each of the lags +-k.
"""

from dataclasses import dataclass, field
import csv

import numpy as np
from scipy.spatial.distance import cdist
from scipy.stats import ks_2samp

from ._normal import bivariate_normal_cdf
from .diagnostics import exact_gaussian_copula
from .empirical import EvaluationGrid, custom_grid
from .errors import NotPSDError, TruncationError, UnderpoweredError
from .rng import stream
from .sequence_gen import uniform_pair_covariance

__all__ = [
    "bivariate_normal_cdf",
    "LimitCovariance",
    "GaussianEnsemble",
    "FddReport",
    "truncation_tails",
    "limit_covariance_matrix",
    "sample_limit_process",
    "energy_statistic",
    "fdd_distance",
    "write_covariance_csv",
    "read_covariance_csv",
    "JITTER_STEPS",
]

#: diagonal jitter escalation used when factorising a truncated covariance
JITTER_STEPS = (0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8)
PERM_STREAM = 0x7065726D  # "perm"


@dataclass(frozen=True, eq=False)
class LimitCovariance:
    grid: EvaluationGrid
    matrix: np.ndarray
    K_max: int
    tail_bound: float


@dataclass(frozen=True, eq=False)
class GaussianEnsemble:
    values: np.ndarray
    grid: EvaluationGrid
    jitter: float


def truncation_tails(model):
    """tails[K] = sum_{k > K} 8 cov(X_0, X_k) for K = 0..J (0 beyond J)."""
    rho = model.rho(np.arange(1, model.j_max + 1))
    b = 8.0 * uniform_pair_covariance(rho) if len(rho) else np.zeros(0)
    tails = np.zeros(model.j_max + 1)
    if len(b):
        tails[:-1] = np.cumsum(b[::-1])[::-1]
    return tails


def limit_covariance_matrix(model, grid, K_max=None, tail_tol=1e-6, chunk=64):
    """Truncated limit covariance on ``grid``.

    With ``K_max=None`` the smallest lag meeting ``tail_tol`` is used;
    an explicit ``K_max`` whose certified tail exceeds ``tail_tol`` raises
    :class:`TruncationError`.
    """
    if not isinstance(grid, EvaluationGrid):
        grid = custom_grid(grid)
    tails = truncation_tails(model)
    if K_max is None:
        K_max = int(np.argmax(tails <= tail_tol))
    K_max = int(K_max)
    tail = float(tails[min(K_max, len(tails) - 1)])
    if tail > tail_tol:
        raise TruncationError(f"tail bound {tail:.3e} at K_max={K_max} exceeds {tail_tol:.3e}")

    x = grid.points
    m = len(x)
    iu, ju = np.triu_indices(m)
    xi, yj = x[iu], x[ju]
    prod = xi * yj
    acc = np.minimum(xi, yj) - prod
    lags = np.arange(1, min(K_max, model.j_max) + 1)
    rho = model.rho(lags)
    lags, rho = lags[rho > 0], rho[rho > 0]
    series = np.zeros_like(acc)
    for start in range(0, len(rho), chunk):
        r = rho[start:start + chunk]
        c = exact_gaussian_copula(xi[None, :], yj[None, :], r[:, None])
        series += np.sum(c - prod[None, :], axis=0)
    acc = acc + 2.0 * series
    out = np.empty((m, m))
    out[iu, ju] = acc
    out[ju, iu] = acc
    return LimitCovariance(grid, out, K_max, tail)


def _factor(matrix):
    for jitter in JITTER_STEPS:
        try:
            return np.linalg.cholesky(matrix + jitter * np.eye(len(matrix))), jitter
        except np.linalg.LinAlgError:
            continue
    lam = float(np.linalg.eigvalsh(matrix).min())
    raise NotPSDError(f"covariance not PSD: min eigenvalue {lam:.3e}")


def sample_limit_process(cov, replicates, seed, stream_prefix=()):
    """Draw ``replicates`` centred Gaussian vectors with covariance ``cov.matrix``.

    Coordinates with zero variance (the grid ends 0 and 1) are returned as
    exact zeros and left out of the factorisation.  Replicate r uses
    ``stream(seed, stream_prefix + (r,))``.
    """
    S = cov.matrix if isinstance(cov, LimitCovariance) else np.asarray(cov, dtype=float)
    grid = cov.grid if isinstance(cov, LimitCovariance) else custom_grid(np.linspace(0, 1, len(S)))
    m = len(S)
    active = np.flatnonzero(np.diag(S) > 0.0)
    out = np.zeros((int(replicates), m))
    if len(active) == 0:
        return GaussianEnsemble(out, grid, 0.0)
    sub = S[np.ix_(active, active)]
    lam = float(np.linalg.eigvalsh(sub).min())
    if lam < -JITTER_STEPS[-1]:
        raise NotPSDError(f"covariance not PSD: min eigenvalue {lam:.3e}")
    L, jitter = _factor(sub)
    prefix = tuple(stream_prefix)
    z = np.empty((int(replicates), len(active)))
    for r in range(int(replicates)):
        z[r] = stream(seed, prefix + (r,)).standard_normal(len(active))
    out[:, active] = z @ L.T
    return GaussianEnsemble(out, grid, jitter)


def _pooled_distances(a, b):
    pooled = np.vstack([a, b])
    return cdist(pooled, pooled)


def energy_statistic(a, b):
    """Two-sample energy statistic n_a n_b/(n_a+n_b) (2E|X-Y| - E|X-X'| - E|Y-Y'|)."""
    a, b = np.atleast_2d(a), np.atleast_2d(b)
    D = _pooled_distances(a, b)
    na = len(a)
    return _energy_from_blocks(D[:na, :na].sum(), D[:na, na:].sum(), D[na:, na:].sum(), na, len(b))


def _energy_from_blocks(s_aa, s_ab, s_bb, na, nb):
    return na * nb / (na + nb) * (2.0 * s_ab / (na * nb) - s_aa / na**2 - s_bb / nb**2)


@dataclass(frozen=True)
class FddReport:
    ks: tuple
    ks_max: float
    energy: float
    pvalue: float
    permutations: int
    coordinates: tuple = field(default=())

    def to_record(self):
        return (f"check=fdd_distance pvalue={self.pvalue!r} energy={self.energy!r} "
                f"ks_max={self.ks_max!r} permutations={self.permutations}")


def _default_coordinates(m, k=5):
    if m <= k:
        return tuple(range(m))
    return tuple(int(i) for i in np.round(np.linspace(0, m - 1, k + 2)[1:-1]))


def fdd_distance(a, b, coordinates=None, permutations=499, seed=0, stream_prefix=(), min_replicates=50):
    """Per-coordinate two-sample KS and an energy-distance permutation test.

    ``a`` and ``b`` are (replicates, points) arrays evaluated on a common
    grid; ``coordinates`` selects the columns to compare (five interior
    columns by default).
    """
    a, b = np.atleast_2d(np.asarray(a, float)), np.atleast_2d(np.asarray(b, float))
    if a.shape[1] != b.shape[1]:
        raise ValueError("ensembles are on different grids")
    if len(a) < min_replicates or len(b) < min_replicates:
        raise UnderpoweredError(f"need >= {min_replicates} replicates per side, got {len(a)} and {len(b)}")
    coords = _default_coordinates(a.shape[1]) if coordinates is None else tuple(coordinates)
    a, b = a[:, coords], b[:, coords]
    ks = tuple(float(ks_2samp(a[:, j], b[:, j]).statistic) for j in range(len(coords)))

    na, nb = len(a), len(b)
    N = na + nb
    D = _pooled_distances(a, b)
    total = D.sum()
    s_aa = D[:na, :na].sum()
    s_ab = D[:na, na:].sum()
    observed = _energy_from_blocks(s_aa, s_ab, total - 2 * s_ab - s_aa, na, nb)

    rng = stream(seed, tuple(stream_prefix) + (PERM_STREAM,))
    Z = np.zeros((N, permutations))
    for j in range(permutations):
        Z[rng.permutation(N)[:na], j] = 1.0
    DZ = D @ Z
    p_aa = np.einsum("ij,ij->j", Z, DZ)
    p_ab = Z.T @ D.sum(axis=1) - p_aa
    p_bb = total - 2 * p_ab - p_aa
    perm = _energy_from_blocks(p_aa, p_ab, p_bb, na, nb)
    # small relative slack so ties from rounding count as ties
    exceed = int(np.count_nonzero(perm >= observed * (1 - 1e-12)))
    pvalue = (1 + exceed) / (1 + permutations)
    return FddReport(ks, max(ks), float(observed), float(pvalue), int(permutations), coords)


def write_covariance_csv(cov, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([repr(float(x)) for x in cov.grid.points])
        for row in cov.matrix:
            w.writerow([repr(float(v)) for v in row])


def read_covariance_csv(path):
    """Return (grid points, matrix) from :func:`write_covariance_csv` output."""
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh)]
    return np.array(rows[0]), np.array(rows[1:])
