"""Empirical processes of sample paths and moment statistics of their increments.

For a path X_1..X_n with continuous marginal F the process is evaluated on
the uniform scale, U_i = F(X_i), so that on a grid of points x in [0, 1]

    G_n(x) = n^(-1/2) sum_i (1{U_i <= x} - x).
"""

from dataclasses import dataclass, field
import csv
import math

import numpy as np

from .bounds import lemma1_exponents
from .errors import EmptyInputError, GridError, NeedReplicatesError, ParameterError
from .sequence_gen import PathEnsemble, SamplePath

__all__ = [
    "EvaluationGrid",
    "uniform_grid",
    "dyadic_grid",
    "custom_grid",
    "EmpiricalProcessSample",
    "MomentBoundParams",
    "MomentEstimate",
    "ModulusStats",
    "BoundFit",
    "compute_empirical_process",
    "empirical_process_matrix",
    "sup_norm_statistic",
    "jackknife_mean",
    "increment_moment_estimate",
    "lemma1_bound_value",
    "fit_bound_constant",
    "dyadic_modulus",
    "write_moment_table",
    "MOMENT_COLUMNS",
]


@dataclass(frozen=True, eq=False)
class EvaluationGrid:
    points: np.ndarray
    kind: str
    size: int

    def __post_init__(self):
        pts = self.points
        if pts.ndim != 1 or len(pts) == 0:
            raise GridError("grid must be a nonempty 1-d array")
        if pts[0] < 0.0 or pts[-1] > 1.0 or np.any(np.diff(pts) <= 0):
            raise GridError("grid points must be strictly increasing within [0, 1]")

    def __len__(self):
        return len(self.points)


def uniform_grid(M):
    """Points i/M, i = 0..M."""
    M = int(M)
    if M < 1:
        raise GridError("M must be >= 1")
    return EvaluationGrid(np.arange(M + 1) / M, "uniform", M)


def dyadic_grid(m):
    """Points j 2^(-m), j = 0..2^m (exact in binary floating point)."""
    m = int(m)
    if m < 0 or m > 40:
        raise GridError("dyadic level must be in 0..40")
    return EvaluationGrid(np.arange(2**m + 1) * 2.0**-m, "dyadic", m)


def custom_grid(points):
    return EvaluationGrid(np.asarray(points, dtype=float), "custom", len(points))


@dataclass(frozen=True, eq=False)
class EmpiricalProcessSample:
    grid: EvaluationGrid
    values: np.ndarray
    n: int
    replicate: int = 0


def _uniform_scale(path):
    if isinstance(path, SamplePath):
        return np.asarray(path.marginal.to_uniform(path.values), dtype=float), path.replicate
    return np.asarray(path, dtype=float), 0


def compute_empirical_process(path, grid):
    """G_n on ``grid`` for one path (a :class:`SamplePath` or an array on the uniform scale)."""
    u, rep = _uniform_scale(path)
    n = len(u)
    if n == 0:
        raise EmptyInputError("empty path")
    x = grid.points
    counts = np.searchsorted(np.sort(u), x, side="right")
    return EmpiricalProcessSample(grid, (counts - n * x) / math.sqrt(n), n, rep)


def empirical_process_matrix(ensemble, grid):
    """G_n on ``grid`` for every replicate; returns an (R, len(grid)) array.

    Counts come from binning each value into the grid cell it first falls
    under, then a cumulative sum, so the result is identical to
    :func:`compute_empirical_process` row by row.
    """
    u = ensemble.uniform_values() if isinstance(ensemble, PathEnsemble) else np.atleast_2d(ensemble)
    R, n = u.shape
    if n == 0:
        raise EmptyInputError("empty paths")
    x = grid.points
    m = len(x)
    # index of the first grid point >= u; values above the grid land in bin m
    idx = np.searchsorted(x, u, side="left")
    idx += (np.arange(R) * (m + 1))[:, None]
    counts = np.bincount(idx.ravel(), minlength=R * (m + 1)).reshape(R, m + 1)
    counts = np.cumsum(counts[:, :m], axis=1)
    return (counts - n * x) / math.sqrt(n)


def sup_norm_statistic(sample):
    values = sample.values if isinstance(sample, EmpiricalProcessSample) else np.asarray(sample)
    if values.size == 0:
        raise EmptyInputError("empty sample")
    return float(np.max(np.abs(values), axis=-1)) if values.ndim == 1 else np.max(np.abs(values), axis=-1)


@dataclass(frozen=True)
class MomentEstimate:
    estimate: float
    se: float
    replicates: int


def jackknife_mean(samples):
    """Mean of ``samples`` with its delete-one jackknife standard error."""
    x = np.asarray(samples, dtype=float)
    R = len(x)
    if R < 2:
        raise NeedReplicatesError("need at least two replicates")
    total = x.sum()
    loo = (total - x) / (R - 1)
    se = math.sqrt((R - 1) / R * float(np.sum((loo - loo.mean()) ** 2)))
    return float(total / R), se


def _increments(u, s, t):
    n = u.shape[1]
    inside = np.count_nonzero((u > s) & (u <= t), axis=1)
    return (inside - n * (t - s)) / math.sqrt(n)


def increment_moment_estimate(ensemble, s, t, p):
    """Monte Carlo E|G_n(t) - G_n(s)|^p over replicates, with jackknife SE."""
    s, t = float(s), float(t)
    if not 0.0 <= s <= t <= 1.0:
        raise ParameterError("need 0 <= s <= t <= 1")
    u = ensemble.uniform_values() if isinstance(ensemble, PathEnsemble) else np.atleast_2d(ensemble)
    if u.shape[0] < 2:
        raise NeedReplicatesError("need at least two replicates")
    if s == t:
        return MomentEstimate(0.0, 0.0, u.shape[0])
    est, se = jackknife_mean(np.abs(_increments(u, s, t)) ** p)
    return MomentEstimate(est, se, u.shape[0])


@dataclass(frozen=True)
class MomentBoundParams:
    """Parameters (p, nu, alpha, C, K) of the increment moment bound."""

    p: float
    nu: float
    alpha: float
    C: float = 1.0
    K: float = 1.0

    def __post_init__(self):
        if not self.p > 2:
            raise ParameterError("p must exceed 2")
        if not self.nu > 0:
            raise ParameterError("nu must be positive")
        if not self.alpha > 1:
            raise ParameterError("alpha must exceed 1")
        if not self.C > 0:
            raise ParameterError("C must be positive")
        if self.K < 0:
            raise ParameterError("K must be non-negative")

    def bracket(self, n, delta):
        e_n, e_d = lemma1_exponents(self.p, self.nu, self.alpha)
        return float(n) ** e_n + abs(float(delta)) ** e_d


def lemma1_bound_value(params, n, s, t):
    """K (n^((p/2-alpha) v (1+nu-p/2)) + |t-s|^((1-1/alpha) p/2))."""
    if int(n) < 1:
        raise ParameterError("n must be >= 1")
    return params.K * params.bracket(n, t - s)


MOMENT_COLUMNS = ("n", "s", "t", "p", "estimate", "se", "bracket", "ratio")


@dataclass(frozen=True)
class BoundFit:
    K_hat: float
    rows: list = field(default_factory=list)

    def k_hat_by_n(self):
        out = {}
        for row in self.rows:
            out[row["n"]] = max(out.get(row["n"], 0.0), row["ratio"])
        return dict(sorted(out.items()))


def fit_bound_constant(ensembles, pairs, p, nu, alpha):
    """Smallest K making every moment estimate sit under K times its bracket.

    Parameters
    ----------
    ensembles : iterable of PathEnsemble
        One ensemble per sample size n.
    pairs : iterable of (s, t)
    p, nu, alpha : float
        Bound parameters; C does not enter the bracket.
    """
    params = MomentBoundParams(p, nu, alpha)
    rows = []
    for ens in ensembles:
        for s, t in pairs:
            m = increment_moment_estimate(ens, s, t, p)
            br = params.bracket(ens.n, t - s)
            rows.append(
                {"n": ens.n, "s": float(s), "t": float(t), "p": float(p), "estimate": m.estimate,
                 "se": m.se, "bracket": br, "ratio": m.estimate / br}
            )
    k_hat = max((r["ratio"] for r in rows), default=0.0)
    return BoundFit(float(k_hat), rows)


def write_moment_table(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=MOMENT_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(row[k]) if isinstance(row[k], float) else row[k] for k in MOMENT_COLUMNS})


@dataclass(frozen=True)
class ModulusStats:
    k: int
    M_k: float
    n: int


def dyadic_modulus(sample, k):
    """M_k = max_j |G_n(j 2^-k) - G_n((j-1) 2^-k)| over the lattice in [0, 1]."""
    k = int(k)
    if k < 0:
        raise GridError("scale must be >= 0")
    lattice = np.arange(2**k + 1) * 2.0**-k
    pts = sample.grid.points
    pos = np.searchsorted(pts, lattice)
    if np.any(pos >= len(pts)) or np.any(pts[np.minimum(pos, len(pts) - 1)] != lattice):
        raise GridError(f"grid does not contain the dyadic lattice of level {k}")
    vals = sample.values[pos]
    return ModulusStats(k, float(np.max(np.abs(np.diff(vals)))), sample.n)
