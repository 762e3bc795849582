"""Checks of the dependence hypotheses: association, SI, TP2 and covariance bounds.

Exact checks use the Gaussian copula of the latent model; empirical checks
work on simulated ensembles and flag violations beyond a multiple of the
Monte Carlo standard error.
"""

from dataclasses import dataclass, field

import numpy as np

from ._normal import bivariate_normal_cdf, norm_ppf
from .errors import DomainError, EmptyInputError, ParameterError, UnsupportedMarginalError
from .rng import stream  # noqa: F401  (re-exported for callers building probes)
from .sequence_gen import PathEnsemble, sample_paths, uniform_pair_covariance

__all__ = [
    "CopulaGrid",
    "DependenceReport",
    "exact_gaussian_copula",
    "gaussian_copula_grid",
    "independence_copula_grid",
    "si_concavity_report",
    "empirical_copula",
    "tp2_report",
    "indicator_covariance_slack",
    "indicator_covariance_check",
    "association_probe",
    "default_association_family",
    "marginal_covariance_bound_check",
]


@dataclass(frozen=True, eq=False)
class CopulaGrid:
    """Copula values C(i/M, j/M) for i, j = 0..M (rows index u, columns v)."""

    values: np.ndarray

    @property
    def resolution(self):
        return self.values.shape[0] - 1

    def margin_error(self):
        M = self.resolution
        g = np.arange(M + 1) / M
        v = self.values
        return float(max(np.max(np.abs(v[0])), np.max(np.abs(v[:, 0])),
                         np.max(np.abs(v[-1] - g)), np.max(np.abs(v[:, -1] - g))))

    def min_rectangle_mass(self):
        v = self.values
        return float(np.min(v[1:, 1:] - v[:-1, 1:] - v[1:, :-1] + v[:-1, :-1]))


@dataclass(frozen=True)
class DependenceReport:
    check_name: str
    worst_violation: float
    location: tuple
    tolerance: float
    verdict: str
    statistics: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_record(self):
        loc = ",".join(str(i) for i in self.location)
        return (f"check={self.check_name} verdict={self.verdict} "
                f"worst_violation={self.worst_violation!r} location={loc} tolerance={self.tolerance!r}")


def _report(name, worst, location, tol, **stats):
    verdict = "pass" if worst <= tol else "fail"
    return DependenceReport(name, float(worst), tuple(int(i) for i in location), float(tol), verdict, stats)


def exact_gaussian_copula(u, v, rho):
    """Gaussian copula C_rho(u, v) = Phi2(Phi^-1(u), Phi^-1(v); rho)."""
    u, v, rho = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float), np.asarray(rho, float))
    if np.any((u < 0) | (u > 1) | (v < 0) | (v > 1)) or np.any(np.abs(rho) > 1):
        raise DomainError("need u, v in [0, 1] and |rho| <= 1")
    out = bivariate_normal_cdf(norm_ppf(u), norm_ppf(v), rho)
    out = np.asarray(out, dtype=float)
    out = np.where(rho == 0.0, u * v, out)
    out = np.where(rho == 1.0, np.minimum(u, v), out)
    out = np.where(rho == -1.0, np.maximum(u + v - 1.0, 0.0), out)
    # exact margins
    out = np.where(u == 1.0, v, np.where(v == 1.0, u, out))
    out = np.where((u == 0.0) | (v == 0.0), 0.0, out)
    out = np.clip(out, np.maximum(u + v - 1.0, 0.0), np.minimum(u, v))
    return out if out.ndim else float(out)


def gaussian_copula_grid(rho, M):
    g = np.arange(M + 1) / M
    return CopulaGrid(exact_gaussian_copula(g[:, None], g[None, :], rho))


def independence_copula_grid(M):
    g = np.arange(M + 1) / M
    return CopulaGrid(g[:, None] * g[None, :])


def si_concavity_report(copula, tolerance=1e-8, axis="v"):
    """Concavity of C(u, .) (``axis='v'``) or C(., v) (``axis='u'``) by second differences.

    The violation at a node is C(u, v-h) - 2 C(u, v) + C(u, v+h); concavity
    means every such value is <= 0.
    """
    M = copula.resolution
    if M < 3:
        raise ParameterError("copula resolution must be >= 3")
    c = copula.values if axis == "v" else copula.values.T
    second = c[:, :-2] - 2.0 * c[:, 1:-1] + c[:, 2:]
    i, j = np.unravel_index(np.argmax(second), second.shape)
    worst = second[i, j]
    name = "si_concavity" if axis == "v" else "si_concavity_u"
    return _report(name, worst, (i, j + 1), tolerance, min_second_difference=float(second.min()))


def empirical_copula(x, y, M):
    """Empirical copula on the (M+1)^2 grid from ranks, ties broken by index order."""
    x, y = np.asarray(x), np.asarray(y)
    N = len(x)
    if N == 0:
        raise EmptyInputError("no pairs")
    if len(y) != N:
        raise ParameterError("x and y differ in length")
    M = int(M)
    if M < 1 or N < M:
        raise ParameterError("need 1 <= M <= N")
    rank_x = np.empty(N, dtype=np.int64)
    rank_y = np.empty(N, dtype=np.int64)
    rank_x[np.argsort(x, kind="stable")] = np.arange(1, N + 1)
    rank_y[np.argsort(y, kind="stable")] = np.arange(1, N + 1)
    # rank/N <= i/M  <=>  i >= ceil(rank*M/N)
    cell_x = -((-rank_x * M) // N)
    cell_y = -((-rank_y * M) // N)
    counts = np.zeros((M + 1, M + 1))
    np.add.at(counts, (cell_x, cell_y), 1.0)
    return CopulaGrid(np.cumsum(np.cumsum(counts, axis=0), axis=1) / N)


def tp2_report(rho, half_width=4.0, M=200, tolerance=1e-8):
    """Mixed second differences of the log bivariate normal density on [-H, H]^2.

    For the Gaussian the mixed partial is the constant rho / (1 - rho^2),
    so the check passes exactly when rho >= 0.
    """
    rho = float(rho)
    if abs(rho) >= 1.0:
        raise DomainError("bivariate normal density is degenerate at |rho| = 1")
    g = np.linspace(-half_width, half_width, M + 1)
    h = g[1] - g[0]
    x, y = g[:, None], g[None, :]
    logf = -(x * x - 2 * rho * x * y + y * y) / (2 * (1 - rho * rho)) - np.log(2 * np.pi * np.sqrt(1 - rho * rho))
    mixed = (logf[1:, 1:] - logf[1:, :-1] - logf[:-1, 1:] + logf[:-1, :-1]) / (h * h)
    i, j = np.unravel_index(np.argmin(mixed), mixed.shape)
    return _report("tp2", -mixed[i, j], (i, j), tolerance, min_mixed=float(mixed.min()),
                   max_mixed=float(mixed.max()), analytic=rho / (1 - rho * rho))


def indicator_covariance_slack(rho, u1, u2):
    """|C_rho(u1, u2) - u1 u2| - 4 cov(X_0, X_k); non-positive when the bound holds."""
    lhs = np.abs(exact_gaussian_copula(u1, u2, rho) - np.asarray(u1) * np.asarray(u2))
    return lhs - 4.0 * uniform_pair_covariance(rho)


def indicator_covariance_check(model, K_max=50, M=20, tolerance=1e-10):
    """Indicator covariances against four times the uniform covariance, lags 1..K_max.

    Thresholds are the interior points i/(M+1), i = 1..M.
    """
    g = np.arange(1, M + 1) / (M + 1)
    lags = np.arange(1, int(K_max) + 1)
    rho = model.rho(lags)
    slack = indicator_covariance_slack(rho[:, None, None], g[None, :, None], g[None, None, :])
    k, i, j = np.unravel_index(np.argmax(slack), slack.shape)
    worst = slack[k, i, j]
    return _report("indicator_covariance", worst, (lags[k], i, j), tolerance,
                   violations=int(np.count_nonzero(slack > tolerance)))


def _indicator(c):
    def f(block):
        return np.all(block > c, axis=-1).astype(float)
    return f


def _clipped_sum(block):
    return np.clip(block, 0.0, 1.0).sum(axis=-1)


def _clipped_product(block):
    return np.clip(block, 0.0, 1.0).prod(axis=-1)


def default_association_family():
    """Bounded coordinatewise nondecreasing test functions, keyed by name."""
    return {"indicator": _indicator(0.5), "clipped_identity": _clipped_sum, "product": _clipped_product}


def _jackknife_cov(fg, f, g):
    # per-replicate averages; covariance of pooled means with delete-one SE
    R = len(fg)
    sfg, sf, sg = fg.sum(), f.sum(), g.sum()
    est = sfg / R - (sf / R) * (sg / R)
    loo = (sfg - fg) / (R - 1) - ((sf - f) / (R - 1)) * ((sg - g) / (R - 1))
    se = np.sqrt((R - 1) / R * np.sum((loo - loo.mean()) ** 2))
    return float(est), float(se)


def association_probe(ensemble, family=None, lags=(1, 2, 4), sigmas=3.0):
    """Empirical covariances cov(f(X_I), g(X_J)) over disjoint blocks I, J.

    Block pairs are ({t}, {t+L}) and ({t, t+1}, {t+L+1, t+L+2}) for every
    lag L, placed at every start t that fits in the path.  ``f`` and ``g``
    run over the same family member.  Each covariance estimate pools
    placements and replicates; its SE is the replicate jackknife.
    """
    family = default_association_family() if family is None else family
    u = ensemble.uniform_values() if isinstance(ensemble, PathEnsemble) else np.atleast_2d(ensemble)
    R, n = u.shape
    span = max(lags) + 3
    if R < 2 or n < span:
        raise ParameterError(f"ensemble {R}x{n} too small for blocks spanning {span}")
    worst, where, rows = -np.inf, (0, 0, 0), []
    for li, L in enumerate(lags):
        for bi, (I, J) in enumerate((((0,), (L,)), ((0, 1), (L + 1, L + 2)))):
            last = max(I + J)
            starts = np.arange(0, n - last)
            bI = np.stack([u[:, starts + i] for i in I], axis=-1)
            bJ = np.stack([u[:, starts + j] for j in J], axis=-1)
            for fi, (name, fn) in enumerate(family.items()):
                fv, gv = fn(bI), fn(bJ)
                est, se = _jackknife_cov((fv * gv).mean(axis=1), fv.mean(axis=1), gv.mean(axis=1))
                rows.append({"lag": L, "block": len(I), "function": name, "cov": est, "se": se})
                # violation in units of the allowed band
                viol = -est - sigmas * se
                if viol > worst:
                    worst, where = viol, (li, bi, fi)
    report = _report("association", worst, where, 0.0, min_cov=min(r["cov"] for r in rows))
    report.statistics["table"] = rows
    return report


def _lag_covariances(x, mean, K_max):
    R, n = x.shape
    xc = x - mean
    out = np.empty((R, K_max))
    for k in range(1, K_max + 1):
        out[:, k - 1] = np.einsum("ij,ij->i", xc[:, :-k], xc[:, k:]) / (n - k)
    return out


def marginal_covariance_bound_check(model, marginal, K_max=20, n=100_000, replicates=100, seed=0,
                                    sigmas=3.0, threads=1, stream_prefix=()):
    """Monte Carlo check of cov(F(X_0), F(X_k)) <= a^2 cov(X_0, X_k) for k <= K_max.

    Both sides come from the same simulated ensemble; the per-replicate
    difference gives the combined standard error.
    """
    if not marginal.finite_variance:
        raise UnsupportedMarginalError(f"{marginal.name} has infinite variance")
    if marginal.density_bound is None:
        raise UnsupportedMarginalError(f"{marginal.name} has no density bound")
    a = float(marginal.density_bound)
    ens = sample_paths(model, marginal, n, replicates, seed, threads=threads, stream_prefix=stream_prefix)
    x = ens.values
    mean_x = marginal.mean if marginal.mean is not None else float(x.mean())
    cov_x = _lag_covariances(x, mean_x, K_max)
    if marginal.is_uniform:
        cov_u = cov_x
    else:
        cov_u = _lag_covariances(ens.uniform_values(), 0.5, K_max)
    diff = cov_u - a * a * cov_x
    d_mean = diff.mean(axis=0)
    d_se = diff.std(axis=0, ddof=1) / np.sqrt(replicates)
    excess = d_mean - sigmas * d_se
    k = int(np.argmax(excess))
    return _report("marginal_covariance_bound", excess[k], (k + 1,), 0.0,
                   lhs=cov_u.mean(axis=0).tolist(), rhs=(a * a * cov_x.mean(axis=0)).tolist(),
                   se=d_se.tolist(), samples=n * replicates)
