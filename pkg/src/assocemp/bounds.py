"""Executable exponent arithmetic and chaining bounds for the tightness argument.

Everything here is plain floating-point arithmetic on explicit formulas:
the admissible range for the moment order p, the exponents of the
increment moment bound, the dyadic schedule (m_n, r), the finite chaining
sum and the covariance-sum bound used for increments.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import ParameterError

__all__ = [
    "ALPHA_THRESHOLD",
    "AdmissibleInterval",
    "ChainingSchedule",
    "IncrementCovSum",
    "admissible_p_interval",
    "lemma1_exponents",
    "chaining_schedule",
    "chaining_tail_value",
    "chaining_increment_part",
    "chaining_increment_envelope",
    "chaining_moment_part",
    "chaining_moment_envelope",
    "zeta_tail",
    "increment_cov_sum_bound",
    "exponent_table",
]

#: smallest covariance-decay exponent for which the p-interval is nonempty
ALPHA_THRESHOLD = (5.0 + math.sqrt(17.0)) / 4.0
#: interval widths at or below this count as empty (rounding at the threshold)
EMPTY_TOL = 1e-12


@dataclass(frozen=True)
class AdmissibleInterval:
    alpha: float
    lower: float
    upper: float

    @property
    def empty(self):
        return not self.upper - self.lower > EMPTY_TOL

    def __contains__(self, p):
        return self.lower < p < self.upper

    def midpoint(self):
        return 0.5 * (self.lower + self.upper)


def admissible_p_interval(alpha):
    """Open interval ((alpha+1) v 2alpha/(alpha-1), 2alpha-1) of usable p."""
    alpha = float(alpha)
    if not alpha > 1.0:
        raise ParameterError(f"alpha must exceed 1, got {alpha}")
    lower = max(alpha + 1.0, 2.0 * alpha / (alpha - 1.0))
    upper = 2.0 * alpha - 1.0
    iv = AdmissibleInterval(alpha, lower, upper)
    if not iv.empty:
        p = iv.midpoint()
        assert p / 2 - alpha > 1 - p / 2
        assert alpha > (p + 1) / 2
    return iv


def _check_lemma_params(p, nu, alpha):
    if not p > 2.0:
        raise ParameterError(f"p must exceed 2, got {p}")
    if not nu > 0.0:
        raise ParameterError(f"nu must be positive, got {nu}")
    if not alpha > 1.0:
        raise ParameterError(f"alpha must exceed 1, got {alpha}")


def lemma1_exponents(p, nu, alpha):
    """Return (exponent of n, exponent of |t - s|) in the increment moment bound."""
    _check_lemma_params(p, nu, alpha)
    return max(p / 2.0 - alpha, 1.0 + nu - p / 2.0), (1.0 - 1.0 / alpha) * p / 2.0


@dataclass(frozen=True)
class ChainingSchedule:
    n: int
    nu: float
    p: float
    m_n: int
    r: float
    d: int
    beta: float


def chaining_schedule(n, nu, p, *, alpha=None, d=1):
    """Dyadic depth m_n = floor(log2 n^(1/2+nu)) v 1 and ratio r = 2^(-nu/p).

    ``beta = (1 - 1/alpha) p / 2`` is filled in when ``alpha`` is given.
    """
    n, nu, p = int(n), float(nu), float(p)
    if n < 1 or nu <= 0 or p <= 2:
        raise ParameterError("need n >= 1, nu > 0, p > 2")
    expo = (0.5 + nu) * math.log2(n)
    # absorb rounding in e.g. 0.6 * log2(1024)
    m_n = max(int(math.floor(expo + 1e-12)), 1)
    assert 2.0**m_n <= 2.0 * n ** (0.5 + nu) * (1 + 1e-12)
    r = 2.0 ** (-nu / p)
    beta = (1.0 - 1.0 / alpha) * p / 2.0 if alpha is not None else float("nan")
    return ChainingSchedule(n, nu, p, m_n, r, int(d), beta)


def chaining_tail_value(d, m_n, n, p, nu, alpha, K, epsilon, r):
    """Finite chaining sum bounding the modulus probability at coarse scale d.

    sum_{k=1}^{m_n-d} 2^(d+k) K 2^p [n^e1 + 2^(-(d+k) e2)] / (r^(p(k-1)) eps^p (1-r)^p)
    with (e1, e2) from :func:`lemma1_exponents`.  Returns 0 when d >= m_n.
    """
    if d >= m_n:
        return 0.0
    e1, e2 = lemma1_exponents(p, nu, alpha)
    k = np.arange(1, m_n - d + 1, dtype=float)
    terms = 2.0 ** (d + k) * (n**e1 + 2.0 ** (-(d + k) * e2)) / r ** (p * (k - 1))
    return float(K * 2.0**p * np.sum(terms) / (epsilon**p * (1.0 - r) ** p))


def chaining_increment_part(d, m_n, beta, p, r):
    """sum_k 2^(d+k) (2^(-d-k))^beta r^(-p(k-1)), the increment term without constants."""
    k = np.arange(1, max(m_n - d, 0) + 1, dtype=float)
    return float(np.sum(2.0 ** ((d + k) * (1.0 - beta)) * r ** (-p * (k - 1))))


def chaining_increment_envelope(d, beta, nu):
    """2^(d(1-beta)) sum_{k>=1} 2^((1-beta+nu)k); infinite unless 1 - beta + nu < 0."""
    q = 2.0 ** (1.0 - beta + nu)
    if q >= 1.0:
        return math.inf
    return 2.0 ** (d * (1.0 - beta)) * q / (1.0 - q)


def chaining_moment_part(d, m_n, n, p, nu, alpha, r):
    """sum_k 2^k r^(-p(k-1)) n^e1, the moment term without 2^d and constants."""
    e1, _ = lemma1_exponents(p, nu, alpha)
    k = np.arange(1, max(m_n - d, 0) + 1, dtype=float)
    return float(np.sum(2.0**k * r ** (-p * (k - 1))) * n**e1)


def chaining_moment_envelope(n, p, nu, alpha):
    """2^(1+nu) n^(1/2 + 3nu/2 + nu^2 + p/2 - alpha)."""
    return 2.0 ** (1.0 + nu) * n ** (0.5 + 1.5 * nu + nu * nu + p / 2.0 - alpha)


def zeta_tail(alpha, start, rtol=1e-12):
    """sum_{k >= start} k^(-alpha) for alpha > 1.

    Direct summation up to a cutoff N, then the Euler-Maclaurin remainder
    N^(1-a)/(a-1) - N^(-a)/2 + a N^(-a-1)/12, whose neglected part is below
    rtol relative to the result.
    """
    alpha = float(alpha)
    start = max(int(start), 1)
    if alpha <= 1.0:
        raise ParameterError("series diverges for alpha <= 1")
    # remainder error ~ a(a+1)(a+2) N^(-a-3) / 720
    head_guess = start ** (1.0 - alpha) / (alpha - 1.0) + start**-alpha
    need = (alpha * (alpha + 1) * (alpha + 2) / 720.0 / (0.01 * rtol * head_guess)) ** (1.0 / (alpha + 3))
    cutoff = max(start, int(math.ceil(need)) + 1) + 8
    k = np.arange(start, cutoff, dtype=float)
    head = float(np.sum(k[::-1] ** -alpha))
    N = float(cutoff)
    rem = N ** (1.0 - alpha) / (alpha - 1.0) + 0.5 * N**-alpha + alpha * N ** (-alpha - 1.0) / 12.0
    return head + rem


@dataclass(frozen=True)
class IncrementCovSum:
    value: float
    A1: float
    split: int

    @property
    def A1_defined(self):
        return not math.isnan(self.A1)


def increment_cov_sum_bound(delta, C, alpha):
    """delta (L + 1) + 16 C sum_{k > L} k^(-alpha) with L = floor(delta^(-1/alpha)).

    Also returns the implied A1 = value / delta^(1 - 1/alpha) (NaN at delta = 0).
    """
    delta, C, alpha = float(delta), float(C), float(alpha)
    if not 0.0 <= delta <= 1.0:
        raise ParameterError("delta must lie in [0, 1]")
    if C <= 0 or alpha <= 1:
        raise ParameterError("need C > 0 and alpha > 1")
    if delta == 0.0:
        return IncrementCovSum(0.0, float("nan"), -1)
    split = int(math.floor(delta ** (-1.0 / alpha) * (1 + 1e-15)))
    value = delta * (split + 1) + 16.0 * C * zeta_tail(alpha, split + 1)
    return IncrementCovSum(value, value / delta ** (1.0 - 1.0 / alpha), split)


def exponent_table(alpha, nu, n_values=(2**8, 2**12, 2**16, 2**20), p=None):
    """Rows describing admissibility, exponents and schedule for one (alpha, nu).

    Each row is a dict; with ``p=None`` the midpoint of the admissible
    interval is used (or no p rows when it is empty).
    """
    iv = admissible_p_interval(alpha)
    rows = []
    base = {"alpha": alpha, "nu": nu, "p_lower": iv.lower, "p_upper": iv.upper, "admissible": not iv.empty}
    if p is None:
        if iv.empty:
            return [dict(base, p=float("nan"))]
        p = iv.midpoint()
    e1, e2 = lemma1_exponents(p, nu, alpha)
    for n in n_values:
        sch = chaining_schedule(n, nu, p, alpha=alpha)
        rows.append(dict(base, p=p, n_exponent=e1, delta_exponent=e2, n=n, m_n=sch.m_n, r=sch.r, beta=sch.beta))
    return rows
