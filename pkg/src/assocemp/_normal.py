"""Univariate and bivariate standard normal distribution functions.

The bivariate CDF uses the one-dimensional reduction

    Phi2(h, k; rho) = Phi(h) Phi(k) + 1/(2 pi) * int_0^{asin rho} f(theta) dtheta,
    f(theta) = exp(-(h^2 + k^2 - 2 h k sin theta) / (2 cos^2 theta)),

integrated by Gauss-Legendre quadrature.  For |rho| close to one the same
integral is taken from the comonotone end instead, after the substitution
theta = pi/2 - s, on panels graded geometrically towards s = 0 where the
integrand has an essential (flat) singularity.
"""

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DomainError

__all__ = ["norm_cdf", "norm_ppf", "bivariate_normal_cdf"]

_INV_2PI = 1.0 / (2.0 * np.pi)
# above this |rho| the integral is taken from the rho = +-1 end
_SWITCH = 0.925

_GL20_X, _GL20_W = np.polynomial.legendre.leggauss(20)
_GL12_X, _GL12_W = np.polynomial.legendre.leggauss(12)


def _graded_nodes(n_panels=24, ratio=0.25):
    """Nodes and weights on [0, 1] for panels [ratio^(j+1), ratio^j]."""
    edges = ratio ** np.arange(n_panels + 1)
    edges[-1] = 0.0
    lo, hi = edges[1:], edges[:-1]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = (mid[:, None] + half[:, None] * _GL12_X[None, :]).ravel()
    w = (half[:, None] * _GL12_W[None, :]).ravel()
    return x, w


_GRADED_X, _GRADED_W = _graded_nodes()


def norm_cdf(x):
    """Standard normal CDF (scipy's ``ndtr``)."""
    return ndtr(x)


def norm_ppf(u):
    """Standard normal quantile (scipy's ``ndtri``)."""
    return ndtri(u)


def _bvn_central(h, k, rho):
    # |rho| <= _SWITCH
    asr = np.arcsin(rho)
    theta = 0.5 * asr[:, None] * (1.0 + _GL20_X[None, :])
    sn = np.sin(theta)
    hk = (h * k)[:, None]
    hs = (0.5 * (h * h + k * k))[:, None]
    integrand = np.exp((sn * hk - hs) / (1.0 - sn * sn))
    integral = 0.5 * asr * np.sum(_GL20_W * integrand, axis=1)
    return ndtr(h) * ndtr(k) + _INV_2PI * integral


def _bvn_upper_positive(h, k, rho):
    # 0 < _SWITCH < rho < 1
    length = np.arccos(rho)
    s = length[:, None] * _GRADED_X[None, :]
    d2 = ((h - k) ** 2)[:, None]
    hk = (h * k)[:, None]
    sin_s = np.sin(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        expo = -d2 / (2.0 * sin_s * sin_s) - hk / (1.0 + np.cos(s))
    expo = np.where(sin_s > 0.0, expo, np.where(d2 > 0.0, -np.inf, -hk / 2.0))
    integral = length * np.sum(_GRADED_W * np.exp(expo), axis=1)
    return ndtr(np.minimum(h, k)) - _INV_2PI * integral


def bivariate_normal_cdf(h, k, rho):
    """P(Z1 <= h, Z2 <= k) for a standard bivariate normal with correlation rho.

    Arguments broadcast against each other.  Infinite limits are allowed;
    NaN raises :class:`DomainError`.  Absolute accuracy is about 1e-12
    over the whole parameter range.
    """
    h, k, rho = np.broadcast_arrays(
        np.asarray(h, dtype=float), np.asarray(k, dtype=float), np.asarray(rho, dtype=float)
    )
    shape = h.shape
    h, k, rho = h.ravel().copy(), k.ravel().copy(), rho.ravel().copy()
    if np.isnan(h).any() or np.isnan(k).any() or np.isnan(rho).any():
        raise DomainError("bivariate_normal_cdf: NaN input")
    if (np.abs(rho) > 1.0).any():
        raise DomainError("bivariate_normal_cdf: |rho| > 1")

    out = np.empty_like(h)
    # infinite limits collapse to univariate probabilities
    finite = np.isfinite(h) & np.isfinite(k)
    hinf = ~finite
    if hinf.any():
        hh, kk = h[hinf], k[hinf]
        val = np.where(hh == np.inf, ndtr(kk), np.where(kk == np.inf, ndtr(hh), 0.0))
        val = np.where((hh == -np.inf) | (kk == -np.inf), 0.0, val)
        out[hinf] = val

    one = finite & (rho == 1.0)
    out[one] = ndtr(np.minimum(h[one], k[one]))
    mone = finite & (rho == -1.0)
    out[mone] = np.maximum(ndtr(h[mone]) - ndtr(-k[mone]), 0.0)

    central = finite & (np.abs(rho) <= _SWITCH)
    if central.any():
        out[central] = _bvn_central(h[central], k[central], rho[central])

    pos = finite & (rho > _SWITCH) & (rho < 1.0)
    if pos.any():
        out[pos] = _bvn_upper_positive(h[pos], k[pos], rho[pos])

    neg = finite & (rho < -_SWITCH) & (rho > -1.0)
    if neg.any():
        # Phi2(h, k; rho) = Phi(h) - Phi2(h, -k; -rho)
        hh, kk = h[neg], k[neg]
        out[neg] = ndtr(hh) - _bvn_upper_positive(hh, -kk, -rho[neg])

    np.clip(out, 0.0, 1.0, out=out)
    return out.reshape(shape) if shape else float(out[0])
