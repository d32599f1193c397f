"""Special functions and fading samplers.

Marcum Q1 is evaluated by the Poisson-mixture series

    Q1(a, b) = sum_k  Pois(k; a^2/2) * P(Pois(b^2/2) <= k)

truncated to a window of k that holds all but ``TAIL`` of the Poisson(a^2/2)
mass. Every term of the second factor lies in [0, 1], so the discarded mass
is a rigorous bound on the absolute truncation error.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special, stats

TAIL = 1e-17
MAX_TERMS = 10_000

# supported regime of confluent_m
_M_A_RANGE = (0.0, 5.0)
_M_Z_MAX = 200.0


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class UnsupportedRangeError(ValueError):
    """Argument inside the domain but outside the validated regime."""


def _check_nonneg_finite(name, x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} must be finite")
    if np.any(x < 0):
        raise DomainError(f"{name} must be nonnegative")
    return x


def _poisson_window(mu):
    """Inclusive k-range holding all but ~2*TAIL of Poisson(mu) mass."""
    if mu == 0.0:
        return 0, 0
    sd = math.sqrt(mu)
    lo = max(int(mu - 9.0 * sd), 0)
    while lo > 0 and special.pdtr(lo - 1, mu) > TAIL:
        lo = max(lo - int(sd) - 1, 0)
    hi = int(mu + 9.0 * sd) + 40
    while special.pdtrc(hi, mu) > TAIL:
        hi += int(sd) + 1
    return lo, hi


def _q1_series(a, b):
    """Series evaluation for scalar a and array b (flattened)."""
    mu = 0.5 * a * a
    y = 0.5 * b * b
    lo, hi = _poisson_window(mu)
    k = np.arange(lo, hi + 1, dtype=float)
    if mu == 0.0:
        log_w = np.zeros(1)
    else:
        log_w = -mu + k * math.log(mu) - special.gammaln(k + 1.0)
    w = np.exp(log_w)

    # S_k(y) = P(Pois(y) <= k): one incomplete-gamma call at k=lo, then the
    # upward recurrence S_k = S_{k-1} + pmf(k; y).
    out = np.empty_like(y)
    pos = y > 0
    out[~pos] = 1.0
    if np.any(pos):
        yp = y[pos][:, None]
        s0 = special.gammaincc(lo + 1.0, yp[:, 0])
        kk = k[1:][None, :]
        log_pmf = -yp + kk * np.log(yp) - special.gammaln(kk + 1.0)
        s = np.concatenate([s0[:, None], s0[:, None] + np.cumsum(np.exp(log_pmf), axis=1)], axis=1)
        np.minimum(s, 1.0, out=s)
        out[pos] = s @ w
    return np.clip(out, 0.0, 1.0), len(k)


def _q1_asymptotic(a, b):
    # R = |a + X + iY| ~ a + X + Y^2/(2a) for large a
    d = b - a
    return np.clip(0.5 * special.erfc(d / math.sqrt(2.0)) + stats.norm.pdf(d) / (2.0 * a), 0.0, 1.0)


def marcum_q1(a, b):
    """First-order Marcum Q-function Q1(a, b).

    Equals the survival function of a non-central chi-squared variable with
    two degrees of freedom and non-centrality ``a**2``, evaluated at ``b**2``.
    Broadcasts over ``a`` and ``b``; returns a float for scalar input.
    """
    a = _check_nonneg_finite("a", a)
    b = _check_nonneg_finite("b", b)
    a_b, b_b = np.broadcast_arrays(a, b)
    out = np.empty(a_b.shape, dtype=float)
    flat_a = a_b.ravel()
    flat_b = b_b.ravel()
    flat_out = out.reshape(-1)
    for av in np.unique(flat_a):
        sel = flat_a == av
        lo, hi = _poisson_window(0.5 * av * av)
        if hi - lo + 1 > MAX_TERMS:
            flat_out[sel] = _q1_asymptotic(av, flat_b[sel])
        else:
            flat_out[sel] = _q1_series(float(av), flat_b[sel])[0]
    if out.ndim == 0:
        return float(out)
    return out


def marcum_p1(a, b):
    """1 - Q1(a, b), summed directly so small values keep their relative accuracy.

    Uses sum_k Pois(k; a^2/2) * P(k + 1, b^2/2) over the same window as
    :func:`marcum_q1`. Scalar ``a`` only.
    """
    a = float(_check_nonneg_finite("a", a))
    b = _check_nonneg_finite("b", b)
    mu = 0.5 * a * a
    lo, hi = _poisson_window(mu)
    if hi - lo + 1 > MAX_TERMS:
        return 1.0 - marcum_q1(a, b)
    k = np.arange(lo, hi + 1, dtype=float)
    w = np.exp(-mu + k * math.log(mu) - special.gammaln(k + 1.0)) if mu > 0 else np.ones(1)
    y = 0.5 * np.asarray(b, dtype=float) ** 2
    out = np.clip(special.gammainc(k + 1.0, y[..., None]) @ w, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def regularized_lower_gamma(shape, x):
    """P(shape, x) = gamma(shape, x) / Gamma(shape)."""
    shape = np.asarray(shape, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(~(shape > 0)):
        raise DomainError("shape must be positive")
    if np.any(~(x >= 0)):
        raise DomainError("x must be nonnegative")
    out = special.gammainc(shape, x)
    return float(out) if np.ndim(out) == 0 else out


def ln_gamma(x):
    """log Gamma(x) for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)) or not np.all(np.isfinite(x)):
        raise DomainError("ln_gamma needs finite x > 0")
    out = special.gammaln(x)
    return float(out) if np.ndim(out) == 0 else out


def confluent_m(a, b, z):
    """Kummer's function M(a, b, z), validated for a in [0, 5], b = 1, |z| <= 200."""
    if not (b > 0):
        raise DomainError("b must be positive")
    if not (_M_A_RANGE[0] <= a <= _M_A_RANGE[1]) or b != 1 or abs(z) > _M_Z_MAX:
        raise UnsupportedRangeError(f"confluent_m({a}, {b}, {z}) outside validated regime")
    return float(special.hyp1f1(a, b, z))


def sample_rician_power(k_factor, rng, size=None):
    """Draw |h|^2 for unit-mean Rician fading with linear K-factor.

    The LOS amplitude sqrt(K/(K+1)) is split equally between the I and Q
    arms; each arm carries scatter variance 1/(2(K+1)).
    """
    k = np.asarray(k_factor, dtype=float)
    if np.any(k < 0) or not np.all(np.isfinite(k)):
        raise DomainError("k_factor must be finite and nonnegative")
    mean_arm = np.sqrt(k / (2.0 * (k + 1.0)))
    sd_arm = np.sqrt(1.0 / (2.0 * (k + 1.0)))
    if size is None:
        size = k.shape
    i_arm = mean_arm + sd_arm * rng.standard_normal(size)
    q_arm = mean_arm + sd_arm * rng.standard_normal(size)
    out = i_arm * i_arm + q_arm * q_arm
    return float(out) if np.ndim(out) == 0 else out


def rician_power_isf(prob, k_factor):
    """Inverse survival function of the unit-mean Rician power gain."""
    k = float(k_factor)
    scale = 1.0 / (2.0 * (k + 1.0))
    if k == 0.0:
        return float(stats.chi2.isf(prob, 2)) * scale
    return float(stats.ncx2.isf(prob, 2, 2.0 * k)) * scale


def rician_power_sf(x, k_factor):
    """P(|h|^2 > x) for unit-mean Rician power gain."""
    k = np.asarray(k_factor, dtype=float)
    x = np.asarray(x, dtype=float)
    return marcum_q1(np.sqrt(2.0 * k), np.sqrt(2.0 * (k + 1.0) * x))
