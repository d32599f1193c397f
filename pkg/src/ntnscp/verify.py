"""Numerical oracles for the spatial-integral identity, the Marcum-integral
approximation, the exponential-minimum identity, and the accuracy of
collapsing a product of Marcum Q-functions into one.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .closedform import FIT_GRID, fit_marcum_a_hat, marcum_product
from .model import Hop, Layer, sample_k_factor
from .specfun import ln_gamma, marcum_p1, marcum_q1, regularized_lower_gamma

QUAD_ABS = 1e-10
LEMMA2_A = (2.0, 4.0, 6.0, 8.0, 10.0)
# (b_hat, lambda_c, alpha) triples for the monotone-in-a_hat check
LEMMA2_GRID = tuple((b, c, al) for b in (0.5, 1.0, 2.0) for c in (0.5, 1.0, 2.0) for al in (2.1, 2.5, 2.9))


class QuadratureError(ArithmeticError):
    pass


def _quad(f, a, b, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            if np.isinf(b):
                val, err = integrate.quad(f, a, b, epsabs=QUAD_ABS, epsrel=1e-12, limit=500)
            else:
                val, err = integrate.quad(f, a, b, epsabs=QUAD_ABS, epsrel=1e-12, limit=500, points=points)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(str(exc)) from exc
    return val, err


def lemma1_sides(m, alpha, k):
    """(quadrature, closed form) of the plane integral of the gamma tail."""
    if not (m > 0 and alpha > 2 and k > 0):
        raise ValueError("need m > 0, alpha > 2, k > 0")

    def integrand(r):
        return (1.0 - regularized_lower_gamma(m, k * r**alpha)) * r

    r0 = (m / k) ** (1.0 / alpha)
    # gamma tail decays like exp(-k r^alpha); past 12 r0 ... the remainder is
    # bounded by the tail integral starting at s = k (12 r0)^alpha >> m
    lhs = 0.0
    for lo, hi in ((0.0, r0), (r0, 4.0 * r0), (4.0 * r0, np.inf)):
        val, _ = _quad(integrand, lo, hi)
        lhs += val
    lhs *= 2.0 * math.pi
    rhs = math.pi * math.exp(ln_gamma(m + 2.0 / alpha) - ln_gamma(m)) * k ** (-2.0 / alpha)
    return lhs, rhs


def lemma1_residual(m, alpha, k) -> float:
    lhs, rhs = lemma1_sides(m, alpha, k)
    return abs(lhs - rhs) / rhs


def lemma2_sides(a_hat, b_hat, lambda_c, alpha):
    """(quadrature, approximation) of the Marcum-Q weighted integral.

    With u = x^(-2/alpha) the integral becomes
    (alpha/2) * int_0^inf exp(-lambda_c u) [1 - Q1(a_hat, b_hat u^(-alpha/4))] du.
    """
    if not (a_hat > 0 and b_hat > 0 and lambda_c > 0 and alpha > 2):
        raise ValueError("need a_hat, b_hat, lambda_c > 0 and alpha > 2")
    u0 = (b_hat**2 / a_hat**2) ** (2.0 / alpha)

    def integrand(u):
        if u == 0.0:
            return 0.0
        return math.exp(-lambda_c * u) * marcum_p1(a_hat, b_hat * u ** (-alpha / 4.0))

    # past u_max the integrand is below exp(-60); the remainder is < QUAD_ABS
    u_max = 4.0 * u0 + 60.0 / lambda_c
    # the tail past 4 u0 falls off steeply at first, so split it geometrically
    tail = 4.0 * u0 * 2.0 ** np.arange(1, 64)
    edges = [0.0, 0.25 * u0, 0.8 * u0, 1.25 * u0, 4.0 * u0, *tail[tail < u_max], u_max]
    total = sum(_quad(integrand, lo, hi)[0] for lo, hi in zip(edges, edges[1:]))
    lhs = 0.5 * alpha * total
    rhs = alpha / (2.0 * lambda_c) * (1.0 - math.exp(-lambda_c * u0))
    return lhs, rhs


def lemma2_residual(a_hat, b_hat, lambda_c, alpha) -> float:
    """Signed relative deviation (quadrature - approximation) / approximation."""
    lhs, rhs = lemma2_sides(a_hat, b_hat, lambda_c, alpha)
    return (lhs - rhs) / rhs


def lemma2_profile(b_hat, lambda_c, alpha, a_values=LEMMA2_A):
    """(|deviations| along a_values, strictly decreasing?)."""
    devs = [abs(lemma2_residual(a, b_hat, lambda_c, alpha)) for a in a_values]
    return devs, all(x > y for x, y in zip(devs, devs[1:]))


@dataclass(frozen=True)
class Lemma3Result:
    analytic: float
    empirical: float
    std_error: float

    @property
    def z(self) -> float:
        return abs(self.empirical - self.analytic) / self.std_error if self.std_error > 0 else 0.0


def lemma3_check(rates, c, samples, rng) -> Lemma3Result:
    """E[sum_{i<N} exp(-cX)(cX)^i / i!] for X the minimum of N exponentials."""
    rates = np.asarray(rates, dtype=float)
    if rates.size == 0 or np.any(rates <= 0):
        raise ValueError("rates must be a nonempty list of positive reals")
    n = rates.size
    analytic = 1.0 - (c / (c + rates.sum())) ** n
    x = np.min(rng.exponential(1.0 / rates, size=(samples, n)), axis=1)
    cx = c * x
    term = np.exp(-cx)
    acc = term.copy()
    for i in range(1, n):
        term = term * cx / i
        acc += term
    return Lemma3Result(float(analytic), float(acc.mean()), float(acc.std(ddof=1) / math.sqrt(samples)))


@dataclass(frozen=True)
class MarcumErrorCurve:
    grid: np.ndarray
    mean_abs_error: np.ndarray
    mean_exact: np.ndarray
    mean_approx: np.ndarray

    @property
    def max_error(self) -> float:
        return float(self.mean_abs_error.max())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["grid_x", "mean_abs_error"])
        for x, e in zip(self.grid, self.mean_abs_error):
            w.writerow([repr(float(x)), repr(float(e))])
        return buf.getvalue()


def random_layer_hops(layer: Layer, hop_range, rng) -> list[Hop]:
    n = int(rng.integers(hop_range[0], hop_range[1] + 1))
    return [
        Hop(layer.id, float(rng.uniform(*layer.link_distance_range)), float(sample_k_factor(layer, rng)))
        for _ in range(n)
    ]


def marcum_product_error(layer: Layer, trials=500, hop_range=(2, 7), rng=None, grid=FIT_GRID) -> MarcumErrorCurve:
    """Pointwise mean |exact product - collapsed Q1| over random single-layer routes."""
    if rng is None:
        rng = np.random.default_rng()
    grid = np.asarray(grid, dtype=float)
    err = np.zeros_like(grid)
    exact_sum = np.zeros_like(grid)
    approx_sum = np.zeros_like(grid)
    for _ in range(trials):
        hops = random_layer_hops(layer, hop_range, rng)
        exact = marcum_product(hops, layer, grid)
        fit = fit_marcum_a_hat(hops, layer, grid)
        approx = marcum_q1(fit.a_hat, np.sqrt(fit.b_hat_sq_coeff * grid))
        err += np.abs(exact - approx)
        exact_sum += exact
        approx_sum += approx
    return MarcumErrorCurve(grid, err / trials, exact_sum / trials, approx_sum / trials)
