"""Closed-form secure connection probability (SCP).

Every model has the shape

    P = exp(-sum_l kappa_l * A_l)

with a per-layer coefficient ``kappa_l`` and a distance aggregate ``A_l``.
The heterogeneous-Rician model weights each hop by (K_i + 1) and derives
kappa from a moment-matched gamma surrogate of the eavesdropper gain sum
and a single collapsed Marcum Q-function fitted to the product of per-hop
Marcum Q-functions. The three Rayleigh-family baselines share the same
shape with different coefficients.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Hop, Layer, Scenario
from .specfun import DomainError, ln_gamma, marcum_q1

FIT_GRID = np.logspace(-9, -2, 200)
FIT_TOL = 1e-4
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

MODELS = ("rician", "rayleigh_multi", "rayleigh_single", "erlang")


class SingularCoefficientError(ArithmeticError):
    """kappa diverges because the fitted Marcum amplitude is zero."""


class FitRegimeWarning(RuntimeWarning):
    """The fitted amplitude hit the upper end of its search bracket."""


@dataclass(frozen=True)
class GammaSurrogate:
    shape: float
    scale: float


@dataclass(frozen=True)
class MarcumCollapse:
    a_hat: float
    b_hat_sq_coeff: float


@dataclass(frozen=True)
class LayerScp:
    kappa: float
    scp: float
    exponent: float = 0.0


def moment_match(hops: Sequence[Hop]) -> GammaSurrogate:
    """Gamma (shape, scale) matching mean and variance of sum_i |h_i|^2."""
    if not hops:
        raise DomainError("moment_match needs at least one hop")
    if len({h.layer_id for h in hops}) > 1:
        raise DomainError("moment_match needs hops from a single layer")
    k = np.array([h.k_factor for h in hops])
    mean = float(len(hops))
    var = float(np.sum((2.0 * k + 1.0) / (k + 1.0) ** 2))
    return GammaSurrogate(shape=mean * mean / var, scale=var / mean)


def _b_squared(hops, layer):
    k = np.array([h.k_factor for h in hops])
    d = np.array([h.distance for h in hops])
    return 2.0 * (k + 1.0) * d**layer.alpha / layer.snr_scale


def marcum_product(hops: Sequence[Hop], layer: Layer, x=FIT_GRID):
    """prod_i Q1(sqrt(2K_i), b_i sqrt(x)): P(min_i SNR_i > x)."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    for hop, b2 in zip(hops, _b_squared(hops, layer)):
        out = out * marcum_q1(math.sqrt(2.0 * hop.k_factor), np.sqrt(b2 * x))
    return out


def golden_section(f, lo, hi, tol=FIT_TOL):
    """Minimize a unimodal f on [lo, hi] to an interval of width <= tol."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def fit_marcum_a_hat(hops: Sequence[Hop], layer: Layer, grid=FIT_GRID, tol=FIT_TOL) -> MarcumCollapse:
    """Collapse prod_i Q1(a_i, b_i sqrt(x)) into one Q1(a_hat, b_hat sqrt(x)).

    b_hat^2 is the sum of b_i^2; a_hat minimizes the unweighted squared error
    over ``grid`` by golden-section search on [0, 3 max_i a_i].
    """
    if not hops:
        raise DomainError("fit_marcum_a_hat needs at least one hop")
    b2 = _b_squared(hops, layer)
    b_hat_sq = float(np.sum(b2))
    upper = 3.0 * max(math.sqrt(2.0 * h.k_factor) for h in hops)
    if upper == 0.0:
        return MarcumCollapse(0.0, b_hat_sq)

    target = marcum_product(hops, layer, grid)
    bx = np.sqrt(b_hat_sq * np.asarray(grid))

    def sse(a):
        r = marcum_q1(a, bx) - target
        return float(r @ r)

    a_hat = golden_section(sse, 0.0, upper, tol)
    if upper - a_hat <= tol:
        warnings.warn(
            f"a_hat={a_hat:.4g} reached the search bracket end {upper:.4g}; "
            "the x-grid probably misses the CDF transition",
            FitRegimeWarning,
            stacklevel=2,
        )
    return MarcumCollapse(a_hat, b_hat_sq)


def kappa_rician(surrogate: GammaSurrogate, collapse: MarcumCollapse, layer: Layer) -> float:
    if layer.eve_density == 0.0:
        return 0.0
    if collapse.a_hat <= 0.0:
        raise SingularCoefficientError(
            "a_hat = 0 (Rayleigh regime); use the Erlang or Rayleigh baseline"
        )
    two_over_alpha = 2.0 / layer.alpha
    m = surrogate.shape
    log_ratio = ln_gamma(m + two_over_alpha) - ln_gamma(m)
    log_k = (
        math.log(math.pi * layer.eve_density)
        + log_ratio
        + two_over_alpha * math.log(2.0 * surrogate.scale / collapse.a_hat**2)
    )
    return math.exp(log_k)


def _layer_exponent(kappa, hops, alpha, outer, weighted):
    """kappa * (sum_i w_i d_i^alpha)^outer with outer * alpha = 2.

    The longest hop is factored out, (sum w d^alpha)^outer = d_max^2 S^outer
    with S = sum w (d / d_max)^alpha, so a single unweighted hop gives
    exactly kappa * d^2 and large distances do not overflow.
    """
    if kappa == 0.0:
        return 0.0
    d = np.array([h.distance for h in hops])
    d_max = float(d.max())
    terms = (d / d_max) ** alpha
    if weighted:
        terms = terms * (1.0 + np.array([h.k_factor for h in hops]))
    s = float(terms.sum()) ** outer
    value = kappa * d_max * d_max * s
    if math.isfinite(value) and value > 0.0:
        return value
    return math.exp(math.log(kappa) + 2.0 * math.log(d_max) + math.log(s))


def layer_scp_rician(hops: Sequence[Hop], layer: Layer, grid=FIT_GRID) -> LayerScp:
    if layer.eve_density == 0.0:
        return LayerScp(0.0, 1.0, 0.0)
    surrogate = moment_match(hops)
    collapse = fit_marcum_a_hat(hops, layer, grid)
    kappa = kappa_rician(surrogate, collapse, layer)
    expo = _layer_exponent(kappa, hops, layer.alpha, 2.0 / layer.alpha, True)
    return LayerScp(kappa, math.exp(-expo), expo)


def _check_alpha(layer):
    if not layer.alpha > 2:
        raise DomainError(f"layer {layer.id!r}: alpha must exceed 2 (Gamma(1-2/alpha) pole)")


def kappa_rayleigh(layer: Layer) -> float:
    _check_alpha(layer)
    if layer.eve_density == 0.0:
        return 0.0
    t = 2.0 / layer.alpha
    return math.pi * layer.eve_density * math.exp(ln_gamma(1.0 + t) + ln_gamma(1.0 - t))


def kappa_erlang(layer: Layer, hop_count: int) -> float:
    _check_alpha(layer)
    if layer.eve_density == 0.0:
        return 0.0
    t = 2.0 / layer.alpha
    return math.pi * layer.eve_density * math.exp(
        ln_gamma(1.0 - t) + ln_gamma(hop_count + t) - ln_gamma(hop_count)
    )


def layer_scp_rayleigh_multihop(hops, layer) -> LayerScp:
    kappa = kappa_rayleigh(layer)
    expo = _layer_exponent(kappa, hops, layer.alpha, 2.0 / layer.alpha, False)
    return LayerScp(kappa, math.exp(-expo), expo)


def layer_scp_rayleigh_singlehop(hops, layer) -> LayerScp:
    kappa = kappa_rayleigh(layer)
    expo = _layer_exponent(kappa, hops, 2.0, 1.0, False)
    return LayerScp(kappa, math.exp(-expo), expo)


def layer_scp_erlang(hops, layer) -> LayerScp:
    kappa = kappa_erlang(layer, len(hops))
    expo = _layer_exponent(kappa, hops, layer.alpha, 2.0 / layer.alpha, False)
    return LayerScp(kappa, math.exp(-expo), expo)


_LAYER_FNS = {
    "rician": layer_scp_rician,
    "rayleigh_multi": layer_scp_rayleigh_multihop,
    "rayleigh_single": layer_scp_rayleigh_singlehop,
    "erlang": layer_scp_erlang,
}


def per_layer_scp(scenario: Scenario, model: str = "rician") -> dict[str, LayerScp]:
    fn = _LAYER_FNS[model]
    return {layer.id: fn(hops, layer) for layer, hops in scenario.groups()}


def end_to_end(scenario: Scenario, model: str = "rician") -> float:
    """Product of per-layer SCPs, taken as exp of the summed exponents."""
    layers = per_layer_scp(scenario, model)
    return math.exp(-sum(v.exponent for v in layers.values()))


def end_to_end_scp_rician(scenario: Scenario) -> float:
    return end_to_end(scenario, "rician")


def scp_rayleigh_multihop(scenario: Scenario) -> float:
    return end_to_end(scenario, "rayleigh_multi")


def scp_rayleigh_singlehop(scenario: Scenario) -> float:
    return end_to_end(scenario, "rayleigh_single")


def scp_erlang_multihop(scenario: Scenario) -> float:
    return end_to_end(scenario, "erlang")
