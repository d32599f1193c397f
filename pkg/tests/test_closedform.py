import math
import warnings

import numpy as np
import pytest
from scipy import integrate, special

from ntnscp import closedform as cf
from ntnscp.model import Hop, Layer, Route, Scenario, reference_layer, reference_layers, random_route, PER_KM2
from ntnscp.specfun import DomainError, marcum_q1


def test_moment_match_k9():
    s = cf.moment_match([Hop("L", 1, 9.0), Hop("L", 2, 9.0)])
    assert s.shape == pytest.approx(4 / 0.38, rel=1e-12)
    assert s.scale == pytest.approx(0.19, rel=1e-12)


def test_moment_match_rayleigh_is_erlang():
    s = cf.moment_match([Hop("L", 1, 0.0)] * 5)
    assert (s.shape, s.scale) == (pytest.approx(5.0), pytest.approx(1.0))


def test_moment_match_rejects_mixed_layers():
    with pytest.raises(DomainError):
        cf.moment_match([Hop("A", 1, 0), Hop("B", 1, 0)])
    with pytest.raises(DomainError):
        cf.moment_match([])


def test_golden_section_quadratic():
    assert cf.golden_section(lambda a: (a - 1.234) ** 2, 0.0, 5.0, 1e-8) == pytest.approx(1.234, abs=1e-7)


def test_fit_recovers_single_hop_exactly(unit_layer):
    hop = Hop("U", 3.0, 8.0)
    fit = cf.fit_marcum_a_hat([hop], unit_layer, grid=np.logspace(-3, 1, 200))
    assert fit.a_hat == pytest.approx(4.0, abs=2e-4)


def test_fit_matches_brute_force_scan():
    layer = reference_layer("Ground")
    hops = [Hop("Ground", 12e3, 4.0), Hop("Ground", 25e3, 6.5), Hop("Ground", 18e3, 3.0)]
    fit = cf.fit_marcum_a_hat(hops, layer)
    target = cf.marcum_product(hops, layer)
    bx = np.sqrt(fit.b_hat_sq_coeff * cf.FIT_GRID)
    scan = np.linspace(0, 3 * math.sqrt(13.0), 2001)
    sse = [np.sum((marcum_q1(a, bx) - target) ** 2) for a in scan]
    assert fit.a_hat == pytest.approx(scan[int(np.argmin(sse))], abs=scan[1] - scan[0])


def test_fit_rayleigh_regime_gives_zero(unit_layer):
    fit = cf.fit_marcum_a_hat([Hop("U", 1, 0.0)] * 2, unit_layer)
    assert fit.a_hat == 0.0
    with pytest.raises(cf.SingularCoefficientError):
        cf.layer_scp_rician([Hop("U", 1, 0.0)] * 2, unit_layer)


def test_fit_warns_at_bracket_end(unit_layer, monkeypatch):
    monkeypatch.setattr(cf, "golden_section", lambda f, lo, hi, tol: hi)
    with pytest.warns(cf.FitRegimeWarning):
        cf.fit_marcum_a_hat([Hop("U", 1.0, 1.0), Hop("U", 2.0, 1.0)], unit_layer)


def test_fit_quiet_on_reference_routes():
    layers = reference_layers()
    rng = np.random.default_rng(5)
    with warnings.catch_warnings():
        warnings.simplefilter("error", cf.FitRegimeWarning)
        for _ in range(20):
            sc = Scenario(tuple(layers), random_route(layers, (2, 7), rng))
            for layer, hops in sc.groups():
                cf.fit_marcum_a_hat(hops, layer)


def test_kappa_rician_value():
    layer = Layer("U", 4.0, 1 / math.pi, 0.0)
    k = cf.kappa_rician(cf.GammaSurrogate(1.0, 1.0), cf.MarcumCollapse(math.sqrt(2.0), 1.0), layer)
    assert k == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-12)


def test_kappa_rician_zero_density():
    layer = Layer("U", 4.0, 0.0, 0.0)
    assert cf.kappa_rician(cf.GammaSurrogate(1.0, 1.0), cf.MarcumCollapse(0.0, 1.0), layer) == 0.0


def test_rayleigh_unit_case():
    layer = Layer("U", 4.0, 1 / math.pi, 0.0)
    sc = Scenario((layer,), Route([Hop("U", 1.0, 0.0)]))
    assert cf.scp_rayleigh_multihop(sc) == pytest.approx(math.exp(-math.pi / 2), rel=1e-12)
    assert cf.scp_rayleigh_singlehop(sc) == pytest.approx(math.exp(-math.pi / 2), rel=1e-12)
    assert cf.scp_erlang_multihop(sc) == pytest.approx(math.exp(-math.pi / 2), rel=1e-12)


def test_rayleigh_single_hop_against_integral():
    # the baseline is exp(-lambda * int_R2 P(Eve beats link) dA), fades averaged inside
    alpha, lam, d = 3.0, 1e-3, 4.0

    def beat(r):
        # Eve gain / r^alpha > link gain / d^alpha with both Exp(1)
        return 1.0 / (1.0 + (r / d) ** alpha)

    val, _ = integrate.quad(lambda r: beat(r) * 2 * math.pi * r, 0, np.inf)
    layer = Layer("U", alpha, lam, 0.0)
    sc = Scenario((layer,), Route([Hop("U", d, 0.0)]))
    assert cf.scp_rayleigh_multihop(sc) == pytest.approx(math.exp(-lam * val), rel=1e-8)


def test_erlang_kappa_value():
    layer = Layer("U", 2.5, 1e-3, 0.0)
    t = 0.8
    expected = math.pi * 1e-3 * special.gamma(1 - t) * special.gamma(3 + t) / special.gamma(3)
    assert cf.kappa_erlang(layer, 3) == pytest.approx(expected, rel=1e-12)


def test_rician_scp_independent_of_power_scale():
    # P/n0 cancels in kappa * A apart from the grid position; shift the grid with it
    layer = reference_layer("Sea", eve_density=1e-7 * PER_KM2)
    hops = [Hop("Sea", 12e3, 15.0), Hop("Sea", 22e3, 20.0)]
    base = cf.layer_scp_rician(hops, layer)
    scaled = Layer("Sea", layer.alpha, layer.eve_density, 12.7, tx_power=layer.tx_power * 100,
                   noise_power=layer.noise_power, link_distance_range=layer.link_distance_range)
    moved = cf.layer_scp_rician(hops, scaled, grid=cf.FIT_GRID * 100)
    assert moved.scp == pytest.approx(base.scp, rel=1e-6)


@pytest.mark.parametrize("model", cf.MODELS)
def test_zero_density_is_secure(model):
    layers = reference_layers(0.0)
    sc = Scenario(tuple(layers), random_route(layers, (3, 3), np.random.default_rng(3)))
    assert cf.end_to_end(sc, model) == 1.0


@pytest.mark.parametrize("model", ["rician", "rayleigh_multi", "erlang"])
def test_scp_decreases_with_density(model):
    layers = reference_layers()
    route = random_route(layers, (4, 4), np.random.default_rng(11))
    vals = [cf.end_to_end(Scenario(tuple(layers), route).with_density(lam * PER_KM2), model)
            for lam in (1e-9, 1e-7, 1e-5)]
    assert vals[0] > vals[1] > vals[2]


def test_end_to_end_is_product_of_layers(reference_scenario):
    layers = cf.per_layer_scp(reference_scenario.with_density(1e-6 * PER_KM2), "rician")
    prod = math.prod(v.scp for v in layers.values())
    assert cf.end_to_end(reference_scenario.with_density(1e-6 * PER_KM2)) == pytest.approx(prod, rel=1e-12)


def test_huge_distances_do_not_overflow():
    layer = Layer("F", 2.1, 1e-30, 10.0, tx_power=1.0, noise_power=1e-300)
    hops = [Hop("F", 1e150, 10.0)] * 3
    out = cf.layer_scp_rayleigh_multihop(hops, layer)
    assert math.isfinite(out.exponent)
