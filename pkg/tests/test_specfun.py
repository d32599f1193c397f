import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from ntnscp.specfun import (
    DomainError,
    UnsupportedRangeError,
    confluent_m,
    ln_gamma,
    marcum_p1,
    marcum_q1,
    regularized_lower_gamma,
    sample_rician_power,
)


def q1_oracle(a, b, dps=40):
    """Marcum series in extended precision, summed until the tail is < 1e-30."""
    with mp.workdps(dps):
        mu = mp.mpf(a) ** 2 / 2
        y = mp.mpf(b) ** 2 / 2
        k0 = int(mu)
        total = mp.mpf(0)
        # sum outward from the Poisson mode so nothing underflows before it counts
        for direction in (range(k0, -1, -1), range(k0 + 1, 10**6)):
            for k in direction:
                w = mp.exp(-mu + k * mp.log(mu) - mp.loggamma(k + 1)) if mu > 0 else mp.mpf(k == 0)
                total += w * mp.gammainc(k + 1, y, mp.inf, regularized=True)
                if k != k0 and w < mp.mpf("1e-30"):
                    break
        return float(total)


def test_q1_identity_zero_amplitude():
    assert marcum_q1(0.0, 2.0) == pytest.approx(math.exp(-2.0), abs=1e-12)


def test_q1_zero_threshold():
    assert marcum_q1(3.0, 0.0) == 1.0


def test_q1_series_value():
    # extended-precision series oracle, tail < 1e-30
    assert marcum_q1(2.0, 1.0) == pytest.approx(0.91810769636940600391, abs=1e-10)


@pytest.mark.parametrize("a", [0.3, 1.0, 4.0, 12.0, 30.0, 50.0])
@pytest.mark.parametrize("b", [0.05, 1.0, 4.5, 12.5, 31.0, 50.0])
def test_q1_against_extended_precision(a, b):
    assert marcum_q1(a, b) == pytest.approx(q1_oracle(a, b), abs=1e-10)


@given(st.floats(0, 50), st.floats(0, 50))
@settings(max_examples=200, deadline=None)
def test_q1_bounded_and_identity(a, b):
    v = marcum_q1(a, b)
    assert 0.0 <= v <= 1.0
    assert marcum_q1(0.0, b) == pytest.approx(math.exp(-b * b / 2), abs=1e-12)


@given(st.floats(0, 40), st.floats(0, 40), st.floats(0.01, 3))
@settings(max_examples=100, deadline=None)
def test_q1_monotone(a, b, step):
    assert marcum_q1(a, b + step) <= marcum_q1(a, b) + 1e-12
    assert marcum_q1(a + step, b) >= marcum_q1(a, b) - 1e-12


def test_q1_broadcasts():
    out = marcum_q1(np.array([[0.0], [2.0]]), np.array([0.0, 1.0, 2.0]))
    assert out.shape == (2, 3)
    assert out[1, 1] == pytest.approx(0.9181076963694060, abs=1e-12)


def test_q1_large_amplitude_asymptotic_branch():
    # window > 10^4 terms only for a of several hundred; the normal limit holds there
    assert marcum_q1(1200.0, 1200.0) == pytest.approx(0.5, abs=2e-3)
    assert marcum_q1(1200.0, 1190.0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("a,b", [(10.0, 0.3), (10.0, 2.0), (4.0, 0.05), (0.0, 0.1)])
def test_p1_keeps_relative_accuracy(a, b):
    # the complement is tiny here; 1 - Q1 would lose every digit
    with mp.workdps(60):
        mu, y = mp.mpf(a) ** 2 / 2, mp.mpf(b) ** 2 / 2
        oracle = mp.fsum(mp.exp(-mu) * mu**k / mp.factorial(k) * mp.gammainc(k + 1, 0, y, regularized=True)
                         for k in range(400))
    assert marcum_p1(a, b) == pytest.approx(float(oracle), rel=1e-10)
    assert marcum_p1(a, b) + marcum_q1(a, b) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("a,b", [(-1.0, 1.0), (1.0, -0.1), (math.inf, 1.0), (1.0, math.nan)])
def test_q1_domain(a, b):
    with pytest.raises(DomainError):
        marcum_q1(a, b)


def test_lower_gamma_values():
    assert regularized_lower_gamma(1.0, 1.0) == pytest.approx(1 - math.exp(-1), rel=1e-12)
    assert regularized_lower_gamma(2.0, 0.0) == 0.0


def test_lower_gamma_quadrature_oracle():
    num, _ = integrate.quad(lambda t: t**2.5 * math.exp(-t), 0.0, 2.7, epsabs=1e-14, epsrel=1e-13)
    expected = num / math.gamma(3.5)
    assert regularized_lower_gamma(3.5, 2.7) == pytest.approx(expected, rel=1e-12)
    assert regularized_lower_gamma(3.5, 2.7) == pytest.approx(0.38872845706042072072, rel=1e-12)


@given(st.floats(0.05, 50), st.floats(0, 200), st.floats(0.001, 10))
@settings(max_examples=100, deadline=None)
def test_lower_gamma_nondecreasing(s, x, dx):
    assert regularized_lower_gamma(s, x + dx) >= regularized_lower_gamma(s, x)
    assert regularized_lower_gamma(s, 1e4) == pytest.approx(1.0)


def test_lower_gamma_domain():
    with pytest.raises(DomainError):
        regularized_lower_gamma(0.0, 1.0)


def stirling_lngamma(x):
    """Recurse upward to x >= 20, then apply the Stirling series (error < 1e-16)."""
    shift = 0.0
    while x < 20.0:
        shift -= math.log(x)
        x += 1.0
    series = 1 / (12 * x) - 1 / (360 * x**3) + 1 / (1260 * x**5) - 1 / (1680 * x**7)
    return shift + (x - 0.5) * math.log(x) - x + 0.5 * math.log(2 * math.pi) + series


def test_ln_gamma_values():
    assert ln_gamma(1.0) == 0.0
    assert ln_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-13)
    assert ln_gamma(7.3) == pytest.approx(stirling_lngamma(7.3), rel=1e-13)
    assert ln_gamma(7.3) == pytest.approx(7.1478925230222490328, rel=1e-13)


def test_ln_gamma_domain():
    with pytest.raises(DomainError):
        ln_gamma(0.0)


def test_confluent_m_values():
    assert confluent_m(2.3, 1, 0.0) == 1.0
    assert confluent_m(0.0, 1, -5.0) == 1.0
    with mp.workdps(50):
        oracle = float(mp.hyp1f1(mp.mpf("0.8"), 1, -12))
    assert confluent_m(0.8, 1, -12.0) == pytest.approx(oracle, rel=1e-8)


def test_confluent_m_asymptotic():
    # M(a, 1, z) ~ (-z)^(-a) / Gamma(1 - a) for large negative z
    expected = 100.0 ** -0.5 / math.gamma(0.5)
    assert confluent_m(0.5, 1, -100.0) == pytest.approx(expected, rel=0.02)


def test_confluent_m_regime():
    with pytest.raises(UnsupportedRangeError):
        confluent_m(6.0, 1, -1.0)
    with pytest.raises(UnsupportedRangeError):
        confluent_m(1.0, 1, -300.0)
    with pytest.raises(DomainError):
        confluent_m(1.0, 0, -1.0)


def test_rician_rayleigh_limit(rng):
    g = sample_rician_power(0.0, rng, 10**6)
    assert g.mean() == pytest.approx(1.0, rel=0.01)
    assert g.var() == pytest.approx(1.0, rel=0.02)


def test_rician_variance_k9(rng):
    g = sample_rician_power(9.0, rng, 10**6)
    assert g.mean() == pytest.approx(1.0, rel=0.01)
    assert g.var() == pytest.approx(0.19, rel=0.02)


@pytest.mark.parametrize("k", [0.5, 3.0, 22.0])
def test_rician_ccdf_matches_marcum(k, rng):
    n = 200_000
    g = sample_rician_power(k, rng, n)
    for x in (0.3, 0.8, 1.0, 1.4):
        p = marcum_q1(math.sqrt(2 * k), math.sqrt(2 * (k + 1) * x))
        assert abs((g > x).mean() - p) < 5 * math.sqrt(p * (1 - p) / n) + 1e-4


def test_rician_scalar_and_domain(rng):
    assert isinstance(sample_rician_power(2.0, rng), float)
    with pytest.raises(DomainError):
        sample_rician_power(-1.0, rng)
