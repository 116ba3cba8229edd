import math

import numpy as np
import pytest
from scipy import integrate

from ptlab.laws import (
    catalan,
    law_cdf,
    law_central_moment,
    marchenko_pastur,
    mp_density,
    sc_cdf,
    sc_central_moment,
    sc_density,
    semicircle,
    support,
)

SC_LAWS = [semicircle(0, 1), semicircle(1, 1), semicircle(1, 0.25), semicircle(-2, 3.7)]
MP_LAWS = [marchenko_pastur(a) for a in (1, 1.5, 4, 10)]


def test_sc_density_examples():
    assert sc_density(semicircle(0, 1), 0) == pytest.approx(1 / math.pi)
    assert sc_density(semicircle(1, 0.25), 2.0) == 0
    law = semicircle(0.7, 0.3)
    for t in (0.1, 0.5, 1.0):
        assert sc_density(law, 0.7 + t) == pytest.approx(sc_density(law, 0.7 - t), rel=1e-14)
    assert sc_density(law, 10) == 0


def test_sc_cdf_examples():
    law = semicircle(1.3, 0.49)
    assert sc_cdf(law, 1.3) == pytest.approx(0.5, abs=1e-15)
    assert sc_cdf(law, 1.3 + 1.4) == 1.0
    assert sc_cdf(law, 1.3 - 1.4) == 0.0
    assert law_cdf(semicircle(1, 1), 1.0) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("law", SC_LAWS + MP_LAWS, ids=str)
def test_cdf_limits(law):
    lo, hi = support(law)
    assert law_cdf(law, lo - 5) == 0.0
    assert law_cdf(law, hi + 5) == 1.0


def test_catalan():
    assert [catalan(k) for k in range(8)] == [1, 1, 2, 5, 14, 42, 132, 429]
    assert catalan(30) == 3814986502092304
    with pytest.raises(OverflowError):
        catalan(31)


def test_sc_central_moments_examples():
    alpha = 4.0
    assert sc_central_moment(semicircle(1, 1 / alpha), 2) == pytest.approx(1 / alpha)
    assert sc_central_moment(semicircle(1, 1), 4) == 2
    assert sc_central_moment(semicircle(1, 1), 3) == 0


@pytest.mark.parametrize("law", SC_LAWS, ids=str)
def test_sc_density_normalized(law):
    total = integrate.quad(lambda x: sc_density(law, x), *support(law),
                           weight="alg", wvar=(0, 0))[0]
    assert total == pytest.approx(1, abs=1e-8)


@pytest.mark.parametrize("law", SC_LAWS, ids=str)
@pytest.mark.parametrize("k", range(1, 6))
def test_sc_moments_by_quadrature(law, k):
    lo, hi = support(law)
    # density = sqrt((hi - x)(x - lo)) / (2 pi sigma^2): use the algebraic weight
    q = integrate.quad(lambda x: (x - law.a) ** (2 * k) / (2 * math.pi * law.sigma2),
                       lo, hi, weight="alg", wvar=(0.5, 0.5), epsabs=0, epsrel=1e-13)[0]
    assert q == pytest.approx(sc_central_moment(law, 2 * k), rel=1e-8)


def test_sc_cdf_monotone_and_differentiates_to_density():
    law = semicircle(1, 0.5)
    lo, hi = support(law)
    x = np.linspace(lo - 0.5, hi + 0.5, 10_000)
    c = sc_cdf(law, x)
    assert np.all(np.diff(c) >= 0)
    h = 1e-6
    inner = np.linspace(lo + 0.01, hi - 0.01, 500)
    fd = (sc_cdf(law, inner + h) - sc_cdf(law, inner - h)) / (2 * h)
    assert np.max(np.abs(fd - sc_density(law, inner))) < 1e-6


@pytest.mark.parametrize("law", MP_LAWS, ids=str)
def test_mp_mean_variance_and_mass(law):
    lo, hi = support(law)
    a = law.alpha
    # density = alpha / (2 pi x) * sqrt((hi - x)(x - lo))
    w = dict(weight="alg", wvar=(0.5, 0.5), epsabs=1e-14, epsrel=1e-13)
    if lo == 0:
        # sqrt(x)/x = x^(-1/2): fold it into the weight
        w["wvar"] = (-0.5, 0.5)
        mass = integrate.quad(lambda x: a / (2 * math.pi), lo, hi, **w)[0]
        m1 = integrate.quad(lambda x: a * x / (2 * math.pi), lo, hi, **w)[0]
        m2 = integrate.quad(lambda x: a * x * x / (2 * math.pi), lo, hi, **w)[0]
    else:
        mass = integrate.quad(lambda x: a / (2 * math.pi * x), lo, hi, **w)[0]
        m1 = integrate.quad(lambda x: a / (2 * math.pi), lo, hi, **w)[0]
        m2 = integrate.quad(lambda x: a * x / (2 * math.pi), lo, hi, **w)[0]
    assert mass == pytest.approx(1, abs=1e-8)
    assert m1 == pytest.approx(1, abs=1e-6)
    assert m2 - m1 ** 2 == pytest.approx(1 / a, abs=1e-6)


def test_mp_support_alpha1():
    assert support(marchenko_pastur(1)) == (0.0, 4.0)
    assert mp_density(marchenko_pastur(1), 4.5) == 0
    assert mp_density(marchenko_pastur(1), -0.1) == 0


def test_mp_requires_alpha_at_least_one():
    with pytest.raises(ValueError):
        marchenko_pastur(0.5)


@pytest.mark.parametrize("law", MP_LAWS, ids=str)
def test_mp_cdf_matches_direct_quadrature(law):
    lo, hi = support(law)
    xs = np.linspace(lo, hi, 13)[1:-1]
    for x in xs:
        ref = integrate.quad(lambda v: mp_density(law, v), lo, x, limit=500,
                             epsabs=1e-12)[0]
        assert law_cdf(law, x) == pytest.approx(ref, abs=1e-7)
    assert np.all(np.diff(law_cdf(law, np.linspace(lo, hi, 400))) >= 0)


def test_law_central_moment_mp():
    law = marchenko_pastur(2.0)
    assert law_central_moment(law, 1, 1.0) == pytest.approx(0, abs=1e-10)
    assert law_central_moment(law, 2, 1.0) == pytest.approx(0.5, abs=1e-10)
