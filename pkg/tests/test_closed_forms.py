import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from conftest import SQRT2, stable_models
from qsworkload.closed_forms import (
    Erlang,
    brownian_finite_t_q0_cdf,
    brownian_finite_t_q0_density,
    brownian_qs_density,
    closed_form_law,
    closed_form_table,
    mm1_qs_left_pmf_check,
    mm1_qs_left_sampler,
    mm1_qs_right_density,
    mm1_qs_right_law,
    remark_decomposition,
    remark_decomposition_sampler,
)
from qsworkload.errors import AssumptionViolation, CapabilityError, ParameterError
from qsworkload.levy_models import Kind, LevyModel, stationary_law
from qsworkload.qs_transforms import qs_transform

ALPHAS = np.linspace(0.0, 5.0, 20)


def laplace_quad(pdf, alpha):
    return quad(lambda x: pdf(x) * math.exp(-alpha * x), 0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)[0]


def test_brownian_density_shape():
    f = brownian_qs_density(1.0)
    assert f(1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    x = np.linspace(0, 40, 400001)
    assert x[np.argmax(f(x))] == pytest.approx(1.0, abs=1e-4)
    assert np.trapezoid(x * f(x), x) == pytest.approx(2.0, abs=1e-3)
    g = brownian_qs_density(2.0, "QS_right")
    assert g(4.0) == pytest.approx(f(1.0) / 4.0, rel=1e-14)
    with pytest.raises(ParameterError):
        brownian_qs_density(1.0, "stationary")
    with pytest.raises(ParameterError):
        brownian_qs_density(0.0)


def test_mm1_pmf_examples():
    p = 1 / SQRT2
    assert mm1_qs_left_pmf_check(1.0, 2.0, 1) == 0.0
    assert mm1_qs_left_pmf_check(1.0, 2.0, 2) == pytest.approx((1 - p) ** 2, rel=1e-15)
    assert mm1_qs_left_pmf_check(1.0, 2.0, 3) == pytest.approx(2 * p * (1 - p) ** 2, rel=1e-15)
    total = sum(mm1_qs_left_pmf_check(1.0, 2.0, m) for m in range(2, 400))
    assert total == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ParameterError):
        mm1_qs_left_pmf_check(2.0, 1.0, 3)
    with pytest.raises(ParameterError):
        mm1_qs_left_pmf_check(0.0, 1.0, 3)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(0.02, 0.95))
def test_negative_binomial_stages_are_erlang(nu, rho):
    lam = rho * nu
    law = mm1_qs_left_sampler(lam, nu)
    erl = Erlang(2, math.sqrt(lam * nu) - lam)
    x = np.linspace(0.0, 20.0 / erl.rate, 25)
    np.testing.assert_allclose(law.pdf(x), erl.pdf(x), rtol=1e-9, atol=1e-12 * erl.rate)
    np.testing.assert_allclose(law.cdf(x), erl.cdf(x), rtol=1e-9, atol=1e-13)
    np.testing.assert_allclose(law.transform(ALPHAS), erl.transform(ALPHAS), rtol=1e-12)


@pytest.mark.parametrize("model_name", ["brownian", "mm1", "sn_cp"])
@pytest.mark.parametrize("marginal", ["QS_left", "QS_right"])
def test_closed_form_transforms_match_factors(model_name, marginal, request):
    model = request.getfixturevalue(model_name)
    if model_name == "sn_cp" and marginal == "QS_left":
        pytest.skip("no closed form")
    law = closed_form_law(model, marginal)
    pair = qs_transform(model)
    factor = pair.a_factor if marginal == "QS_left" else pair.b_factor
    for a in ALPHAS:
        assert laplace_quad(law.pdf, a) == pytest.approx(factor(a), rel=1e-8)
        assert law.transform(a) == pytest.approx(factor(a), rel=1e-12)


@pytest.mark.parametrize("model_name", ["brownian", "mm1", "sn_cp"])
@pytest.mark.parametrize("marginal", ["QS_left", "QS_right"])
def test_moments_from_transform_derivatives(model_name, marginal, request):
    model = request.getfixturevalue(model_name)
    try:
        law = closed_form_law(model, marginal)
    except CapabilityError:
        pytest.skip("no closed form")
    pair = qs_transform(model)
    f = pair.a_factor if marginal == "QS_left" else pair.b_factor
    h = 1e-4
    f0, f1, f2, f3 = (float(np.real(f(k * h))) for k in range(4))
    mean = -(-11 * f0 + 18 * f1 - 9 * f2 + 2 * f3) / (6 * h)
    second = (2 * f0 - 5 * f1 + 4 * f2 - f3) / h**2
    assert law.mean == pytest.approx(mean, rel=1e-5)
    m2 = quad(lambda x: x * x * law.pdf(x), 0, np.inf, epsrel=1e-12, limit=200)[0]
    assert m2 == pytest.approx(second, rel=1e-4)


def test_sampler_moments_and_transform(mm1):
    rng = np.random.default_rng(7)
    n = 400_000
    law = mm1_qs_left_sampler(1.0, 2.0)
    s = law.sample(rng, n)
    assert s.mean() == pytest.approx(law.mean, rel=5 * s.std() / law.mean / math.sqrt(n))
    for a in (0.5, 2.0):
        assert np.exp(-a * s).mean() == pytest.approx(law.transform(a), abs=5 / math.sqrt(n))
    right = mm1_qs_right_law(1.0, 2.0)
    s = right.sample(rng, n)
    assert s.mean() == pytest.approx(right.mean, rel=5 * s.std() / right.mean / math.sqrt(n))
    assert np.exp(-s).mean() == pytest.approx(right.transform(1.0), abs=5 / math.sqrt(n))


def test_light_traffic_limits():
    # rho -> 0: the right law becomes Exp(nu) while the left mean blows up like 2 / sqrt(lam nu)
    nu = 2.0
    for lam in (1e-4, 1e-8):
        left = mm1_qs_left_sampler(lam, nu)
        right = mm1_qs_right_law(lam, nu)
        assert left.mean * math.sqrt(lam * nu) == pytest.approx(2.0, rel=2 * math.sqrt(lam / nu))
        assert right.transform(1.0) == pytest.approx(nu / (nu + 1), rel=2 * math.sqrt(lam / nu))


def test_right_law_mass_and_density():
    f = mm1_qs_right_density(1.0, 2.0)
    assert quad(f, 0, np.inf)[0] == pytest.approx(1.0, abs=1e-12)
    law = mm1_qs_right_law(1.0, 2.0)
    assert (law.weight, law.rate) == pytest.approx((1 / SQRT2, 2 - SQRT2), rel=1e-15)
    assert law.cdf(np.inf) == pytest.approx(1.0)
    assert f(-1.0) == 0.0


@pytest.mark.parametrize("model_name", ["brownian", "mm1"])
def test_qs_left_dominates_stationary(model_name, request):
    model = request.getfixturevalue(model_name)
    law = closed_form_law(model, "QS_left")
    pi = stationary_law(model)
    x = np.linspace(0, 30, 301)
    assert np.all(law.cdf(x) <= pi.cdf(x) + 1e-15)


def test_remark_decomposition_mm1(mm1):
    dec = remark_decomposition(mm1)
    r = SQRT2  # theta* + nu
    assert dec.erlang_rate == pytest.approx(r, rel=1e-12)
    assert dec.q == pytest.approx(1 / r, rel=1e-12)
    assert dec.tilted_rate == pytest.approx(r - 1, rel=1e-12)
    pair = qs_transform(mm1)
    np.testing.assert_allclose(dec.transform(ALPHAS), pair.a_factor(ALPHAS), rtol=1e-12)
    assert dec.mean == pytest.approx(mm1_qs_left_sampler(1.0, 2.0).mean, rel=1e-12)


def test_remark_decomposition_brownian(brownian):
    dec = remark_decomposition(LevyModel.brownian(2.0))
    assert dec.q == 1.0 and dec.erlang_rate is None and dec.tilted_rate == 0.25
    np.testing.assert_allclose(dec.transform(ALPHAS), Erlang(2, 0.25).transform(ALPHAS), rtol=1e-14)
    assert remark_decomposition(brownian).mean == pytest.approx(2.0)


@settings(max_examples=40, deadline=None)
@given(stable_models((Kind.SPECTRALLY_POSITIVE_CP, Kind.LINEAR_BROWNIAN)))
def test_remark_decomposition_matches_left_factor(model):
    dec = remark_decomposition(model)
    pair = qs_transform(model)
    np.testing.assert_allclose(dec.transform(ALPHAS), pair.a_factor(ALPHAS), rtol=1e-10)


def test_remark_sampler_matches_transform(mm1):
    rng = np.random.default_rng(11)
    s = remark_decomposition_sampler(mm1).sample(rng, 300_000)
    law = mm1_qs_left_sampler(1.0, 2.0)
    for a in (0.2, 1.0):
        assert np.exp(-a * s).mean() == pytest.approx(law.transform(a), abs=5 / math.sqrt(s.size))


def test_remark_requires_positive_jumps(sn_cp):
    with pytest.raises(AssumptionViolation):
        remark_decomposition(sn_cp)


@pytest.mark.parametrize("t", [1.0, 8.0, 30.0])
def test_finite_t_brownian_density(t):
    f = lambda q: brownian_finite_t_q0_density(t, q)  # noqa: E731
    assert quad(f, 0, np.inf, limit=200)[0] == pytest.approx(1.0, abs=1e-8)
    cdf = brownian_finite_t_q0_cdf(t)
    assert cdf(0.0) == 0.0 and cdf(1e6) == 1.0
    assert cdf(2.0) == pytest.approx(quad(f, 0, 2.0, epsabs=1e-14)[0], abs=1e-8)
    assert f(-1.0) == 0.0


def test_finite_t_law_approaches_erlang():
    erl = Erlang(2, 1.0)
    x = np.linspace(0, 30, 3001)
    gaps = [np.abs(brownian_finite_t_q0_cdf(t)(x) - erl.cdf(x)).max() for t in (8, 20, 50)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_sn_right_is_erlang(sn_cp):
    law = closed_form_law(sn_cp, "QS_right")
    assert law == Erlang(2, pytest.approx(SQRT2 - 1, rel=1e-12))


def test_capability_errors(mm1, sn_cp, brownian):
    with pytest.raises(CapabilityError):
        closed_form_law(mm1, "stationary")
    with pytest.raises(CapabilityError):
        closed_form_law(sn_cp, "QS_left")
    with pytest.raises(CapabilityError):
        closed_form_law(LevyModel(Kind.SPECTRALLY_POSITIVE_CP, -0.5, 0.0, 1.0, 3.0), "QS_left")
    with pytest.raises(ParameterError):
        closed_form_law(mm1, "bogus")
    table = closed_form_table(brownian, "stationary", [0.0, 1.0])
    np.testing.assert_allclose(table.f, [2.0, 2 * math.exp(-2.0)], rtol=1e-15)
    assert table.meta["method"] == "closed_form"
