import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import stable_models
from qsworkload.errors import DomainError, ModelError, StabilityError
from qsworkload.levy_models import (
    Kind,
    LevyModel,
    dual,
    exponent_derivative,
    exponent_divided_difference,
    laplace_exponent,
    model_from_dict,
    model_from_json,
    reduced_divided_difference,
    reduced_exponent,
    reduced_exponent_derivative,
    stationary_law,
)


def test_exponent_vanishes_at_zero(brownian):
    assert laplace_exponent(brownian, 0.0) == 0.0


def test_mm1_dual_exponent_values(mm1):
    # psi_hat(eta) = eta - lam eta / (eta + nu)
    assert laplace_exponent(dual(mm1), 1.0) == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert laplace_exponent(dual(mm1), 3.0) == pytest.approx(12.0 / 5.0, abs=1e-15)


def test_brownian_dual_exponent(brownian):
    assert laplace_exponent(dual(brownian), -1.0) == pytest.approx(-0.5, abs=1e-15)


def test_complex_argument_and_domain(mm1):
    v = laplace_exponent(mm1, 0.5 + 2j)
    assert isinstance(v, complex)
    with pytest.raises(DomainError):
        laplace_exponent(mm1, 2.0)
    with pytest.raises(DomainError):
        laplace_exponent(mm1, 2.5 + 1j)
    with pytest.raises(DomainError):
        laplace_exponent(dual(mm1), -2.0)


def test_array_evaluation(mm1):
    eta = np.linspace(-1, 1, 5)
    out = laplace_exponent(mm1, eta)
    assert out.shape == (5,)
    assert out[2] == 0.0


def test_dual_involution_and_flip(mm1, brownian):
    assert dual(dual(mm1)) == mm1
    d = dual(mm1)
    assert d.kind is Kind.SPECTRALLY_NEGATIVE_CP
    assert d.drift == 1.0
    assert d.is_dual
    assert dual(brownian).kind is Kind.LINEAR_BROWNIAN


def test_stationary_laws(brownian, mm1):
    law = stationary_law(brownian)
    assert law.representation == "ExponentialRate"
    assert law.rate == 2.0
    law = stationary_law(mm1)
    assert law.representation == "GeometricCompound"
    assert (law.rho, law.rate) == (0.5, 2.0)
    assert law.atom == 0.5
    assert law.transform(0.0) == 1.0


def test_stationary_law_refuses_dual(mm1):
    with pytest.raises(StabilityError):
        stationary_law(dual(mm1))


def test_stationary_ppf_inverts_cdf(mm1):
    law = stationary_law(mm1)
    u = np.array([0.2, 0.5, 0.6, 0.9, 0.999])
    x = law.ppf(u)
    assert np.all(x[:2] == 0.0)
    np.testing.assert_allclose(law.cdf(x[2:]), u[2:], rtol=1e-13)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="Nope", drift=-1.0),
        dict(kind=Kind.LINEAR_BROWNIAN, drift=-1.0, sigma=0.0),
        dict(kind=Kind.LINEAR_BROWNIAN, drift=-1.0, sigma=1.0, jump_rate=1.0),
        dict(kind=Kind.SPECTRALLY_POSITIVE_CP, drift=-1.0, sigma=1.0, jump_rate=1.0, jump_param=2.0),
        dict(kind=Kind.SPECTRALLY_POSITIVE_CP, drift=-1.0, jump_rate=1.0, jump_param=0.0),
        dict(kind=Kind.SPECTRALLY_NEGATIVE_CP, drift=-1.0, jump_rate=1.0, jump_param=1.0),
        dict(kind=Kind.SPECTRALLY_POSITIVE_CP, drift=-1.0, jump_rate=-1.0, jump_param=1.0),
        dict(kind=Kind.LINEAR_BROWNIAN, drift=float("nan"), sigma=1.0),
        dict(kind=Kind.LINEAR_BROWNIAN, drift=True, sigma=1.0),
    ],
)
def test_invalid_models_rejected(kwargs):
    with pytest.raises(ModelError):
        LevyModel(**kwargs)


@pytest.mark.parametrize("drift", [0.0, 0.5])
def test_unstable_brownian(drift):
    with pytest.raises(StabilityError, match=r"E X\(1\) < 0"):
        LevyModel.brownian(1.0, drift)


def test_unstable_mm1():
    with pytest.raises(StabilityError):
        LevyModel.mm1(2.0, 1.0)


def test_json_round_trip(mm1):
    text = json.dumps(mm1.to_dict())
    assert model_from_json(text) == mm1


def test_json_rejects_unknown_and_missing_fields(mm1):
    doc = mm1.to_dict()
    with pytest.raises(ModelError, match="unknown"):
        model_from_dict({**doc, "rho": 0.5})
    del doc["sigma"]
    with pytest.raises(ModelError, match="missing"):
        model_from_dict(doc)
    with pytest.raises(ModelError):
        model_from_dict([1, 2])


def test_dual_has_no_document_form(mm1):
    with pytest.raises(ModelError):
        dual(mm1).to_dict()


@settings(max_examples=60, deadline=None)
@given(stable_models())
def test_exponent_real_and_convex(model):
    lo, hi = model.theta_domain
    lo = max(lo, -5.0) + 1e-3
    hi = min(hi, 5.0) - 1e-3
    eta = np.linspace(lo, hi, 201)
    psi = laplace_exponent(model, eta)
    assert np.all(np.isreal(psi))
    second = psi[2:] - 2 * psi[1:-1] + psi[:-2]
    assert np.all(second >= -1e-12 * np.abs(psi).max())


@settings(max_examples=60, deadline=None)
@given(stable_models())
def test_duality_identity(model):
    lo, hi = model.theta_domain
    eta = np.linspace(max(lo, -4.0) + 1e-3, min(hi, 4.0) - 1e-3, 100)
    np.testing.assert_allclose(laplace_exponent(dual(model), -eta), laplace_exponent(model, eta), rtol=1e-15, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(stable_models())
def test_stationary_transform_matches_pk(model):
    s = np.linspace(0.05, 10.0, 20)
    law = stationary_law(model)
    if model.kind is Kind.SPECTRALLY_POSITIVE_CP:
        dm = dual(model)
        pk = exponent_derivative(dm, 0.0) * s / laplace_exponent(dm, s)
    else:
        pk = law.rate / (law.rate + s)
        assert abs(laplace_exponent(model, law.rate)) < 1e-12
    np.testing.assert_allclose(law.transform(s), pk, rtol=1e-12)
    assert law.transform(0.0) == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(stable_models(), st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
def test_helper_identities(model, x, y):
    lo, hi = model.theta_domain
    x = x * min(1.0, hi if math.isfinite(hi) else 1.0, -lo if math.isfinite(lo) else 1.0)
    y = y * min(1.0, hi if math.isfinite(hi) else 1.0, -lo if math.isfinite(lo) else 1.0)
    if abs(x - y) < 1e-3 or abs(x) < 1e-3:
        return
    psi = lambda e: laplace_exponent(model, e)  # noqa: E731
    assert reduced_exponent(model, x) == pytest.approx(psi(x) / x, rel=1e-10)
    assert exponent_divided_difference(model, x, y) == pytest.approx((psi(x) - psi(y)) / (x - y), rel=1e-8, abs=1e-10)
    hq = (reduced_exponent(model, x) - reduced_exponent(model, y)) / (x - y)
    assert reduced_divided_difference(model, x, y) == pytest.approx(hq, rel=1e-7, abs=1e-10)
    h = 1e-5
    fd = (psi(x + h) - psi(x - h)) / (2 * h)
    assert exponent_derivative(model, x) == pytest.approx(fd, rel=1e-6, abs=1e-8)
    fd2 = (reduced_exponent(model, x + h) - reduced_exponent(model, x - h)) / (2 * h)
    assert reduced_exponent_derivative(model, x) == pytest.approx(fd2, rel=1e-6, abs=1e-8)
