import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SQRT2, stable_models
from qsworkload.errors import BelowSingularity, DomainError, ModelError
from qsworkload.exponent_analysis import (
    Side,
    critical_points,
    relevant_model,
    right_inverse_phi,
    right_inverse_phi_complex,
    square_root_expansion,
    tilt_exponent,
)
from qsworkload.levy_models import (
    Kind,
    continued_exponent,
    dual,
    exponent_derivative,
    laplace_exponent,
)


def mm1_dual_phi(theta, lam=1.0, nu=2.0):
    # explicit quadratic root for the M/M/1 dual exponent
    b = theta + lam - nu
    return (b + math.sqrt(b * b + 4 * theta * nu)) / 2


def test_brownian_phi_zero(brownian):
    assert right_inverse_phi(brownian, 0.0) == pytest.approx(2.0, abs=1e-13)


def test_mm1_dual_phi_matches_quadratic(mm1):
    for theta in (0.0, 0.3, 1.0, 7.5):
        assert right_inverse_phi(dual(mm1), theta) == pytest.approx(mm1_dual_phi(theta), rel=1e-12, abs=1e-14)
    assert right_inverse_phi(dual(mm1), 1.0) == pytest.approx(SQRT2, abs=1e-13)


def test_phi_array_input(mm1):
    out = right_inverse_phi(dual(mm1), np.array([0.0, 1.0]))
    np.testing.assert_allclose(out, [0.0, SQRT2], atol=1e-13)


def test_below_singularity(mm1):
    cp = critical_points(mm1)
    with pytest.raises(BelowSingularity):
        right_inverse_phi(dual(mm1), cp.zeta_star - 1e-6)
    assert right_inverse_phi(dual(mm1), cp.zeta_star) == cp.theta_star


def test_brownian_critical_points(brownian):
    cp = critical_points(brownian)
    assert cp.side is Side.POSITIVE
    assert cp.theta_star == pytest.approx(-1.0, abs=1e-12)
    assert cp.zeta_star == pytest.approx(-0.5, abs=1e-14)
    assert cp.k_star == pytest.approx(SQRT2, abs=1e-12)
    assert cp.phi_zero == 0.0
    neg = critical_points(brownian, "negative")
    assert neg.theta_star == pytest.approx(1.0, abs=1e-12)
    assert neg.phi_zero == pytest.approx(2.0, abs=1e-12)
    assert neg.zeta_star == cp.zeta_star


def test_mm1_critical_points(mm1):
    cp = critical_points(mm1)
    assert cp.theta_star == pytest.approx(SQRT2 - 2.0, abs=1e-12)
    assert cp.zeta_star == pytest.approx(-((SQRT2 - 1.0) ** 2), abs=1e-14)
    assert cp.psi_prime_zero == pytest.approx(0.5, abs=1e-15)


def test_side_validation(mm1, sn_cp):
    with pytest.raises(ModelError):
        critical_points(mm1, Side.NEGATIVE)
    with pytest.raises(ModelError):
        critical_points(sn_cp, Side.POSITIVE)
    assert relevant_model(sn_cp) is sn_cp


@settings(max_examples=60, deadline=None)
@given(stable_models())
def test_critical_point_invariants(model):
    cp = critical_points(model)
    r = relevant_model(model, cp.side)
    assert abs(exponent_derivative(r, cp.theta_star)) < 1e-10
    assert cp.zeta_star < 0
    assert cp.k_star**2 * exponent_derivative(r, cp.theta_star, 2) == pytest.approx(2.0, abs=1e-10)
    if cp.side is Side.NEGATIVE:
        assert abs(laplace_exponent(model, cp.phi_zero)) < 1e-10
        assert cp.phi_zero > cp.theta_star > 0


@settings(max_examples=40, deadline=None)
@given(stable_models())
def test_phi_psi_round_trips(model):
    cp = critical_points(model)
    r = relevant_model(model, cp.side)
    hi = min(r.theta_domain[1], cp.theta_star + 6.0)
    eta = np.linspace(cp.theta_star, hi - 1e-3 * (hi - cp.theta_star), 100)
    back = right_inverse_phi(r, laplace_exponent(r, eta))
    np.testing.assert_allclose(back, eta, atol=1e-10 * max(1.0, np.abs(eta).max()), rtol=0)
    s = np.linspace(cp.zeta_star, cp.zeta_star + 10.0, 100)
    np.testing.assert_allclose(laplace_exponent(r, right_inverse_phi(r, s)), s, atol=1e-10, rtol=0)


@settings(max_examples=40, deadline=None)
@given(stable_models(), st.floats(-20, 20), st.floats(0.01, 20))
def test_complex_phi_solves_equation(model, re, im):
    cp = critical_points(model)
    r = relevant_model(model, cp.side)
    for z in (complex(re, im), complex(re, -im)):
        phi = right_inverse_phi_complex(r, z)
        assert abs(continued_exponent(r, phi) - z) < 1e-9 * max(1.0, abs(z))
    assert right_inverse_phi_complex(r, complex(re, -im)) == pytest.approx(
        right_inverse_phi_complex(r, complex(re, im)).conjugate(), rel=1e-12
    )


@settings(max_examples=40, deadline=None)
@given(stable_models(), st.floats(1e-6, 30))
def test_complex_phi_agrees_on_real_axis(model, gap):
    cp = critical_points(model)
    r = relevant_model(model, cp.side)
    s = cp.zeta_star + gap
    assert right_inverse_phi_complex(r, complex(s, 0.0)).real == pytest.approx(right_inverse_phi(r, s), abs=1e-9)


def test_tilt_exponent(brownian, mm1):
    assert tilt_exponent(mm1, 0.3, 0.0) == 0.0
    assert tilt_exponent(dual(brownian), -1.0, 1.0) == pytest.approx(0.5, abs=1e-15)
    h = 1e-6
    fd = (tilt_exponent(mm1, 0.4, h) - tilt_exponent(mm1, 0.4, -h)) / (2 * h)
    assert fd == pytest.approx(exponent_derivative(mm1, 0.4), rel=1e-8)
    with pytest.raises(DomainError):
        tilt_exponent(mm1, 1.5, 1.0)


def test_square_root_expansion(brownian, mm1):
    cp = critical_points(brownian)
    assert square_root_expansion(brownian, cp.zeta_star + 1e-14) == pytest.approx(cp.theta_star, abs=1e-6)
    v = cp.zeta_star + 1e-6
    assert abs(right_inverse_phi(dual(brownian), v) - square_root_expansion(brownian, v)) <= 1e-5
    cp = critical_points(mm1)
    v = cp.zeta_star + 1e-8
    ratio = (mm1_dual_phi(v) - cp.theta_star) / (cp.k_star * math.sqrt(v - cp.zeta_star))
    assert abs(ratio - 1.0) < 1e-3
    with pytest.raises(BelowSingularity):
        square_root_expansion(mm1, cp.zeta_star)


def test_expansion_exact_for_brownian(brownian):
    cp = critical_points(brownian)
    for gap in (1e-2, 1.0, 10.0):
        v = cp.zeta_star + gap
        assert right_inverse_phi(dual(brownian), v) == pytest.approx(square_root_expansion(brownian, v), abs=1e-12)


@pytest.mark.parametrize("model_name", ["mm1", "sn_cp"])
def test_expansion_error_is_little_o(model_name, request):
    model = request.getfixturevalue(model_name)
    cp = critical_points(model)
    r = relevant_model(model, cp.side)
    errs = []
    for gap in (1e-2, 1e-4, 1e-6):
        v = cp.zeta_star + gap
        errs.append(abs(right_inverse_phi(r, v) - square_root_expansion(model, v)) / math.sqrt(gap))
    assert errs[0] > errs[1] > errs[2]


def test_critical_points_cached(mm1):
    assert critical_points(mm1) is critical_points(mm1)
    assert critical_points(mm1).side is Side.POSITIVE
    assert mm1.kind is Kind.SPECTRALLY_POSITIVE_CP
