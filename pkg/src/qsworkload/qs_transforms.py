"""Transform-level results: one-sided master formulas and QS limit transforms.

The master transform is

    L(vartheta; alpha, beta) = int_0^inf e^{-vartheta t} E_pi[e^{-alpha Q(0) - beta Q(t)}; T > t] dt.

Both one-sided formulas are evaluated in a divided-difference form that has
no removable singularities (for example ``alpha + beta = 0`` or
``vartheta = psi_hat(beta)``), so no Taylor switch-over is needed.  Values
are Python ``float``/``complex`` for scalar input and numpy arrays otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfcx

from .errors import DomainError, PoleError
from .exponent_analysis import (
    CriticalPoints,
    Side,
    critical_points,
    relevant_model,
    resolve_side,
    right_inverse_phi,
    right_inverse_phi_complex,
)
from .levy_models import (
    LevyModel,
    continued_exponent,
    exponent_divided_difference,
    reduced_divided_difference,
    reduced_exponent,
    reduced_exponent_derivative,
)

__all__ = [
    "master_transform",
    "master_transform_sp",
    "master_transform_sn",
    "QsTransformPair",
    "qs_transform",
    "tail_constant",
    "busy_period_tail",
    "busy_period_tail_transform",
    "brownian_exact_tail",
]

SQRT_PI = math.sqrt(math.pi)


def _ret(value):
    if np.ndim(value) == 0:
        value = value.item() if isinstance(value, np.ndarray) else value
        return complex(value) if isinstance(value, (complex, np.complexfloating)) else float(value)
    return value


def _phi_at(model: LevyModel, z, zeta: float):
    """Inverse exponent of ``model`` at real or complex ``z`` (cut on ``(-inf, zeta]``)."""
    if np.iscomplexobj(z):
        z = np.asarray(z, dtype=complex)
        if np.any((z.imag == 0) & (z.real <= zeta)):
            raise DomainError(f"argument on the branch cut (-inf, {zeta:g}]")
        return right_inverse_phi_complex(model, z)
    z = np.asarray(z, dtype=float)
    if np.any(z < zeta):
        raise DomainError(f"real vartheta must be >= zeta_star = {zeta:g}")
    out = right_inverse_phi(model, z)
    return float(out) if np.ndim(out) == 0 else out


def _check_nonneg(**kw) -> None:
    for name, v in kw.items():
        if np.any(np.asarray(v, dtype=float) < 0):
            raise DomainError(f"{name} must be >= 0")


def _finite(value, what: str):
    if np.any(value == 0) or not np.all(np.isfinite(value)):
        raise PoleError(f"pole of the {what}")


def master_transform_sp(model: LevyModel, vartheta, alpha=0.0, beta=0.0):
    """Master transform for spectrally positive input.

    Parameters
    ----------
    model : LevyModel
        Spectrally positive model (compound Poisson or Brownian).
    vartheta : float or complex or array_like
        Time-transform argument; real values must be at least ``zeta_star``,
        complex values may be anywhere off the cut ``(-inf, zeta_star]``.
    alpha, beta : float or array_like
        Non-negative transform arguments for ``Q(0)`` and ``Q(t)``.

    Raises
    ------
    DomainError
        Negative ``alpha``/``beta`` or ``vartheta`` on the cut.
    PoleError
        At a genuine pole.
    """
    side = resolve_side(model, Side.POSITIVE)
    _check_nonneg(alpha=alpha, beta=beta)
    cp = critical_points(model, side)
    dm = relevant_model(model, side)
    phi = _phi_at(dm, vartheta, cp.zeta_star)
    u = np.asarray(alpha) + np.asarray(beta)
    v = np.asarray(alpha) + phi
    den = reduced_exponent(dm, u) * reduced_exponent(dm, v) * exponent_divided_difference(dm, phi, beta)
    _finite(den, "spectrally positive master transform")
    return _ret(cp.psi_prime_zero * reduced_divided_difference(dm, u, v) / den)


def master_transform_sn(model: LevyModel, vartheta, alpha=0.0, beta=0.0):
    """Master transform for spectrally negative input (same conventions)."""
    side = resolve_side(model, Side.NEGATIVE)
    _check_nonneg(alpha=alpha, beta=beta)
    cp = critical_points(model, side)
    phi = _phi_at(model, vartheta, cp.zeta_star)
    w = np.asarray(alpha) + cp.phi_zero
    den = (phi + np.asarray(beta)) * (w + np.asarray(beta)) * exponent_divided_difference(model, phi, w)
    _finite(den, "spectrally negative master transform")
    return _ret(cp.phi_zero / den)


def master_transform(model: LevyModel, vartheta, alpha=0.0, beta=0.0, side=None):
    """Dispatch to the one-sided master formula for ``model``."""
    if resolve_side(model, side) is Side.POSITIVE:
        return master_transform_sp(model, vartheta, alpha, beta)
    return master_transform_sn(model, vartheta, alpha, beta)


@dataclass(frozen=True)
class QsTransformPair:
    """Limiting transforms of the quasi-stationary pair ``(Q(0), Q(t))``.

    ``a_factor`` is the transform of the left (initial) marginal and
    ``b_factor`` that of the right (terminal) marginal; the joint limit
    is their product.
    """

    model: LevyModel
    side: Side
    critical: CriticalPoints

    def a_factor(self, alpha):
        cp = self.critical
        if self.side is Side.POSITIVE:
            dm = relevant_model(self.model, self.side)
            a = np.asarray(alpha) + cp.theta_star
            h = reduced_exponent(dm, a)
            return _ret(-cp.zeta_star * reduced_exponent_derivative(dm, a) / (h * h))
        psi = continued_exponent(self.model, np.asarray(alpha) + cp.phi_zero)
        return _ret(-cp.zeta_star / (psi - cp.zeta_star))

    def b_factor(self, beta):
        cp = self.critical
        if self.side is Side.POSITIVE:
            dm = relevant_model(self.model, self.side)
            return _ret(cp.zeta_star / (cp.zeta_star - continued_exponent(dm, np.asarray(beta))))
        th = cp.theta_star
        return _ret(th * th / (th + np.asarray(beta)) ** 2)

    def joint(self, alpha, beta):
        return _ret(np.asarray(self.a_factor(alpha)) * np.asarray(self.b_factor(beta)))


def qs_transform(model: LevyModel, side=None) -> QsTransformPair:
    """Quasi-stationary limit transforms; raises ``AssumptionViolation`` upstream."""
    side = resolve_side(model, side)
    return QsTransformPair(model, side, critical_points(model, side))


def tail_constant(model: LevyModel, side=None) -> float:
    """Coefficient ``C`` in ``L(z;0,0) = K - C (z - zeta*)^{1/2} + ...``."""
    cp = critical_points(model, side)
    if cp.side is Side.POSITIVE:
        return cp.psi_prime_zero * cp.k_star / cp.zeta_star**2
    return cp.phi_zero * cp.k_star / (cp.theta_star**2 * -cp.zeta_star)


def busy_period_tail(model: LevyModel, t, side=None):
    """Leading-order asymptote of ``P_pi(T > t)``: ``C/(2 sqrt(pi)) t^{-3/2} e^{zeta* t}``."""
    cp = critical_points(model, side)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("t must be > 0")
    c = tail_constant(model, side) / (2.0 * SQRT_PI)
    return _ret(c * t**-1.5 * np.exp(cp.zeta_star * t))


def busy_period_tail_transform(model: LevyModel, side=None):
    """``z -> L(z; 0, 0)``, the Laplace transform of ``t -> P_pi(T > t)``."""
    side = resolve_side(model, side)
    return lambda z: master_transform(model, z, 0.0, 0.0, side)


def brownian_exact_tail(sigma: float, t):
    """Exact ``P_pi(T > t)`` for ``X(t) = sigma B(t) - t`` started in stationarity.

    For unit ``sigma`` this is ``2(1+t) Phi_N(-sqrt t) - 2 sqrt(t) phi_N(sqrt t)``;
    other ``sigma`` follow by the time change ``t -> t / sigma**2``.  The
    scaled complementary error function keeps full relative accuracy for
    large ``t``.
    """
    if sigma <= 0:
        raise DomainError("sigma must be > 0")
    t = np.asarray(t, dtype=float) / sigma**2
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    r = np.sqrt(t)
    val = np.exp(-0.5 * t) * ((1.0 + t) * erfcx(r / math.sqrt(2.0)) - 2.0 * r / math.sqrt(2.0 * math.pi))
    return _ret(val)
