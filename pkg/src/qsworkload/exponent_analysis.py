"""Right inverse of the Laplace exponent, critical points and tilting.

Sign conventions
----------------
For spectrally positive input the relevant exponent is the dual one,
``psi_hat(eta) = psi(-eta)``; for spectrally negative input it is ``psi``
itself.  :class:`Side` selects between the two; linear Brownian motion is
both and defaults to the spectrally positive convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import AssumptionViolation, BelowSingularity, ConvergenceError, ModelError
from .levy_models import (
    Kind,
    LevyModel,
    dual,
    exponent_derivative,
    laplace_exponent,
)

__all__ = [
    "Side",
    "CriticalPoints",
    "resolve_side",
    "relevant_model",
    "minimizer",
    "right_inverse_phi",
    "right_inverse_phi_complex",
    "critical_points",
    "tilt_exponent",
    "square_root_expansion",
]

ROOT_TOL = 1e-13
ROOT_MAXITER = 200


class Side(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


def resolve_side(model: LevyModel, side: Side | str | None = None) -> Side:
    """Pick the one-sided convention for ``model``; validates explicit choices."""
    if side is None:
        return Side.NEGATIVE if model.kind is Kind.SPECTRALLY_NEGATIVE_CP else Side.POSITIVE
    side = Side(side)
    if side is Side.POSITIVE and not model.spectrally_positive:
        raise ModelError(f"{model.describe()} is not spectrally positive")
    if side is Side.NEGATIVE and not model.spectrally_negative:
        raise ModelError(f"{model.describe()} is not spectrally negative")
    return side


def relevant_model(model: LevyModel, side: Side | str | None = None) -> LevyModel:
    """Model whose exponent carries the critical points for ``side``."""
    side = resolve_side(model, side)
    return dual(model) if side is Side.POSITIVE else model


def _bracket_root(f, start: float, bound: float, direction: int) -> tuple[float, float]:
    """Walk from ``start`` towards ``bound`` until ``f`` becomes positive.

    ``f(start) <= 0`` is assumed.  Returns ``(inner, outer)`` with
    ``f(inner) <= 0 < f(outer)``.
    """
    inner = start
    for k in range(1, 1100):
        if math.isfinite(bound):
            outer = start + (bound - start) * (1.0 - 2.0**-k)
        else:
            outer = start + direction * (2.0 ** (k - 1))
        if outer == inner or (math.isfinite(bound) and outer == bound):
            break
        if f(outer) > 0:
            return inner, outer
        inner = outer
    raise ConvergenceError("could not bracket root")


def _solve(f, fprime, a: float, b: float) -> float:
    """Safeguarded Newton for an increasing ``f`` with ``f(a) <= 0 < f(b)``.

    ``a`` and ``b`` may come in either order.
    """
    lo, hi = min(a, b), max(a, b)
    neg_is_lo = f(lo) <= 0
    x = 0.5 * (lo + hi)
    for _ in range(ROOT_MAXITER):
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx < 0) == neg_is_lo:
            lo = x
        else:
            hi = x
        d = fprime(x)
        xn = x - fx / d if d != 0 and math.isfinite(d) else 0.5 * (lo + hi)
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= ROOT_TOL or hi - lo <= ROOT_TOL:
            # one polishing Newton step, kept only if it stays bracketed
            d = fprime(xn)
            xp = xn - f(xn) / d if d != 0 else xn
            return xp if lo <= xp <= hi else xn
        x = xn
    raise ConvergenceError("root finder did not converge in 200 iterations")


@lru_cache(maxsize=256)
def minimizer(model: LevyModel) -> float:
    """Unique minimiser of the strictly convex exponent of ``model``."""
    d1 = lambda x: exponent_derivative(model, x, 1)  # noqa: E731
    d2 = lambda x: exponent_derivative(model, x, 2)  # noqa: E731
    slope0 = d1(0.0)
    if slope0 == 0.0:
        return 0.0
    lo, hi = model.theta_domain
    if slope0 < 0:
        inner, outer = _bracket_root(d1, 0.0, hi, +1)
    else:
        # mirror: find where -psi' turns positive going left
        inner, outer = _bracket_root(lambda x: -d1(x), 0.0, lo, -1)
    return _solve(d1, d2, inner, outer)


def _inverse_scalar(model: LevyModel, s: float) -> float:
    m = minimizer(model)
    zeta = laplace_exponent(model, m)
    if not s >= zeta:
        raise BelowSingularity(f"s={s!r} lies left of the minimum value {zeta!r}")
    if s == zeta:
        return m
    if s == 0.0 and m <= 0.0:
        return 0.0
    f = lambda x: laplace_exponent(model, x) - s  # noqa: E731
    fp = lambda x: exponent_derivative(model, x, 1)  # noqa: E731
    inner, outer = _bracket_root(f, m, model.theta_domain[1], +1)
    return _solve(f, fp, inner, outer)


def right_inverse_phi(model: LevyModel, s):
    """``Phi(s)``: the root of ``psi(eta) = s`` on the increasing branch.

    Parameters
    ----------
    model : LevyModel
        The exponent to invert (pass ``dual(m)`` for the dual inverse).
    s : float or array_like
        Real level(s), each at least the minimum value of ``psi``.

    Raises
    ------
    BelowSingularity
        If ``s`` is below the minimum of ``psi``.
    ConvergenceError
        If the bracketed Newton iteration fails.
    """
    if np.ndim(s) == 0:
        return _inverse_scalar(model, float(s))
    arr = np.asarray(s, dtype=float)
    return np.array([_inverse_scalar(model, float(v)) for v in arr.ravel()]).reshape(arr.shape)


def right_inverse_phi_complex(model: LevyModel, z):
    """Analytic continuation of ``Phi`` to the plane cut along ``(-inf, zeta]``.

    For exponential jumps ``psi(eta) = z`` is a quadratic in ``eta``; the
    increasing-branch root is selected with principal square roots of
    ``z - z1`` and ``z - z2`` (``z1 = zeta`` the branch point), which keeps
    the cut on the real axis left of ``zeta``.
    """
    z = np.asarray(z, dtype=complex)
    d = model.drift
    if model.jump_rate == 0:
        a = 0.5 * model.sigma**2
        zeta = -d * d / (4.0 * a)
        out = (-d + math.sqrt(4.0 * a) * np.sqrt(z - zeta)) / (2.0 * a)
    else:
        lam, nu, s = model.jump_rate, model.jump_param, model.jump_sign
        sdn = s * d * nu
        root = 2.0 * math.sqrt(-lam * sdn)
        z1 = -(lam - sdn) + root
        z2 = -(lam - sdn) - root
        b = sdn + z + lam
        out = (b + math.copysign(1.0, d) * np.sqrt(z - z1) * np.sqrt(z - z2)) / (2.0 * d)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CriticalPoints:
    """Analytic fingerprint of a model under one side convention.

    Attributes
    ----------
    theta_star : float
        Minimiser of the relevant exponent.
    zeta_star : float
        Minimum value, the dominant singularity (strictly negative).
    k_star : float
        ``sqrt(2 / psi_r''(theta_star))``.
    phi_zero : float
        Largest root of the relevant exponent (0 when its slope at 0 is positive).
    psi_prime_zero : float
        Slope of the relevant exponent at 0.
    side : Side
    """

    theta_star: float
    zeta_star: float
    k_star: float
    phi_zero: float
    psi_prime_zero: float
    side: Side


@lru_cache(maxsize=256)
def _critical_points(model: LevyModel, side: Side) -> CriticalPoints:
    r = relevant_model(model, side)
    theta = minimizer(r)
    zeta = laplace_exponent(r, theta)
    if not zeta < 0:
        raise AssumptionViolation(
            f"exponent minimum {zeta!r} at {theta!r} is not strictly negative"
        )
    k = math.sqrt(2.0 / exponent_derivative(r, theta, 2))
    slope0 = exponent_derivative(r, 0.0, 1)
    phi0 = 0.0 if slope0 > 0 else _inverse_scalar(r, 0.0)
    return CriticalPoints(theta, zeta, k, phi0, slope0, side)


def critical_points(model: LevyModel, side: Side | str | None = None) -> CriticalPoints:
    """Critical points of ``model`` (cached per model and side).

    Raises
    ------
    AssumptionViolation
        If the relevant exponent does not attain a strictly negative minimum.
    """
    return _critical_points(model, resolve_side(model, side))


def tilt_exponent(model: LevyModel, eta: float, beta):
    """Exponentially tilted exponent ``psi(eta + beta) - psi(eta)``."""
    if isinstance(beta, (list, tuple)):
        beta = np.asarray(beta)
    return laplace_exponent(model, eta + beta) - laplace_exponent(model, eta)


def square_root_expansion(model: LevyModel, vartheta, side: Side | str | None = None):
    """Two-term expansion ``theta* + k* sqrt(vartheta - zeta*)`` of the inverse."""
    cp = critical_points(model, side)
    gap = np.asarray(vartheta, dtype=float) - cp.zeta_star
    if np.any(gap <= 0):
        raise BelowSingularity("square-root expansion needs vartheta > zeta_star")
    out = cp.theta_star + cp.k_star * np.sqrt(gap)
    return float(out) if out.ndim == 0 else out
