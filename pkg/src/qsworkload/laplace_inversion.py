"""Numerical Laplace inversion and the square-root Heaviside asymptotics.

The primary scheme is the fixed Talbot contour; an Euler-summed Bromwich
line is run alongside as an independent check.  Both work on the shifted
transform ``z -> f~(z + a)`` so that the abscissa ``a`` (the right-most
singularity) sits at the origin of the contour.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import comb, gamma

from .errors import FitError, OscillationError, ParameterError
from .tables import DensityTable, make_grid

__all__ = [
    "InversionSpec",
    "HeavisideAsymptote",
    "invert",
    "talbot",
    "euler",
    "initial_value",
    "heaviside_tail",
    "fit_singularity",
]

TOLERANCE = 1e-6
EULER_ORDER = 16
FIT_EPSILONS = (1e-4, 1e-6, 1e-8)


def _evaluate(transform: Callable, z: np.ndarray) -> np.ndarray:
    """Call ``transform`` on an array, falling back to pointwise calls."""
    try:
        out = np.asarray(transform(z), dtype=complex)
        if out.shape == z.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([complex(transform(complex(v))) for v in z.ravel()]).reshape(z.shape)


def talbot(transform: Callable, t, order: int = 32, shift: float = 0.0) -> np.ndarray:
    """Fixed Talbot inversion at times ``t > 0``.

    Parameters
    ----------
    transform : callable
        Complex-vectorised transform ``f~``.
    t : array_like
        Positive evaluation points.
    order : int
        Number of contour nodes ``M``.
    shift : float
        Abscissa ``a``; all singularities must satisfy ``Re <= a``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    m = int(order)
    k = np.arange(1, m)
    theta = k * np.pi / m
    cot = 1.0 / np.tan(theta)
    r = 2.0 * m / (5.0 * t)  # (n_t,)
    nodes = r[:, None] * theta[None, :] * (cot[None, :] + 1j)
    sigma = theta + (theta * cot - 1.0) * cot
    values = _evaluate(transform, nodes + shift)
    head = 0.5 * _evaluate(transform, (r + shift).astype(complex)).real * np.exp(r * t)
    body = np.real(np.exp(t[:, None] * nodes) * values * (1.0 + 1j * sigma[None, :])).sum(axis=1)
    return np.exp(shift * t) * (r / m) * (head + body)


def _euler_weights(m: int) -> np.ndarray:
    xi = np.zeros(2 * m + 1)
    xi[0] = 0.5
    xi[1 : m + 1] = 1.0
    xi[2 * m] = 2.0**-m
    for k in range(1, m):
        xi[2 * m - k] = xi[2 * m - k + 1] + 2.0**-m * comb(m, k, exact=True)
    sign = (-1.0) ** np.arange(2 * m + 1)
    return 10.0 ** (m / 3.0) * sign * xi


def euler(transform: Callable, t, order: int = EULER_ORDER, shift: float = 0.0) -> np.ndarray:
    """Euler-summed Bromwich inversion at times ``t > 0`` (cross-check scheme)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    m = int(order)
    beta = m * math.log(10.0) / 3.0 + 1j * np.pi * np.arange(2 * m + 1)
    eta = _euler_weights(m)
    values = _evaluate(transform, beta[None, :] / t[:, None] + shift)
    return np.exp(shift * t) * (eta[None, :] * values.real).sum(axis=1) / t


def initial_value(transform: Callable) -> float:
    """``f(0+) = lim z f~(z)`` with Richardson extrapolation in ``z**-1/2``."""
    z = np.array([1e6, 4e6, 1.6e7])
    g = np.real(_evaluate(transform, z.astype(complex))) * z
    # nodes h, h/2, h/4: eliminate the O(h) and O(h^2) terms
    r1 = 2.0 * g[1] - g[0]
    r2 = 2.0 * g[2] - g[1]
    return float((4.0 * r2 - r1) / 3.0)


@dataclass
class InversionSpec:
    """What to invert and where.

    Attributes
    ----------
    transform : callable
        Complex-vectorised transform of the target function.
    abscissa : float
        Real ``a`` with every singularity of ``transform`` at ``Re <= a``.
    grid : array_like
        Strictly increasing non-negative evaluation points.
    scheme_order : int
        Talbot order (at least 8).
    meta : dict
        Passed through to the resulting :class:`DensityTable`.
    """

    transform: Callable
    abscissa: float
    grid: np.ndarray
    scheme_order: int = 32
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = make_grid(self.grid)
        if int(self.scheme_order) < 8:
            raise ParameterError("scheme_order must be >= 8")
        if not math.isfinite(self.abscissa):
            raise ParameterError("abscissa must be finite")


def invert(spec: InversionSpec, *, cross_check: bool = True, clip: bool = True):
    """Invert ``spec.transform`` on ``spec.grid``.

    Returns
    -------
    DensityTable or numpy.ndarray
        A :class:`DensityTable` (``clip=True``), or the raw values, which may
        be slightly negative or exceed 1e-9 in magnitude below zero.

    Raises
    ------
    OscillationError
        If orders ``M`` and ``M+1`` differ by more than 1e-6 at a grid point,
        or the Euler cross-check disagrees by more than 1e-6.
    """
    x = spec.grid
    f = np.empty_like(x)
    pos = x > 0
    if np.any(~pos):
        f[~pos] = initial_value(lambda z: spec.transform(z))
    if np.any(pos):
        xp = x[pos]
        a = spec.abscissa
        base = talbot(spec.transform, xp, spec.scheme_order, a)
        nxt = talbot(spec.transform, xp, spec.scheme_order + 1, a)
        err = np.abs(base - nxt)
        if np.any(err > TOLERANCE):
            i = int(np.argmax(err))
            raise OscillationError(
                f"Talbot orders {spec.scheme_order}/{spec.scheme_order + 1} differ by {err[i]:.3g} at x={xp[i]:g}"
            )
        if cross_check:
            alt = euler(spec.transform, xp, EULER_ORDER, a)
            gap = np.abs(base - alt)
            if np.any(gap > TOLERANCE):
                i = int(np.argmax(gap))
                raise OscillationError(
                    f"Talbot and Euler disagree by {gap[i]:.3g} at x={xp[i]:g}"
                )
        f[pos] = base
    if not clip:
        return f
    meta = {"method": "inversion", **spec.meta}
    return DensityTable(x, f, meta)


@dataclass(frozen=True)
class HeavisideAsymptote:
    """Constants of ``f~(z) = K - C (z - zeta*)^s + o(...)`` near ``zeta*``."""

    zeta_star: float
    s_exponent: float
    c_coefficient: float
    k_constant: float

    def __post_init__(self):
        if float(self.s_exponent).is_integer() or self.s_exponent <= 0:
            raise ParameterError("s_exponent must be positive and non-integer")


def _gamma_neg(s: float) -> float:
    return -2.0 * math.sqrt(math.pi) if s == 0.5 else float(gamma(-s))


def heaviside_tail(h: HeavisideAsymptote, x):
    """Leading-order behaviour ``-C / Gamma(-s) x^{-s-1} e^{zeta* x}``.

    The minus sign matches the ``K - C (z - zeta*)^s`` expansion used by
    :func:`fit_singularity`, so positive ``C`` yields a positive tail.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ParameterError("x must be > 0")
    s = h.s_exponent
    val = -h.c_coefficient / _gamma_neg(s) * x ** (-s - 1.0) * np.exp(h.zeta_star * x)
    return float(val) if val.ndim == 0 else val


def fit_singularity(transform: Callable, zeta_star: float, epsilons=FIT_EPSILONS) -> HeavisideAsymptote:
    """Fit ``K`` and ``C`` of a square-root singularity at ``zeta_star``.

    The transform is sampled at ``zeta_star + eps`` on real points; with
    ``h = sqrt(eps)`` a quadratic ``K - C h + D h**2`` is matched exactly
    (Richardson extrapolation).  The raw slopes ``(K - f~)/sqrt(eps)`` must
    agree to 5%.

    Raises
    ------
    FitError
        If the slopes disagree (including a missing singular part).
    """
    eps = np.asarray(epsilons, dtype=float)
    h = np.sqrt(eps)
    vals = np.array([float(np.real(transform(zeta_star + e))) for e in eps])
    vand = np.column_stack([np.ones_like(h), -h, h * h])
    k, c, _ = np.linalg.solve(vand, vals)
    slopes = (k - vals) / h
    centre = np.mean(slopes)
    if centre == 0 or not np.all(np.isfinite(slopes)):
        raise FitError("no square-root singular part detected")
    spread = (slopes.max() - slopes.min()) / abs(centre)
    if spread > 0.05:
        raise FitError(f"slope estimates disagree by {100 * spread:.1f}% (> 5%)")
    return HeavisideAsymptote(float(zeta_star), 0.5, float(c), float(k))
