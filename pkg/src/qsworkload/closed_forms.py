"""Exact quasi-stationary laws for the worked examples.

Covers linear Brownian motion, the M/M/1 workload (unit negative drift,
exponential jobs) and the three-factor decomposition of the QS initial
workload for spectrally positive input.  All laws are stored as
``(shape, rate)`` pairs or explicit mixtures and sampled by inverse CDF.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.special import gammainc, gammaincinv, gammaln, ndtr

from .errors import AssumptionViolation, CapabilityError, ParameterError
from .exponent_analysis import Side, critical_points, relevant_model
from .levy_models import Kind, LevyModel, reduced_exponent, stationary_law
from .qs_transforms import brownian_exact_tail
from .tables import MARGINALS, DensityTable, make_grid

__all__ = [
    "Erlang",
    "ExpErlangMixture",
    "MM1QsLeft",
    "RemarkDecomposition",
    "brownian_qs_density",
    "mm1_qs_left_sampler",
    "mm1_qs_left_pmf_check",
    "mm1_qs_right_density",
    "mm1_qs_right_law",
    "remark_decomposition_sampler",
    "remark_decomposition",
    "brownian_finite_t_q0_density",
    "brownian_finite_t_q0_cdf",
    "closed_form_law",
    "closed_form_table",
    "is_mm1",
]


def _ret(v):
    return float(v) if np.ndim(v) == 0 else v


@dataclass(frozen=True)
class Erlang:
    """Gamma law with integer ``shape`` and per-stage ``rate``."""

    shape: int
    rate: float

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        r, k = self.rate, self.shape
        out = np.where(x >= 0, r**k * np.maximum(x, 0) ** (k - 1) * np.exp(-r * x) / math.factorial(k - 1), 0.0)
        return _ret(out)

    def cdf(self, x):
        return _ret(gammainc(self.shape, self.rate * np.maximum(np.asarray(x, dtype=float), 0.0)))

    def transform(self, alpha):
        return (self.rate / (self.rate + np.asarray(alpha))) ** self.shape

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return gammaincinv(self.shape, rng.random(size)) / self.rate


@dataclass(frozen=True)
class ExpErlangMixture:
    """``(1-w) Exp(rate) + w Erlang(2, rate)``."""

    weight: float
    rate: float

    def pdf(self, y):
        y = np.asarray(y, dtype=float)
        r, w = self.rate, self.weight
        out = np.where(y >= 0, ((1 - w) * r + w * r * r * np.maximum(y, 0)) * np.exp(-r * y), 0.0)
        return _ret(out)

    def cdf(self, y):
        z = self.rate * np.maximum(np.asarray(y, dtype=float), 0.0)
        return _ret((1 - self.weight) * gammainc(1, z) + self.weight * gammainc(2, z))

    def transform(self, beta):
        f = self.rate / (self.rate + np.asarray(beta))
        return (1 - self.weight) * f + self.weight * f * f

    @property
    def mean(self) -> float:
        return (1 + self.weight) / self.rate

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        stages = np.where(rng.random(size) < self.weight, 2, 1)
        return gammaincinv(stages, rng.random(size)) / self.rate


def _check_rho(lam: float, nu: float) -> float:
    if not (lam > 0 and nu > 0):
        raise ParameterError("lambda and nu must be positive")
    rho = lam / nu
    if rho >= 1:
        raise ParameterError(f"load rho = {rho:g} must be < 1")
    return rho


def brownian_qs_density(sigma: float, marginal: str = "QS_left", drift: float = -1.0):
    """Density of either QS marginal for ``X = drift t + sigma B``: Erlang(2, |drift|/sigma**2)."""
    if sigma <= 0 or drift >= 0:
        raise ParameterError("need sigma > 0 and drift < 0")
    if marginal not in ("QS_left", "QS_right"):
        raise ParameterError(f"marginal must be QS_left or QS_right, got {marginal!r}")
    return Erlang(2, abs(drift) / sigma**2).pdf


def mm1_qs_left_pmf_check(lam: float, nu: float, m: int) -> float:
    """``P(M = m) = (m-1) p^(m-2) (1-p)^2`` with ``p = sqrt(rho)``; 0 for ``m < 2``."""
    p = math.sqrt(_check_rho(lam, nu))
    if m < 2:
        return 0.0
    return (m - 1) * p ** (m - 2) * (1 - p) ** 2


@dataclass(frozen=True)
class MM1QsLeft:
    """Negative-binomial(2, sqrt(rho)) number of Exp(sqrt(lambda nu)) stages."""

    lam: float
    nu: float

    def __post_init__(self):
        _check_rho(self.lam, self.nu)

    @property
    def p(self) -> float:
        return math.sqrt(self.lam / self.nu)

    @property
    def stage_rate(self) -> float:
        return math.sqrt(self.lam * self.nu)

    @cached_property
    def _table(self) -> tuple[np.ndarray, np.ndarray]:
        p = self.p
        # truncate where the remaining mass is below double precision
        m_max = 2
        while (m_max + 1) * p ** (m_max - 1) > 1e-18 and m_max < 100000:
            m_max += 1
        m = np.arange(2, m_max + 1)
        pmf = (m - 1) * p ** (m - 2.0) * (1 - p) ** 2
        return m, pmf

    def pmf(self, m):
        m = np.asarray(m)
        p = self.p
        out = np.where(m >= 2, (m - 1) * p ** np.maximum(m - 2.0, 0) * (1 - p) ** 2, 0.0)
        return _ret(out)

    def pdf(self, x):
        m, pmf = self._table
        r = self.stage_rate
        x0 = np.asarray(x, dtype=float)
        x = np.atleast_1d(x0)
        z = r * np.maximum(x, 1e-300)
        logs = (m[:, None] - 1) * np.log(z)[None, :] - z[None, :] - gammaln(m)[:, None]
        out = np.where(x > 0, r * (pmf @ np.exp(logs)), 0.0)
        return _ret(out.reshape(x0.shape))

    def cdf(self, x):
        m, pmf = self._table
        z = self.stage_rate * np.maximum(np.asarray(x, dtype=float), 0.0)
        out = gammainc(m[:, None], np.atleast_1d(z)[None, :]).T @ pmf
        return _ret(out.reshape(np.shape(z)))

    def transform(self, alpha):
        p, r = self.p, self.stage_rate
        f = r / (r + np.asarray(alpha))
        return ((1 - p) * f / (1 - p * f)) ** 2

    @property
    def mean(self) -> float:
        return 2.0 / ((1 - self.p) * self.stage_rate)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        m, pmf = self._table
        cum = np.cumsum(pmf)
        idx = np.minimum(np.searchsorted(cum, rng.random(size) * cum[-1], side="right"), m.size - 1)
        return gammaincinv(m[idx], rng.random(size)) / self.stage_rate


def mm1_qs_left_sampler(lam: float, nu: float) -> MM1QsLeft:
    """QS law of the initial workload for M/M/1 (``sample(rng, size)``, ``cdf``, ``transform``)."""
    return MM1QsLeft(float(lam), float(nu))


def mm1_qs_right_law(lam: float, nu: float) -> ExpErlangMixture:
    """QS law of the terminal workload for M/M/1."""
    rho = _check_rho(lam, nu)
    return ExpErlangMixture(math.sqrt(rho), nu - math.sqrt(lam * nu))


def mm1_qs_right_density(lam: float, nu: float):
    """``y -> (1-p) r e^{-ry} + p r^2 y e^{-ry}``, ``p = sqrt(rho)``, ``r = nu - sqrt(lam nu)``."""
    return mm1_qs_right_law(lam, nu).pdf


@dataclass(frozen=True)
class RemarkDecomposition:
    """QS initial workload as ``S1 + S2 + S3`` for spectrally positive input.

    ``S1, S2`` are i.i.d. copies of the ``theta*``-tilted stationary
    workload: 0 with probability ``1 - q``, otherwise Exp(``tilted_rate``).
    ``S3`` is Erlang(2, ``erlang_rate``), or identically 0 when
    ``erlang_rate`` is None (no jumps).
    """

    q: float
    tilted_rate: float
    erlang_rate: float | None

    def factors(self, alpha):
        alpha = np.asarray(alpha)
        f1 = (1 - self.q) + self.q * self.tilted_rate / (self.tilted_rate + alpha)
        f3 = 1.0 + 0.0 * alpha if self.erlang_rate is None else Erlang(2, self.erlang_rate).transform(alpha)
        return f1, f1, f3

    def transform(self, alpha):
        f1, f2, f3 = self.factors(alpha)
        return f1 * f2 * f3

    @property
    def mean(self) -> float:
        m3 = 0.0 if self.erlang_rate is None else 2.0 / self.erlang_rate
        return 2.0 * self.q / self.tilted_rate + m3

    def _tilted(self, u: np.ndarray) -> np.ndarray:
        tail = np.maximum((1.0 - u) / self.q, np.finfo(float).tiny)
        return np.where(u <= 1 - self.q, 0.0, -np.log(np.minimum(tail, 1.0)) / self.tilted_rate)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random((3, size))
        out = self._tilted(u[0]) + self._tilted(u[1])
        if self.erlang_rate is not None:
            out = out + gammaincinv(2, u[2]) / self.erlang_rate
        return out


def remark_decomposition(model: LevyModel) -> RemarkDecomposition:
    """Build the three-factor decomposition for a spectrally positive model."""
    if not model.spectrally_positive:
        raise AssumptionViolation("three-factor decomposition needs spectrally positive input")
    cp = critical_points(model, Side.POSITIVE)
    dm = relevant_model(model, Side.POSITIVE)
    if model.kind is Kind.LINEAR_BROWNIAN:
        return RemarkDecomposition(1.0, abs(model.drift) / model.sigma**2, None)
    r = cp.theta_star + model.jump_param
    q = model.jump_rate / (abs(model.drift) * r)
    # tilted stationary transform h(theta*)/h(alpha + theta*) is a Geo(q)-compound of Exp(r)
    if not abs(reduced_exponent(dm, cp.theta_star) - abs(model.drift) * (1 - q)) < 1e-9 * abs(model.drift):
        raise AssumptionViolation("tilted stationary law is not a geometric compound")
    return RemarkDecomposition(q, r * (1 - q), r)


def remark_decomposition_sampler(model: LevyModel) -> RemarkDecomposition:
    """Sampler (``sample(rng, size)``) for ``S1 + S2 + S3``."""
    return remark_decomposition(model)


def brownian_finite_t_q0_density(t: float, q):
    """Density of ``Q(0)`` given ``T > t`` for ``X(s) = B(s) - s`` (exact, finite ``t``)."""
    q = np.asarray(q, dtype=float)
    st = math.sqrt(t)
    qq = np.maximum(q, 0.0)
    num = 2.0 * np.exp(-2.0 * qq) * ndtr((qq - t) / st) - 2.0 * ndtr((-qq - t) / st)
    return _ret(np.where(q > 0, num / brownian_exact_tail(1.0, t), 0.0))


def brownian_finite_t_q0_cdf(t: float, n: int = 200001):
    """CDF evaluator for :func:`brownian_finite_t_q0_density` (cumulative Simpson on a fine grid)."""
    q_max = t + 10.0 * math.sqrt(t) + 30.0
    grid = np.linspace(0.0, q_max, n)
    cum = cumulative_simpson(brownian_finite_t_q0_density(t, grid), x=grid, initial=0.0)
    cum /= cum[-1]
    return lambda x: _ret(np.interp(np.asarray(x, dtype=float), grid, cum, left=0.0, right=1.0))


def is_mm1(model: LevyModel) -> bool:
    return model.kind is Kind.SPECTRALLY_POSITIVE_CP and model.drift == -1.0 and not model.is_dual


def closed_form_law(model: LevyModel, marginal: str):
    """Exact law object (with ``pdf``/``cdf``) for supported models.

    Raises
    ------
    CapabilityError
        If no closed form is available for ``(model, marginal)``.
    """
    if marginal not in MARGINALS:
        raise ParameterError(f"marginal must be one of {MARGINALS}")
    if marginal == "stationary":
        law = stationary_law(model)
        if law.atom > 0:
            raise CapabilityError("stationary law has an atom at 0 and no density")
        return Erlang(1, law.rate)
    if model.kind is Kind.LINEAR_BROWNIAN:
        return Erlang(2, abs(model.drift) / model.sigma**2)
    if is_mm1(model):
        if marginal == "QS_left":
            return mm1_qs_left_sampler(model.jump_rate, model.jump_param)
        return mm1_qs_right_law(model.jump_rate, model.jump_param)
    if model.kind is Kind.SPECTRALLY_NEGATIVE_CP and marginal == "QS_right":
        return Erlang(2, critical_points(model, Side.NEGATIVE).theta_star)
    raise CapabilityError(f"no closed form for {marginal} of {model.describe()}")


def closed_form_table(model: LevyModel, marginal: str, grid) -> DensityTable:
    law = closed_form_law(model, marginal)
    x = make_grid(grid)
    meta = {"model": model.to_dict(), "marginal": marginal, "method": "closed_form"}
    return DensityTable(x, np.atleast_1d(law.pdf(x)), meta)
