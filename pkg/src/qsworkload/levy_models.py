"""Spectrally one-sided Levy input processes with exponential jumps.

A model describes the free (unreflected) net input ``X(t)``::

    X(t) = drift * t + sigma * B(t) + sign * (compound Poisson, rate jump_rate, Exp(jump_param) sizes)

where ``sign`` is +1 for upward jumps and -1 for downward jumps.  The
reflected workload is ``Q(t) = X(t) - inf_{s<=t} X(s)``.

All exponent helpers accept real or complex scalars/arrays.  Only
:func:`laplace_exponent` enforces the moment domain; the ``reduced_*`` and
``*_divided_difference`` helpers are the rational analytic continuations used
by the transform layer.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import DomainError, ModelError, StabilityError

__all__ = [
    "Kind",
    "LevyModel",
    "StationaryLaw",
    "laplace_exponent",
    "exponent_derivative",
    "reduced_exponent",
    "reduced_exponent_derivative",
    "reduced_divided_difference",
    "exponent_divided_difference",
    "continued_exponent",
    "dual",
    "stationary_law",
    "model_from_dict",
    "model_from_json",
    "load_model",
]

MODEL_FIELDS = ("kind", "drift", "sigma", "jump_rate", "jump_param")


class Kind(str, Enum):
    SPECTRALLY_POSITIVE_CP = "SpectrallyPositiveCP"
    SPECTRALLY_NEGATIVE_CP = "SpectrallyNegativeCP"
    LINEAR_BROWNIAN = "LinearBrownian"


_FLIP = {
    Kind.SPECTRALLY_POSITIVE_CP: Kind.SPECTRALLY_NEGATIVE_CP,
    Kind.SPECTRALLY_NEGATIVE_CP: Kind.SPECTRALLY_POSITIVE_CP,
    Kind.LINEAR_BROWNIAN: Kind.LINEAR_BROWNIAN,
}


@dataclass(frozen=True)
class LevyModel:
    """Immutable description of the input process.

    Parameters
    ----------
    kind : Kind
        Process family.
    drift : float
        Deterministic drift of ``X``.
    sigma : float
        Brownian coefficient; must be 0 for the compound Poisson kinds and
        positive for ``LinearBrownian``.
    jump_rate : float
        Poisson rate of jumps; 0 for ``LinearBrownian``.
    jump_param : float
        Rate of the exponential jump-size law (ignored when there are no jumps,
        but must still be positive).
    is_dual : bool
        True for the dual ``-X`` of a stable model.  Stability is then
        mirrored (``E X(1) > 0``).  Never read from model documents.
    """

    kind: Kind
    drift: float
    sigma: float = 0.0
    jump_rate: float = 0.0
    jump_param: float = 1.0
    is_dual: bool = False

    def __post_init__(self):
        try:
            kind = Kind(self.kind)
        except ValueError:
            raise ModelError(f"unknown model kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        for name in ("drift", "sigma", "jump_rate", "jump_param"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                raise ModelError(f"{name} must be a real number, got {value!r}")
            value = float(value)
            if not math.isfinite(value):
                raise ModelError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

        if self.sigma < 0:
            raise ModelError("sigma must be >= 0")
        if self.jump_rate < 0:
            raise ModelError("jump_rate must be >= 0")
        if self.jump_param <= 0:
            raise ModelError("jump_param must be > 0")
        if self.sigma == 0 and self.jump_rate == 0:
            raise ModelError("sigma and jump_rate cannot both be zero")
        if kind is Kind.LINEAR_BROWNIAN:
            if self.jump_rate != 0:
                raise ModelError("LinearBrownian has no jumps (jump_rate must be 0)")
        else:
            if self.sigma != 0:
                raise ModelError(f"{kind.value} is pure compound Poisson (sigma must be 0)")
            if self.jump_rate == 0:
                raise ModelError(f"{kind.value} needs jump_rate > 0")
            # jumps and drift must push in opposite directions, otherwise the
            # workload is trivially zero (or the process is a subordinator)
            if self.drift * self.jump_sign >= 0:
                raise ModelError(
                    f"{kind.value} needs a drift of sign {-self.jump_sign:+d}, got {self.drift}"
                )

        mean = self.mean_drift
        if not self.is_dual and not mean < 0:
            raise StabilityError(
                f"stability condition E X(1) < 0 violated: E X(1) = {mean:.6g} for {self.describe()}"
            )
        if self.is_dual and not mean > 0:
            raise StabilityError(f"dual model must have E X(1) > 0, got {mean:.6g}")

    @classmethod
    def mm1(cls, arrival_rate: float, service_rate: float) -> LevyModel:
        """M/M/1 workload input ``sum of Exp(service_rate) jobs - t``."""
        return cls(Kind.SPECTRALLY_POSITIVE_CP, -1.0, 0.0, arrival_rate, service_rate)

    @classmethod
    def brownian(cls, sigma: float = 1.0, drift: float = -1.0) -> LevyModel:
        return cls(Kind.LINEAR_BROWNIAN, drift, sigma, 0.0, 1.0)

    @classmethod
    def negative_cp(cls, drift: float, jump_rate: float, jump_param: float) -> LevyModel:
        """Linear fill at rate ``drift`` with Exp(jump_param) downward jumps."""
        return cls(Kind.SPECTRALLY_NEGATIVE_CP, drift, 0.0, jump_rate, jump_param)

    @property
    def jump_sign(self) -> int:
        if self.kind is Kind.SPECTRALLY_POSITIVE_CP:
            return 1
        if self.kind is Kind.SPECTRALLY_NEGATIVE_CP:
            return -1
        return 0

    @property
    def mean_drift(self) -> float:
        """``E X(1)``."""
        return self.drift + self.jump_sign * self.jump_rate / self.jump_param

    @property
    def theta_domain(self) -> tuple[float, float]:
        """Open interval of real ``eta`` with ``E exp(eta X(1)) < inf``."""
        if self.jump_sign > 0:
            return (-math.inf, self.jump_param)
        if self.jump_sign < 0:
            return (-self.jump_param, math.inf)
        return (-math.inf, math.inf)

    @property
    def spectrally_positive(self) -> bool:
        return self.kind is not Kind.SPECTRALLY_NEGATIVE_CP

    @property
    def spectrally_negative(self) -> bool:
        return self.kind is not Kind.SPECTRALLY_POSITIVE_CP

    @property
    def rho(self) -> float:
        """Load ``jump_rate / (jump_param * |drift|)`` of the compound Poisson part."""
        return self.jump_rate / (self.jump_param * abs(self.drift))

    def describe(self) -> str:
        tag = "dual " if self.is_dual else ""
        if self.kind is Kind.LINEAR_BROWNIAN:
            return f"{tag}LinearBrownian(drift={self.drift:g}, sigma={self.sigma:g})"
        return (
            f"{tag}{self.kind.value}(drift={self.drift:g}, jump_rate={self.jump_rate:g}, "
            f"jump_param={self.jump_param:g})"
        )

    def to_dict(self) -> dict:
        if self.is_dual:
            raise ModelError("dual models are internal and have no document form")
        return {
            "kind": self.kind.value,
            "drift": self.drift,
            "sigma": self.sigma,
            "jump_rate": self.jump_rate,
            "jump_param": self.jump_param,
        }


def _ret(value):
    if np.ndim(value) == 0:
        value = value.item() if isinstance(value, np.ndarray) else value
        if isinstance(value, (complex, np.complexfloating)):
            return complex(value)
        return float(value)
    return value


def _arg(eta):
    if isinstance(eta, (list, tuple)):
        return np.asarray(eta)
    return eta


def _check_domain(model: LevyModel, eta) -> None:
    lo, hi = model.theta_domain
    re = np.real(eta)
    if np.any(re <= lo) or np.any(re >= hi) or np.any(np.isnan(re)):
        raise DomainError(
            f"Re(eta) must lie in ({lo:g}, {hi:g}) for {model.describe()}"
        )


def laplace_exponent(model: LevyModel, eta):
    """``psi(eta) = log E exp(eta X(1))``.

    Raises
    ------
    DomainError
        If the real part of ``eta`` is outside the moment domain.
    """
    eta = _arg(eta)
    _check_domain(model, eta)
    return _ret(continued_exponent(model, eta))


def continued_exponent(model: LevyModel, eta):
    """Rational continuation of ``psi`` (no domain check)."""
    eta = _arg(eta)
    value = model.drift * eta + 0.5 * model.sigma**2 * eta * eta
    if model.jump_rate:
        s, nu = model.jump_sign, model.jump_param
        value = value + model.jump_rate * s * eta / (nu - s * eta)
    return _ret(value)


def exponent_derivative(model: LevyModel, eta, order: int = 1):
    """First or second derivative of ``psi`` (domain-checked)."""
    eta = _arg(eta)
    _check_domain(model, eta)
    lam, nu, s = model.jump_rate, model.jump_param, model.jump_sign
    if order == 1:
        value = model.drift + model.sigma**2 * eta
        if lam:
            value = value + lam * nu * s / (nu - s * eta) ** 2
    elif order == 2:
        value = model.sigma**2 + 0.0 * eta
        if lam:
            value = value + 2.0 * lam * nu / (nu - s * eta) ** 3
    else:
        raise ValueError("order must be 1 or 2")
    return _ret(value)


def reduced_exponent(model: LevyModel, eta):
    """``h(eta) = psi(eta) / eta``, analytic at 0 with ``h(0) = psi'(0)``."""
    eta = _arg(eta)
    value = model.drift + 0.5 * model.sigma**2 * eta
    if model.jump_rate:
        s, nu = model.jump_sign, model.jump_param
        value = value + model.jump_rate * s / (nu - s * eta)
    return _ret(value)


def reduced_exponent_derivative(model: LevyModel, eta):
    """``h'(eta)``; note ``eta psi'(eta) - psi(eta) = eta**2 h'(eta)``."""
    eta = _arg(eta)
    value = 0.5 * model.sigma**2 + 0.0 * eta
    if model.jump_rate:
        s, nu = model.jump_sign, model.jump_param
        value = value + model.jump_rate / (nu - s * eta) ** 2
    return _ret(value)


def reduced_divided_difference(model: LevyModel, u, v):
    """``(h(u) - h(v)) / (u - v)``, equal to ``h'(u)`` on the diagonal."""
    u, v = _arg(u), _arg(v)
    value = 0.5 * model.sigma**2 + 0.0 * (u + v)
    if model.jump_rate:
        s, nu = model.jump_sign, model.jump_param
        value = value + model.jump_rate / ((nu - s * u) * (nu - s * v))
    return _ret(value)


def exponent_divided_difference(model: LevyModel, x, y):
    """``(psi(x) - psi(y)) / (x - y)``, equal to ``psi'(x)`` on the diagonal."""
    x, y = _arg(x), _arg(y)
    value = model.drift + 0.5 * model.sigma**2 * (x + y)
    if model.jump_rate:
        s, nu = model.jump_sign, model.jump_param
        value = value + model.jump_rate * s * nu / ((nu - s * x) * (nu - s * y))
    return _ret(value)


def dual(model: LevyModel) -> LevyModel:
    """Model of ``-X``: drift negated, jump direction flipped."""
    return replace(model, kind=_FLIP[model.kind], drift=-model.drift, is_dual=not model.is_dual)


@dataclass(frozen=True)
class StationaryLaw:
    """Stationary workload law ``pi``.

    ``ExponentialRate``: ``pi = Exp(rate)`` (spectrally negative input).
    ``GeometricCompound``: atom ``1 - rho`` at 0, otherwise a geometric(rho)
    number (at least one) of Exp(rate) summands, which is ``Exp(rate (1 - rho))``.
    """

    representation: str
    rate: float
    rho: float = 1.0

    @property
    def atom(self) -> float:
        return 1.0 - self.rho if self.representation == "GeometricCompound" else 0.0

    @property
    def tail_rate(self) -> float:
        if self.representation == "GeometricCompound":
            return self.rate * (1.0 - self.rho)
        return self.rate

    @property
    def mean(self) -> float:
        return (1.0 - self.atom) / self.tail_rate

    def transform(self, s):
        """``E exp(-s Q)`` under ``pi``."""
        s = _arg(s)
        if self.representation == "GeometricCompound":
            return _ret((1.0 - self.rho) / (1.0 - self.rho * self.rate / (self.rate + s)))
        return _ret(self.rate / (self.rate + s))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0, 0.0, 1.0 - (1.0 - self.atom) * np.exp(-self.tail_rate * np.maximum(x, 0.0)))
        return _ret(out)

    def ppf(self, u):
        """Inverse CDF (generalised inverse on the atom)."""
        u = np.asarray(u, dtype=float)
        atom = self.atom
        tail = np.maximum((1.0 - u) / (1.0 - atom), np.finfo(float).tiny)
        return _ret(np.where(u <= atom, 0.0, -np.log(tail) / self.tail_rate))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.asarray(self.ppf(rng.random(size)))


def stationary_law(model: LevyModel) -> StationaryLaw:
    """Stationary workload law of the reflected process.

    Raises
    ------
    StabilityError
        For dual (unstable) models.
    """
    if model.is_dual or not model.mean_drift < 0:
        raise StabilityError("stationary law needs E X(1) < 0")
    if model.kind is Kind.LINEAR_BROWNIAN:
        return StationaryLaw("ExponentialRate", -2.0 * model.drift / model.sigma**2)
    if model.kind is Kind.SPECTRALLY_NEGATIVE_CP:
        # largest root of psi: d*eta - lam*eta/(nu+eta) = 0
        return StationaryLaw("ExponentialRate", model.jump_rate / model.drift - model.jump_param)
    return StationaryLaw("GeometricCompound", model.jump_param, model.rho)


def model_from_dict(data) -> LevyModel:
    """Build a model from a document with exactly the five model fields."""
    if not isinstance(data, dict):
        raise ModelError("model document must be a JSON object")
    unknown = sorted(set(data) - set(MODEL_FIELDS))
    if unknown:
        raise ModelError(f"unknown model field(s): {', '.join(unknown)}")
    missing = [f for f in MODEL_FIELDS if f not in data]
    if missing:
        raise ModelError(f"missing model field(s): {', '.join(missing)}")
    return LevyModel(**{f: data[f] for f in MODEL_FIELDS})


def model_from_json(text: str) -> LevyModel:
    """Parse a JSON model document; ``json.JSONDecodeError`` propagates."""
    return model_from_dict(json.loads(text))


def load_model(path) -> LevyModel:
    return model_from_json(Path(path).read_text())
