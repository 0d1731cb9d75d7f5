"""Simulation-versus-theory checks shared by the CLI and the test-suite."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .closed_forms import closed_form_law
from .errors import CapabilityError
from .exponent_analysis import critical_points
from .laplace_inversion import InversionSpec, invert
from .levy_models import Kind, LevyModel
from .qs_transforms import brownian_exact_tail, busy_period_tail, busy_period_tail_transform, qs_transform
from .simulator import EmpiricalConditional, SimulationConfig, ks_distance, simulate

__all__ = [
    "Check",
    "reference_cdf",
    "inverted_tail",
    "verification_checks",
    "RefinementRow",
    "refinement_study",
    "KS_TOLERANCE",
]

KS_TOLERANCE = {Kind.LINEAR_BROWNIAN: 0.02, Kind.SPECTRALLY_POSITIVE_CP: 0.03, Kind.SPECTRALLY_NEGATIVE_CP: 0.03}
SE_MULTIPLE = 3.0
ASYMPTOTE_T = 50.0
ASYMPTOTE_BAND = (0.95, 1.05)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    target: str
    passed: bool

    def row(self) -> str:
        return f"{self.name:<34} {self.value:>14.6g}  {self.target:<26} {'PASS' if self.passed else 'FAIL'}"


def reference_cdf(model: LevyModel, marginal: str, n_grid: int = 801):
    """CDF of a QS marginal: closed form when available, otherwise by inversion of ``F~(z)/z``."""
    try:
        return closed_form_law(model, marginal).cdf
    except CapabilityError:
        pass
    pair = qs_transform(model)
    factor = pair.a_factor if marginal == "QS_left" else pair.b_factor
    h = 1e-6
    mean = (1.0 - float(np.real(factor(h)))) / h
    grid = np.linspace(0.0, 40.0 * mean, n_grid)
    cdf = invert(InversionSpec(lambda z: factor(z) / z, 0.0, grid), clip=False)
    cdf = np.clip(np.maximum.accumulate(cdf), 0.0, 1.0)
    return lambda x: np.interp(np.asarray(x, dtype=float), grid, cdf, left=0.0, right=1.0)


def inverted_tail(model: LevyModel, t) -> np.ndarray:
    """``P_pi(T > t)`` by numerical inversion of ``L(z; 0, 0)``."""
    cp = critical_points(model)
    grid = np.atleast_1d(np.asarray(t, dtype=float))
    return invert(InversionSpec(busy_period_tail_transform(model), cp.zeta_star, grid), clip=False)


def _is_unit_brownian(model: LevyModel) -> bool:
    return model.kind is Kind.LINEAR_BROWNIAN and model.drift == -1.0


def verification_checks(result: EmpiricalConditional) -> list[Check]:
    """Pass/fail rows comparing a conditioned sample with the theory."""
    model, t = result.model, result.horizon_t
    p, se = result.survival_estimate, result.std_error
    checks = []
    exact = float(inverted_tail(model, t)[0])
    z = abs(p - exact) / se if se > 0 else math.inf
    checks.append(Check("survival vs inverted P(T>t) [se]", z, f"<= {SE_MULTIPLE:g} se", z <= SE_MULTIPLE))
    if _is_unit_brownian(model):
        ref = brownian_exact_tail(model.sigma, t)
        z = abs(p - ref) / se if se > 0 else math.inf
        checks.append(Check("survival vs exact Brownian [se]", z, f"<= {SE_MULTIPLE:g} se", z <= SE_MULTIPLE))
        ratio = busy_period_tail(model, ASYMPTOTE_T) / brownian_exact_tail(model.sigma, ASYMPTOTE_T)
        lo, hi = ASYMPTOTE_BAND
        checks.append(Check(f"asymptote/exact at t={ASYMPTOTE_T:g}", ratio, f"in [{lo:g}, {hi:g}]", lo <= ratio <= hi))
    tol = KS_TOLERANCE[model.kind]
    for label, sample, marginal in (("Q(0)", result.q0, "QS_left"), ("Q(t)", result.qt, "QS_right")):
        d = ks_distance(sample, reference_cdf(model, marginal))
        checks.append(Check(f"KS {label} vs QS law", d, f"< {tol:g}", d < tol))
    return checks


@dataclass(frozen=True)
class RefinementRow:
    t: float
    dt: float | None
    n_paths: int
    n_survivors: int
    survival: float
    std_error: float
    survival_half_dt: float | None
    ks_q0: float
    ks_qt: float
    corr: float
    mean_q0: float
    mean_qt: float

    def as_dict(self) -> dict:
        return asdict(self)


def refinement_study(model: LevyModel, horizons, n_paths: int, seed: int = 0, dt: float = 0.01,
                     workers: int = 1, backend: str | None = None) -> list[RefinementRow]:
    """Conditioned statistics over increasing horizons (and a coupled dt/2 run for diffusions)."""
    cdf_left = reference_cdf(model, "QS_left")
    cdf_right = reference_cdf(model, "QS_right")
    rows = []
    for t in horizons:
        cfg = SimulationConfig(model, float(t), n_paths, seed, dt, workers, backend=backend)
        res = simulate(cfg)
        half = None
        if model.kind is Kind.LINEAR_BROWNIAN:
            fine = SimulationConfig(model, float(t), n_paths, seed, dt, workers, bisect=True, backend=backend)
            half = simulate(fine).survival_estimate
        corr = res.correlation() if res.n_survivors > 1 else math.nan
        rows.append(RefinementRow(
            float(t), res.dt, n_paths, res.n_survivors, res.survival_estimate, res.std_error, half,
            ks_distance(res.q0, cdf_left) if res.n_survivors else math.nan,
            ks_distance(res.qt, cdf_right) if res.n_survivors else math.nan,
            corr, float(res.q0.mean()) if res.n_survivors else math.nan,
            float(res.qt.mean()) if res.n_survivors else math.nan,
        ))
    return rows
