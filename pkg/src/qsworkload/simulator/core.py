"""Monte Carlo of the stationary-start reflected process conditioned on ``T > t``."""
from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import BiasWarning, ConfigError, DomainError, EmptySample, InsufficientDataWarning
from ..levy_models import Kind, LevyModel, stationary_law
from ._backend import kernels, resolve_backend
from ._rng import ALGORITHM, stream_key

__all__ = [
    "SimulationConfig",
    "EmpiricalConditional",
    "simulate",
    "simulate_cp",
    "simulate_brownian",
    "estimate_master_transform",
    "ks_distance",
    "MIN_SURVIVORS",
]

CHUNK = 1 << 20
MIN_SURVIVORS = 1000
RECOMMENDED_DT = 1e-2
U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class SimulationConfig:
    """Simulation parameters.

    Attributes
    ----------
    model : LevyModel
    horizon_t : float
        Deterministic horizon ``t``.
    n_paths : int
        Paths launched (including those with ``Q(0) = 0``).
    seed : int
        Unsigned 64-bit seed.
    brownian_dt : float
        Grid step for diffusion paths (ignored for compound Poisson).
    workers : int
        Threads; results do not depend on it.
    bisect : bool
        Diffusion paths only: check the bridge on both halves of every step
        using the same Gaussian draws, i.e. a coupled ``dt/2`` refinement.
    backend : str or None
        ``"numba"``, ``"numpy"`` or None for the environment default.
    """

    model: LevyModel
    horizon_t: float
    n_paths: int
    seed: int = 0
    brownian_dt: float = 0.01
    workers: int = 1
    bisect: bool = False
    backend: str | None = None

    def __post_init__(self):
        if not isinstance(self.model, LevyModel):
            raise ConfigError("model must be a LevyModel")
        if self.model.is_dual:
            raise ConfigError("cannot simulate a dual (unstable) model")
        t = float(self.horizon_t)
        if not (math.isfinite(t) and t > 0):
            raise ConfigError("horizon_t must be finite and > 0")
        object.__setattr__(self, "horizon_t", t)
        if isinstance(self.n_paths, bool) or int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise ConfigError("n_paths must be an integer >= 1")
        object.__setattr__(self, "n_paths", int(self.n_paths))
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed <= U64_MAX:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "seed", int(self.seed))
        dt = float(self.brownian_dt)
        if not (math.isfinite(dt) and dt > 0):
            raise ConfigError("brownian_dt must be > 0")
        object.__setattr__(self, "brownian_dt", dt)
        if self.model.kind is Kind.LINEAR_BROWNIAN and dt > t / 100.0:
            raise ConfigError(f"brownian_dt={dt:g} exceeds horizon_t/100={t / 100:g}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError("workers must be an integer >= 1")
        try:
            resolve_backend(self.backend)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class EmpiricalConditional:
    """Surviving ``(Q(0), Q(t))`` pairs, sorted by path index."""

    path_index: np.ndarray
    q0: np.ndarray
    qt: np.ndarray
    n_total: int
    seed: int
    dt: float | None
    model: LevyModel
    horizon_t: float
    backend: str = "numba"
    extra: dict = field(default_factory=dict)

    @property
    def pairs(self) -> np.ndarray:
        return np.column_stack([self.q0, self.qt])

    @property
    def n_survivors(self) -> int:
        return int(self.q0.size)

    @property
    def survival_estimate(self) -> float:
        return self.n_survivors / self.n_total

    @property
    def std_error(self) -> float:
        p = self.survival_estimate
        return math.sqrt(p * (1.0 - p) / self.n_total)

    def correlation(self) -> float:
        if self.n_survivors < 2:
            raise EmptySample("need at least two survivors for a correlation")
        return float(np.corrcoef(self.q0, self.qt)[0, 1])

    def summary(self) -> dict:
        return {
            "n_total": self.n_total,
            "n_survivors": self.n_survivors,
            "survival_estimate": self.survival_estimate,
            "std_error": self.std_error,
            "seed": self.seed,
            "dt": self.dt,
            "t": self.horizon_t,
            "model": self.model.to_dict(),
            "rng": ALGORITHM,
            "backend": self.backend,
        }

    def to_csv(self) -> str:
        lines = ["path_index,q0,qt"]
        lines.extend(f"{i},{a:.17g},{b:.17g}" for i, a, b in zip(self.path_index.tolist(), self.q0.tolist(), self.qt.tolist()))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_csv())
        return path

    def write_summary(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")
        return path


def _kernel_call(config: SimulationConfig, exp_rate: float):
    model = config.model
    mod = kernels(config.backend)
    key = stream_key(config.seed)
    if model.kind is Kind.LINEAR_BROWNIAN:
        phi0 = stationary_law(model).rate

        def run(start, n, oi, oa, ob):
            return mod.brownian_paths(
                start, n, key, model.drift, model.sigma, phi0, config.horizon_t,
                exp_rate, config.brownian_dt, config.bisect, oi, oa, ob,
            )
    else:
        law = stationary_law(model)
        rho = law.rho if model.jump_sign > 0 else 1.0
        phi0 = law.rate if model.jump_sign < 0 else 1.0

        def run(start, n, oi, oa, ob):
            return mod.cp_paths(
                start, n, key, model.jump_sign, model.drift, model.jump_rate, model.jump_param,
                rho, phi0, config.horizon_t, exp_rate, oi, oa, ob,
            )

    return run


def _run(config: SimulationConfig, exp_rate: float = 0.0):
    run = _kernel_call(config, float(exp_rate))
    n = config.n_paths
    chunks = [(s, min(CHUNK, n - s)) for s in range(0, n, CHUNK)]

    def work(chunk):
        start, m = chunk
        oi = np.empty(m, dtype=np.int64)
        oa = np.empty(m)
        ob = np.empty(m)
        k = run(start, m, oi, oa, ob)
        return oi[:k].copy(), oa[:k].copy(), ob[:k].copy()

    if config.workers == 1 or len(chunks) == 1:
        parts = [work(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(work, chunks))
    # chunks are contiguous index ranges, so concatenation is already sorted
    idx = np.concatenate([p[0] for p in parts])
    q0 = np.concatenate([p[1] for p in parts])
    qt = np.concatenate([p[2] for p in parts])
    return idx, q0, qt


def _package(config: SimulationConfig, idx, q0, qt) -> EmpiricalConditional:
    dt = config.brownian_dt if config.model.kind is Kind.LINEAR_BROWNIAN else None
    res = EmpiricalConditional(
        idx, q0, qt, config.n_paths, config.seed, dt, config.model, config.horizon_t,
        resolve_backend(config.backend), {"bisect": config.bisect} if dt is not None else {},
    )
    if res.n_survivors < MIN_SURVIVORS:
        warnings.warn(
            f"only {res.n_survivors} surviving paths (< {MIN_SURVIVORS}); conditional estimates are unreliable",
            InsufficientDataWarning,
            stacklevel=3,
        )
    return res


def simulate_cp(config: SimulationConfig) -> EmpiricalConditional:
    """Exact event-driven simulation for compound Poisson input.

    Raises
    ------
    ConfigError
        If the model has a diffusion part.
    """
    if config.model.kind is Kind.LINEAR_BROWNIAN:
        raise ConfigError("simulate_cp needs a compound Poisson model")
    return _package(config, *_run(config))


def simulate_brownian(config: SimulationConfig) -> EmpiricalConditional:
    """Grid simulation of Brownian input with bridge-corrected zero hitting.

    Conditional on the grid values, the bridge correction makes the
    survival indicator exact, so the grid only affects run time.
    """
    if config.model.kind is not Kind.LINEAR_BROWNIAN:
        raise ConfigError("simulate_brownian needs a LinearBrownian model")
    if config.brownian_dt > RECOMMENDED_DT:
        warnings.warn(
            f"brownian_dt={config.brownian_dt:g} is coarser than {RECOMMENDED_DT:g}",
            BiasWarning,
            stacklevel=2,
        )
    return _package(config, *_run(config))


def simulate(config: SimulationConfig) -> EmpiricalConditional:
    if config.model.kind is Kind.LINEAR_BROWNIAN:
        return simulate_brownian(config)
    return simulate_cp(config)


def estimate_master_transform(config: SimulationConfig, vartheta: float, alpha=0.0, beta=0.0):
    """Monte Carlo estimate of ``L(vartheta; alpha, beta)`` and its standard error.

    Uses an independent Exp(vartheta) horizon per path:
    ``L = E[exp(-alpha Q(0) - beta Q(e)); T > e] / vartheta``.  ``alpha`` and
    ``beta`` broadcast together; the same paths serve every pair.
    """
    if not (math.isfinite(vartheta) and vartheta > 0):
        raise DomainError("vartheta must be > 0")
    a, b = np.broadcast_arrays(np.asarray(alpha, dtype=float), np.asarray(beta, dtype=float))
    if np.any(a < 0) or np.any(b < 0):
        raise DomainError("alpha and beta must be >= 0")
    _, q0, qe = _run(config, vartheta)
    n = config.n_paths
    w = np.exp(-np.multiply.outer(a.ravel(), q0) - np.multiply.outer(b.ravel(), qe))
    mean = w.sum(axis=1) / n
    var = (w * w).sum(axis=1) / n - mean * mean
    se = np.sqrt(np.maximum(var, 0.0) / n) / vartheta
    est = mean / vartheta
    if a.ndim == 0:
        return float(est[0]), float(se[0])
    return est.reshape(a.shape), se.reshape(a.shape)


def ks_distance(sample, cdf) -> float:
    """Kolmogorov-Smirnov sup distance between a sample and a CDF.

    Raises
    ------
    EmptySample
        For an empty sample.
    """
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise EmptySample("KS distance of an empty sample")
    f = np.asarray(cdf(x), dtype=float).reshape(n)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))
