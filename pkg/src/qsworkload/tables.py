"""Tabulated densities and their CSV form."""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError

__all__ = ["DensityTable", "parse_grid", "make_grid", "MARGINALS", "METHODS"]

MARGINALS = ("QS_left", "QS_right", "stationary")
METHODS = ("closed_form", "inversion", "simulation")

# values this close to zero but negative are treated as round-off
NEGATIVE_NOISE = 1e-9


def make_grid(grid) -> np.ndarray:
    """Validate an evaluation grid: 1-d, finite, non-negative, strictly increasing."""
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ParameterError("grid must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(x)) or np.any(x < 0):
        raise ParameterError("grid points must be finite and >= 0")
    if np.any(np.diff(x) <= 0):
        raise ParameterError("grid must be strictly increasing")
    return x


def parse_grid(spec: str) -> np.ndarray:
    """Parse ``lo:hi:n`` into ``n`` equally spaced points (decimal, locale-free)."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ParameterError(f"grid must look like lo:hi:n, got {spec!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ParameterError(f"grid must look like lo:hi:n, got {spec!r}") from None
    if n < 2 or not hi > lo:
        raise ParameterError("grid needs n >= 2 and hi > lo")
    return make_grid(np.linspace(lo, hi, n))


@dataclass
class DensityTable:
    """Density values on a grid with provenance metadata.

    Attributes
    ----------
    x, f : numpy.ndarray
        Grid and density values.
    meta : dict
        ``model``, ``marginal`` and ``method`` keys plus free-form extras.
    """

    x: np.ndarray
    f: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = make_grid(self.x)
        f = np.asarray(self.f, dtype=float)
        if f.shape != self.x.shape:
            raise ParameterError("x and f must have the same length")
        if not np.all(np.isfinite(f)):
            raise ParameterError("density values must be finite")
        if np.any(f < -NEGATIVE_NOISE):
            raise ParameterError(f"negative density value {f.min():.3g}")
        self.f = np.maximum(f, 0.0)

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.f.tolist()))

    def mass(self) -> float:
        """Trapezoid mass over the grid."""
        return float(np.trapezoid(self.f, self.x))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("x,f\n")
        np.savetxt(buf, np.column_stack([self.x, self.f]), fmt="%.17g", delimiter=",")
        return buf.getvalue()

    def write_csv(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_csv())
        return path

    @classmethod
    def read_csv(cls, path, meta: dict | None = None) -> DensityTable:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1], dict(meta or {}))
