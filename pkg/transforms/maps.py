"""
Transport map containers shared by the transforms and the OT oracle.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from signal_core.errors import DomainMismatch, GridError
from signal_core.grid import Grid1D, Grid2D

MONOTONE_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class TransportMap1D:
    """Nondecreasing map sampled on the reference support grid."""
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise GridError(f"Map has {values.shape} values for {self.grid.n} reference nodes")
        if np.any(np.diff(values) < -MONOTONE_TOLERANCE):
            raise GridError("TransportMap1D must be nondecreasing")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __add__(self, other: "TransportMap1D") -> "TransportMap1D":
        self._check_same_grid(other)
        return TransportMap1D(self.grid, self.values + other.values)

    def scaled(self, weight: float) -> "TransportMap1D":
        return TransportMap1D(self.grid, weight * self.values)

    def sup_distance(self, other: "TransportMap1D") -> float:
        self._check_same_grid(other)
        return float(np.max(np.abs(self.values - other.values)))

    def _check_same_grid(self, other: "TransportMap1D"):
        if self.grid != other.grid:
            raise DomainMismatch("Transport maps live on different reference grids")


@dataclass(frozen=True, eq=False)
class TransportMap2D:
    """
    Map values[ix, iy] = T(x_ix, y_iy) on a reference grid. Cells outside mask
    (zero reference mass) carry NaN. curl_free tags maps known to be gradients.
    """
    grid: Grid2D
    values: np.ndarray
    mask: Optional[np.ndarray] = None
    curl_free: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.shape + (2,):
            raise GridError(f"Map values have shape {values.shape}, expected {self.grid.shape + (2,)}")
        mask = np.ones(self.grid.shape, dtype=bool) if self.mask is None else np.asarray(self.mask, dtype=bool)
        if not np.all(np.isfinite(values[mask])):
            raise GridError("TransportMap2D values must be finite on their mask")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)


def mean_displacement(a: TransportMap2D, b: TransportMap2D, weights: Optional[np.ndarray] = None) -> float:
    """
    Mean Euclidean distance between two maps on their common mask, optionally
    weighted (typically by reference cell masses).
    """
    if a.grid != b.grid:
        raise DomainMismatch("Maps live on different grids")
    common = a.mask & b.mask
    if not np.any(common):
        raise DomainMismatch("Maps share no defined cell")
    dist = np.linalg.norm(a.values - b.values, axis=-1)[common]
    if weights is None:
        return float(np.mean(dist))
    w = np.asarray(weights, dtype=float)[common]
    return float(np.sum(w * dist) / np.sum(w))
