"""
Sampled probability densities on uniform grids and their distribution functions.

A Signal1D always carries unit trapezoidal mass; raw samples go through
normalize() first. CDFs are tabulated at the grid nodes and quantiles use the
supremum convention, so a flat run of the CDF maps to its right endpoint.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.interpolate import RegularGridInterpolator

from signal_core.errors import (
    AllZero,
    EmptySupport,
    GridError,
    NegativeMass,
    NotNormalized,
    OutOfRange,
)
from signal_core.grid import Grid1D, Grid2D

logger = logging.getLogger(__name__)

MASS_TOLERANCE = 1e-9
# Inputs already this close to unit mass are returned unchanged
IDEMPOTENT_TOLERANCE = 1e-12
# Level tolerance used by the quantile search
QUANTILE_TOLERANCE = 1e-12
MONOTONE_TOLERANCE = 1e-12


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class Signal1D:
    """Nonnegative unit-mass density sampled on a Grid1D."""
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (self.grid.n,):
            raise GridError(f"Signal has {values.shape} samples for a grid of {self.grid.n} nodes")
        if np.any(values < 0):
            raise NegativeMass("Signal1D samples must be nonnegative")
        mass = trapezoid(values, dx=self.grid.dx)
        if abs(mass - 1.0) > MASS_TOLERANCE:
            raise NotNormalized(f"Signal1D must carry unit mass, got {mass:.12g}")
        object.__setattr__(self, "values", values)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Piecewise-linear evaluation, zero outside the grid."""
        return np.interp(np.asarray(x, dtype=float), self.nodes, self.values, left=0.0, right=0.0)


@dataclass(frozen=True, eq=False)
class CdfTable:
    """Nondecreasing table F(x_i) with F(x_0) = 0 and F(x_{n-1}) = 1."""
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (self.grid.n,):
            raise GridError("CdfTable length does not match its grid")
        if np.any(np.diff(values) < -MONOTONE_TOLERANCE):
            raise GridError("CdfTable must be nondecreasing")
        object.__setattr__(self, "values", values)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.grid.nodes, self.values, left=0.0, right=1.0)


@dataclass(frozen=True, eq=False)
class Image2D:
    """Nonnegative unit-mass image; values[ix, iy] is the density at (x_ix, y_iy)."""
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != self.grid.shape:
            raise GridError(f"Image has shape {values.shape}, grid expects {self.grid.shape}")
        if np.any(values < 0):
            raise NegativeMass("Image2D samples must be nonnegative")
        mass = image_mass(values, self.grid)
        if abs(mass - 1.0) > MASS_TOLERANCE:
            raise NotNormalized(f"Image2D must carry unit mass, got {mass:.12g}")
        object.__setattr__(self, "values", values)

    def sample(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Bilinear evaluation at arbitrary points, zero outside the grid."""
        return sample_image(self.values, self.grid, x, y)

    @property
    def cell_masses(self) -> np.ndarray:
        return self.values * self.grid.weights


def normalize(raw: np.ndarray, grid: Grid1D) -> Signal1D:
    """
    Normalize raw samples to a unit-mass density.

    Args:
        raw: Nonnegative samples at the grid nodes
        grid: Grid the samples live on

    Returns:
        Signal1D with trapezoidal mass 1

    Raises:
        NegativeMass: If any sample is negative
        AllZero: If the samples integrate to zero
    """
    raw = np.asarray(raw, dtype=float)
    if raw.shape != (grid.n,):
        raise GridError(f"Expected {grid.n} samples, got {raw.shape}")
    if np.any(raw < 0):
        raise NegativeMass(f"Negative sample {raw.min():.6g} in density")
    mass = trapezoid(raw, dx=grid.dx)
    if mass <= 0:
        raise AllZero("Cannot normalize a signal with zero mass")
    if abs(mass - 1.0) <= IDEMPOTENT_TOLERANCE:
        return Signal1D(grid, raw)
    return Signal1D(grid, raw / mass)


def image_mass(values: np.ndarray, grid: Grid2D) -> float:
    # Integrate along y first, then x
    return float(trapezoid(trapezoid(values, dx=grid.dy, axis=1), dx=grid.dx))


def normalize_image(raw: np.ndarray, grid: Grid2D) -> Image2D:
    """
    Normalize raw image samples to unit mass.

    Raises:
        NegativeMass: If any sample is negative
        AllZero: If the samples integrate to zero
    """
    raw = np.asarray(raw, dtype=float)
    if raw.shape != grid.shape:
        raise GridError(f"Expected image of shape {grid.shape}, got {raw.shape}")
    if np.any(raw < 0):
        raise NegativeMass(f"Negative sample {raw.min():.6g} in image")
    mass = image_mass(raw, grid)
    if mass <= 0:
        raise AllZero("Cannot normalize an image with zero mass")
    if abs(mass - 1.0) <= IDEMPOTENT_TOLERANCE:
        return Image2D(grid, raw)
    return Image2D(grid, raw / mass)


def cdf(p: Signal1D) -> CdfTable:
    """Cumulative trapezoid of p, pinned to exactly 1 at the last node."""
    running = cumulative_trapezoid(p.values, dx=p.grid.dx, initial=0.0)
    running = np.maximum.accumulate(running / running[-1])
    running[-1] = 1.0
    return CdfTable(p.grid, running)


def quantile(table: CdfTable, u: Union[float, np.ndarray]) -> np.ndarray:
    """
    Generalized inverse sup{t : F(t) <= u} on the tabulated CDF.

    Between nodes F is linear. On a flat run the right endpoint is returned.
    The top level u = 1 returns the right end of the support (first node where
    F reaches 1) instead of the grid end.

    Args:
        table: Tabulated CDF
        u: Level(s) in [0, 1]

    Returns:
        Array of quantiles (0-d for scalar input)

    Raises:
        OutOfRange: If any level lies outside [0, 1]
    """
    u = np.asarray(u, dtype=float)
    if np.any(u < -QUANTILE_TOLERANCE) or np.any(u > 1 + QUANTILE_TOLERANCE):
        raise OutOfRange(f"Quantile level outside [0, 1]: [{u.min():.6g}, {u.max():.6g}]")
    u = np.clip(u, 0.0, 1.0)
    F = table.values
    x = table.grid.nodes
    n = F.size

    k = np.searchsorted(F, u + QUANTILE_TOLERANCE, side="right") - 1
    k = np.clip(k, 0, n - 2)
    f0 = F[k]
    rise = F[k + 1] - f0
    safe_rise = np.where(rise > 0, rise, 1.0)
    frac = np.where(rise > 0, np.clip((u - f0) / safe_rise, 0.0, 1.0), 0.0)
    result = x[k] + frac * table.grid.dx

    top_index = int(np.argmax(F >= 1.0 - QUANTILE_TOLERANCE))
    result = np.where(u >= 1.0 - QUANTILE_TOLERANCE, x[top_index], result)
    return result


def support_of_values(values: np.ndarray, grid: Grid1D, threshold: float = 0.0) -> Tuple[float, float]:
    """
    Outermost nodes whose sample exceeds threshold.

    Raises:
        EmptySupport: If no sample exceeds threshold
    """
    idx = np.flatnonzero(np.asarray(values) > threshold)
    if idx.size == 0:
        raise EmptySupport(f"No sample exceeds threshold {threshold}")
    nodes = grid.nodes
    return float(nodes[idx[0]]), float(nodes[idx[-1]])


def support_interval(p: Signal1D, threshold: float = 0.0) -> Tuple[float, float]:
    """Smallest closed interval [a, b] of grid nodes containing {p > threshold}."""
    return support_of_values(p.values, p.grid, threshold)


def support_indices(values: np.ndarray, threshold: float = 0.0) -> Tuple[int, int]:
    idx = np.flatnonzero(np.asarray(values) > threshold)
    if idx.size == 0:
        raise EmptySupport(f"No sample exceeds threshold {threshold}")
    return int(idx[0]), int(idx[-1])


def sample_image(values: np.ndarray, grid: Grid2D, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    Bilinear interpolation of image samples at points (x, y), zero off the grid.

    Points within a rounding-level slack of the grid edge are snapped inside so
    that nodes mapped back onto the boundary keep their value.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slack_x = 1e-9 * (grid.xmax - grid.xmin)
    slack_y = 1e-9 * (grid.ymax - grid.ymin)
    inside = (
        (x >= grid.xmin - slack_x) & (x <= grid.xmax + slack_x)
        & (y >= grid.ymin - slack_y) & (y <= grid.ymax + slack_y)
    )
    xc = np.clip(x, grid.xmin, grid.xmax)
    yc = np.clip(y, grid.ymin, grid.ymax)
    interpolator = RegularGridInterpolator(
        (grid.x_axis.nodes, grid.y_axis.nodes), values, method="linear",
        bounds_error=False, fill_value=0.0,
    )
    points = np.stack([xc.ravel(), yc.ravel()], axis=-1)
    sampled = interpolator(points).reshape(x.shape)
    return np.where(inside, sampled, 0.0)


def resample_image(img: Image2D, grid: Grid2D) -> Image2D:
    """Bilinear resampling of an image onto another grid, renormalized."""
    X, Y = grid.mesh()
    return normalize_image(np.maximum(img.sample(X, Y), 0.0), grid)


def uniform_signal(grid: Grid1D, lo: Optional[float] = None, hi: Optional[float] = None) -> Signal1D:
    """Normalized indicator of [lo, hi] (defaults to the whole grid)."""
    x = grid.nodes
    lo = grid.xmin if lo is None else lo
    hi = grid.xmax if hi is None else hi
    slack = 1e-9 * grid.dx
    return normalize(((x >= lo - slack) & (x <= hi + slack)).astype(float), grid)
