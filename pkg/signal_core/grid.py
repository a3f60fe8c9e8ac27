"""
Uniform sampling grids in one and two dimensions.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from signal_core.errors import GridError

# Relative tolerance when checking that node spacing is uniform
UNIFORM_SPACING_RTOL = 1e-9


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid of n nodes covering [xmin, xmax]."""
    xmin: float
    xmax: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise GridError(f"Grid1D needs at least 2 nodes, got {self.n}")
        if not (np.isfinite(self.xmin) and np.isfinite(self.xmax)):
            raise GridError("Grid1D bounds must be finite")
        if not self.xmin < self.xmax:
            raise GridError(f"Grid1D requires xmin < xmax, got [{self.xmin}, {self.xmax}]")

    @property
    def dx(self) -> float:
        return (self.xmax - self.xmin) / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.xmin, self.xmax, self.n)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid quadrature weights."""
        w = np.full(self.n, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w

    def subgrid(self, start: int, stop: int) -> "Grid1D":
        """Grid made of nodes start..stop (inclusive)."""
        nodes = self.nodes
        return Grid1D(float(nodes[start]), float(nodes[stop]), stop - start + 1)

    def contains(self, x: np.ndarray, slack: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x >= self.xmin - slack) & (x <= self.xmax + slack)

    @classmethod
    def from_nodes(cls, nodes: np.ndarray) -> "Grid1D":
        """
        Build a grid from explicit nodes, rejecting non-uniform spacing.

        Raises:
            GridError: If the nodes are not uniformly spaced and increasing
        """
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise GridError("Grid nodes must be a 1D array with at least 2 entries")
        steps = np.diff(nodes)
        step = (nodes[-1] - nodes[0]) / (nodes.size - 1)
        if step <= 0 or np.max(np.abs(steps - step)) > UNIFORM_SPACING_RTOL * max(abs(step), 1.0):
            raise GridError("Grid nodes are not uniformly spaced and increasing")
        return cls(float(nodes[0]), float(nodes[-1]), int(nodes.size))


@dataclass(frozen=True)
class Grid2D:
    """Tensor grid; image values are indexed [ix, iy] (row-major in x)."""
    xmin: float
    xmax: float
    nx: int
    ymin: float
    ymax: float
    ny: int

    def __post_init__(self):
        Grid1D(self.xmin, self.xmax, self.nx)
        Grid1D(self.ymin, self.ymax, self.ny)

    @property
    def x_axis(self) -> Grid1D:
        return Grid1D(self.xmin, self.xmax, self.nx)

    @property
    def y_axis(self) -> Grid1D:
        return Grid1D(self.ymin, self.ymax, self.ny)

    @property
    def dx(self) -> float:
        return self.x_axis.dx

    @property
    def dy(self) -> float:
        return self.y_axis.dx

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def cell(self) -> float:
        """Largest node spacing, the unit for displacement tolerances."""
        return max(self.dx, self.dy)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x_axis.nodes, self.y_axis.nodes, indexing="ij")

    @property
    def weights(self) -> np.ndarray:
        """Tensor trapezoid weights, shape (nx, ny)."""
        return np.outer(self.x_axis.weights, self.y_axis.weights)

    @classmethod
    def square(cls, lo: float, hi: float, n: int) -> "Grid2D":
        return cls(lo, hi, n, lo, hi, n)

    @classmethod
    def bounding(cls, points_x: np.ndarray, points_y: np.ndarray, nx: int, ny: int,
                 pad_cells: float = 1.0) -> "Grid2D":
        """
        Smallest grid with nx by ny nodes containing the given points plus a margin.

        Args:
            points_x: x coordinates to cover
            points_y: y coordinates to cover
            nx: Node count along x
            ny: Node count along y
            pad_cells: Margin in units of the resulting node spacing

        Returns:
            Grid2D covering the points
        """
        x0, x1 = float(np.min(points_x)), float(np.max(points_x))
        y0, y1 = float(np.min(points_y)), float(np.max(points_y))
        # Solve for the padded extent so the margin is measured in final cells
        px = pad_cells * (x1 - x0) / max(nx - 1 - 2 * pad_cells, 1.0)
        py = pad_cells * (y1 - y0) / max(ny - 1 - 2 * pad_cells, 1.0)
        return cls(x0 - px, x1 + px, nx, y0 - py, y1 + py, ny)
