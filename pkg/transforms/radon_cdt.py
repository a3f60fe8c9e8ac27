"""
Radon-CDT: the 1D CDT applied to every projection of an image.

Projections are computed by rotate-and-accumulate: for each angle the image is
sampled bilinearly along lines perpendicular to e_theta = (cos, sin) and summed
with the trapezoid rule.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from signal_core.density import Image2D, Signal1D, normalize, uniform_signal
from signal_core.errors import SupportEscape
from signal_core.grid import Grid1D, Grid2D
from transforms.cdt import cdt_forward
from transforms.maps import TransportMap1D

logger = logging.getLogger(__name__)

DEFAULT_ANGLES = 32
PROJECTION_MASS_TOLERANCE = 1e-2


@dataclass(frozen=True, eq=False)
class Sinogram:
    """Normalized projections of an image on a shared offset grid."""
    angles: np.ndarray
    grid: Grid1D
    projections: List[Signal1D]
    raw_masses: np.ndarray


@dataclass(frozen=True, eq=False)
class RcdtStack:
    """One CDT per projection angle."""
    angles: np.ndarray
    maps: List[TransportMap1D]
    sinogram: Sinogram

    def as_array(self) -> np.ndarray:
        return np.stack([m.values for m in self.maps])


def default_angles(k: int = DEFAULT_ANGLES) -> np.ndarray:
    return np.linspace(0.0, np.pi, k, endpoint=False)


def _corner_radius(grid: Grid2D) -> float:
    xs = np.array([grid.xmin, grid.xmax])
    ys = np.array([grid.ymin, grid.ymax])
    return float(np.max(np.hypot(xs[:, None], ys[None, :])))


def default_offset_grid(grid: Grid2D) -> Grid1D:
    """Offsets centred at the origin, covering every projection of the image grid."""
    radius = _corner_radius(grid)
    return Grid1D(-radius, radius, max(grid.nx, grid.ny))


def radon(p: Image2D, angles: Optional[Sequence[float]] = None, offset_grid: Optional[Grid1D] = None) -> Sinogram:
    """
    Projections P_theta(s) = integral of p over the line <x, e_theta> = s.

    Args:
        p: Image with support strictly inside its grid
        angles: Projection angles in radians (defaults to 32 angles in [0, pi))
        offset_grid: Offset grid shared by all projections

    Returns:
        Sinogram of normalized projections

    Raises:
        SupportEscape: If a projection of the support leaves the offset grid
    """
    angles = default_angles() if angles is None else np.asarray(angles, dtype=float)
    offsets = offset_grid or default_offset_grid(p.grid)
    s = offsets.nodes

    X, Y = p.grid.mesh()
    support = p.values > 0
    cos, sin = np.cos(angles), np.sin(angles)
    along = cos[:, None] * X[support][None, :] + sin[:, None] * Y[support][None, :]
    slack = 1e-9 * (offsets.xmax - offsets.xmin)
    if np.any(along < offsets.xmin - slack) or np.any(along > offsets.xmax + slack):
        raise SupportEscape("Image support projects outside the offset grid")

    radius = _corner_radius(p.grid)
    step = min(p.grid.dx, p.grid.dy)
    t = np.linspace(-radius, radius, int(np.ceil(2 * radius / step)) + 1)
    dt = t[1] - t[0]

    projections = []
    raw_masses = np.empty(angles.size)
    for k, (c, sn) in enumerate(zip(cos, sin)):
        px = s[:, None] * c - t[None, :] * sn
        py = s[:, None] * sn + t[None, :] * c
        line_integrals = trapezoid(p.sample(px, py), dx=dt, axis=1)
        raw_masses[k] = trapezoid(line_integrals, dx=offsets.dx)
        projections.append(normalize(line_integrals, offsets))

    off = np.abs(raw_masses - 1.0) > PROJECTION_MASS_TOLERANCE
    if np.any(off):
        logger.warning(f"{int(off.sum())} projections lose more than 1% of the mass before renormalization")
    return Sinogram(angles=angles, grid=offsets, projections=projections, raw_masses=raw_masses)


def rcdt(p: Image2D, r1: Optional[Signal1D] = None, angles: Optional[Sequence[float]] = None,
         offset_grid: Optional[Grid1D] = None) -> RcdtStack:
    """
    Radon-CDT of p: cdt_forward of each projection against the 1D reference r1.

    Args:
        p: Image
        r1: 1D reference on the offset grid (defaults to uniform over it)
        angles: Projection angles
        offset_grid: Offset grid (defaults to r1's grid or a grid covering the image)

    Returns:
        RcdtStack with one TransportMap1D per angle
    """
    offsets = offset_grid or (r1.grid if r1 is not None else default_offset_grid(p.grid))
    reference = r1 or uniform_signal(offsets)
    sinogram = radon(p, angles, offsets)
    maps = [cdt_forward(proj, reference) for proj in sinogram.projections]
    logger.debug(f"Radon-CDT over {len(maps)} angles")
    return RcdtStack(angles=sinogram.angles, maps=maps, sinogram=sinogram)
