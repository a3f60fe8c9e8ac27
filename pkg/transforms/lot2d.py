"""
Two-dimensional linear optimal transport restricted to the class P_r.

Members of P_r are pushforwards of a reference r by an Hr diffeomorphism h,
which is the gradient of a convex potential, hence the optimal (Brenier) map.
Their transform is therefore h itself and is available in closed form; the LP
oracle is only used to check it.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from diffeo.diffeo2d import Diffeo2D, Ha, LinearGradient, hr_compose, hr_inverse
from ot_oracle.kantorovich import barycentric_map, kantorovich_lp_2d
from signal_core.density import Image2D, image_mass, normalize_image, resample_image
from signal_core.errors import CertificateError, DomainMismatch, MassLoss, OutOfDomain, PreconditionError
from signal_core.grid import Grid2D
from transforms.maps import TransportMap2D, mean_displacement

logger = logging.getLogger(__name__)

MIN_RETAINED_MASS = 0.95
RESIDUAL_TOLERANCE = 5e-2
VIOLATION_FACTOR = 5.0
# Relative transport-cost differences below this are rounding noise
COST_NOISE_FLOOR = 1e-9


def apply_diffeo_2d(p: Image2D, h: Diffeo2D, out_grid: Optional[Grid2D] = None) -> Image2D:
    """
    Generative model p_h(x) = |det J_h(x)| p(h(x)) with bilinear sampling.

    Raises:
        MassLoss: If less than 95% of the mass stays on the output grid
        DomainMismatch: If h is undefined somewhere on the output grid
    """
    grid = out_grid or p.grid
    X, Y = grid.mesh()
    try:
        U, V = h(X, Y)
        det = np.abs(h.jacobian_det(X, Y))
    except OutOfDomain as e:
        raise DomainMismatch(f"Diffeomorphism undefined on the output grid: {e}")
    raw = np.maximum(det * p.sample(U, V), 0.0)
    mass = image_mass(raw, grid)
    if mass < MIN_RETAINED_MASS:
        raise MassLoss(f"Only {mass:.4f} of the mass stays on the output grid")
    return normalize_image(raw, grid)


def pushforward_image(r: Image2D, h: Diffeo2D, out_grid: Optional[Grid2D] = None) -> Image2D:
    """h_# r, i.e. r(h^{-1}(y)) |det J_{h^{-1}}(y)|."""
    return apply_diffeo_2d(r, h.inverse(), out_grid)


@dataclass(frozen=True, eq=False)
class PrMember:
    """A density p = h_# r together with its certificate h."""
    reference: Image2D
    density: Image2D
    certificate: Diffeo2D
    residual: float


def pr_residual(r: Image2D, p: Image2D, h: Diffeo2D) -> float:
    """L1 norm of |det J_h| (p o h) - r on the reference grid."""
    X, Y = r.grid.mesh()
    U, V = h(X, Y)
    back = np.abs(h.jacobian_det(X, Y)) * p.sample(U, V)
    return image_mass(np.abs(back - r.values), r.grid)


def generate_pr_member(r: Image2D, h: Diffeo2D, out_grid: Optional[Grid2D] = None,
                       residual_tol: float = RESIDUAL_TOLERANCE) -> PrMember:
    """
    Push r forward by h and keep h as the member's certificate.

    Args:
        r: Reference image
        h: Certificate, an Hr (or Ha/Hs/linear gradient) diffeomorphism
        out_grid: Grid for the generated density (defaults to r's grid)
        residual_tol: Largest admissible pushforward residual

    Returns:
        PrMember

    Raises:
        NotInvertible: If h cannot be inverted
        MassLoss: If the pushforward leaves the output grid
        CertificateError: If the residual exceeds residual_tol
    """
    p = pushforward_image(r, h, out_grid)
    residual = pr_residual(r, p, h)
    if residual > residual_tol:
        raise CertificateError(f"Pushforward residual {residual:.4f} exceeds {residual_tol}")
    logger.debug(f"Generated P_r member with residual {residual:.3g}")
    return PrMember(reference=r, density=p, certificate=h, residual=residual)


def lot_forward_pr(m: PrMember, grid: Optional[Grid2D] = None) -> TransportMap2D:
    """Transform of a P_r member: its certificate sampled on the reference grid."""
    grid = grid or m.reference.grid
    X, Y = grid.mesh()
    U, V = m.certificate(X, Y)
    return TransportMap2D(grid, np.stack([U, V], axis=-1), curl_free=True)


def lot_compose_pr(m: PrMember, g: Diffeo2D, grid: Optional[Grid2D] = None) -> TransportMap2D:
    """Transform of p_g, computed as g^{-1} o h without touching the density."""
    composed = hr_compose(hr_inverse(g), m.certificate)
    grid = grid or m.reference.grid
    X, Y = grid.mesh()
    U, V = composed(X, Y)
    return TransportMap2D(grid, np.stack([U, V], axis=-1), curl_free=True)


def member_after_diffeo(m: PrMember, g: Diffeo2D, out_grid: Optional[Grid2D] = None,
                        residual_tol: float = RESIDUAL_TOLERANCE) -> PrMember:
    """p_g = |det J_g| (p o g) as a P_r member with certificate g^{-1} o h."""
    density = apply_diffeo_2d(m.density, g, out_grid)
    certificate = hr_compose(hr_inverse(g), m.certificate)
    residual = pr_residual(m.reference, density, certificate)
    if residual > residual_tol:
        raise CertificateError(f"Pushforward residual {residual:.4f} exceeds {residual_tol}")
    return PrMember(reference=m.reference, density=density, certificate=certificate, residual=residual)


def lot_distance(tp: TransportMap2D, tq: TransportMap2D, r: Image2D) -> float:
    """Linearized OT distance ||(T_p - T_q) sqrt(r)|| over the reference grid."""
    if tp.grid != r.grid or tq.grid != r.grid:
        raise DomainMismatch("Maps must be sampled on the reference grid")
    sq = np.sum((tp.values - tq.values) ** 2, axis=-1)
    common = tp.mask & tq.mask
    return float(np.sqrt(np.sum((r.cell_masses * sq)[common])))


@dataclass(frozen=True)
class ViolationReport:
    """Outcome of comparing the LP transform of p_h with h^{-1} o (LP transform of p)."""
    displacement_gap: float
    control_displacement_gap: float
    cost_gap: float
    control_cost_gap: float
    h_in_ha: bool

    @property
    def cost_ratio(self) -> float:
        return self.cost_gap / max(self.control_cost_gap, COST_NOISE_FLOOR)

    @property
    def violated(self) -> bool:
        return self.cost_ratio > VIOLATION_FACTOR

    def to_dict(self):
        return {
            "displacement_gap_cells": self.displacement_gap,
            "control_displacement_gap_cells": self.control_displacement_gap,
            "cost_gap": self.cost_gap,
            "control_cost_gap": self.control_cost_gap,
            "cost_ratio": self.cost_ratio,
            "violated": self.violated,
            "h_in_ha": self.h_in_ha,
        }


def _as_linear(h) -> LinearGradient:
    if isinstance(h, LinearGradient):
        return h
    if isinstance(h, Ha):
        if np.any(h.u != 0):
            raise PreconditionError("Only linear Ha maps (u = 0) are supported by the demo")
        return LinearGradient(h.a * np.eye(2))
    matrix = np.asarray(h, dtype=float)
    if matrix.shape != (2, 2) or not np.allclose(matrix, matrix.T):
        raise PreconditionError("Demo maps must be symmetric 2x2 matrices (gradient maps)")
    return LinearGradient(matrix)


def _pulled_back_grid(grid: Grid2D, h: LinearGradient) -> Grid2D:
    """h^{-1}(grid); exact node correspondence for diagonal h."""
    m = h.matrix
    if m[0, 1] == 0 and m[1, 0] == 0:
        return Grid2D(grid.xmin / m[0, 0], grid.xmax / m[0, 0], grid.nx,
                      grid.ymin / m[1, 1], grid.ymax / m[1, 1], grid.ny)
    corners_x = np.array([grid.xmin, grid.xmax, grid.xmin, grid.xmax])
    corners_y = np.array([grid.ymin, grid.ymin, grid.ymax, grid.ymax])
    cx, cy = h.inverse()(corners_x, corners_y)
    return Grid2D.bounding(cx, cy, grid.nx, grid.ny, pad_cells=0.0)


def _two_path_gap(r: Image2D, p: Image2D, h: LinearGradient):
    grid_h = _pulled_back_grid(p.grid, h)
    p_h = apply_diffeo_2d(p, h, grid_h)
    direct_plan = kantorovich_lp_2d(r, p_h)
    direct = barycentric_map(direct_plan)

    base_plan = kantorovich_lp_2d(r, p)
    base = barycentric_map(base_plan)
    h_inv = h.inverse()
    bx, by = h_inv(base.values[..., 0], base.values[..., 1])
    pulled = TransportMap2D(base.grid, np.where(base.mask[..., None], np.stack([bx, by], axis=-1), np.nan),
                            base.mask)

    displacement = mean_displacement(direct, pulled, r.cell_masses) / grid_h.cell
    tx, ty = h_inv(base_plan.target_points[:, 0], base_plan.target_points[:, 1])
    two_path_cost = base_plan.cost_with_targets(np.stack([tx, ty], axis=-1))
    cost_gap = (two_path_cost - direct_plan.cost) / direct_plan.cost
    return displacement, max(cost_gap, 0.0)


def default_demo_reference(n: int) -> Image2D:
    """Smooth, strictly positive, asymmetric density on [-0.5, 0.5]^2."""
    grid = Grid2D.square(-0.5, 0.5, n)
    X, Y = grid.mesh()
    return normalize_image(1.0 + 0.35 * X - 0.2 * Y + 0.15 * X * Y + 0.1 * X * X, grid)


def composition_violation_demo(h=((2.0, 0.0), (0.0, 1.0)), target=((2.0, 1.0), (1.0, 2.0)),
                               grid_n: int = 12, control_scale: float = 2.0, refine: int = 16) -> ViolationReport:
    """
    Show that p_hat_h = h^{-1} o p_hat can fail outside Ha.

    p is the pushforward of r by x -> M x (M = target); p_h = |det J_h| p o h is
    sampled on h^{-1} of p's grid. The LP transform of p_h is compared with
    h^{-1} applied to the LP transform of p, and the same is done for the Ha
    control x -> control_scale x.

    Args:
        h: Symmetric positive definite matrix (or Ha / LinearGradient)
        target: Symmetric positive definite matrix of the quadratic potential
        grid_n: Nodes per axis of every LP grid (n x n <= 400)
        control_scale: Scale of the Ha control
        refine: Oversampling factor used to generate p before coarsening

    Returns:
        ViolationReport

    Raises:
        PreconditionError: If h or target is not a symmetric positive definite matrix
    """
    h_map = _as_linear(h)
    m_map = _as_linear(target)
    r = default_demo_reference(grid_n)
    r_fine = default_demo_reference(refine * grid_n)

    corners_x = np.array([r.grid.xmin, r.grid.xmax, r.grid.xmin, r.grid.xmax])
    corners_y = np.array([r.grid.ymin, r.grid.ymin, r.grid.ymax, r.grid.ymax])
    px, py = m_map(corners_x, corners_y)
    p_grid = Grid2D.bounding(px, py, grid_n, grid_n, pad_cells=0.5)
    fine_grid = Grid2D(p_grid.xmin, p_grid.xmax, refine * grid_n, p_grid.ymin, p_grid.ymax, refine * grid_n)
    p = resample_image(pushforward_image(r_fine, m_map, fine_grid), p_grid)

    displacement, cost_gap = _two_path_gap(r, p, h_map)
    control_displacement, control_cost = _two_path_gap(r, p, LinearGradient(control_scale * np.eye(2)))
    matrix = h_map.matrix
    in_ha = bool(abs(matrix[0, 1]) < 1e-12 and abs(matrix[0, 0] - matrix[1, 1]) < 1e-12)
    report = ViolationReport(displacement, control_displacement, cost_gap, control_cost, in_ha)
    logger.info(
        f"Two-path gap {displacement:.3f} cells (control {control_displacement:.3f}), "
        f"cost gap {cost_gap:.3g} (control {control_cost:.3g})"
    )
    return report
