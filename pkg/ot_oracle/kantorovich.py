"""
Exact discrete optimal transport between small images, used as a reference
oracle for the 2D transforms.

Cell masses (density times trapezoid weight) become point masses at the grid
nodes; zero-mass cells are dropped. The transportation LP with squared
Euclidean cost is solved by POT's network simplex, and the returned plan is
certified against its dual potentials before use.
"""

import json
import logging
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np
import ot
from scipy.spatial.distance import cdist

from signal_core.density import Image2D
from signal_core.errors import OracleInfeasible, TooLarge
from signal_core.grid import Grid2D
from signal_core.io import fmt, rows_to_csv
from transforms.maps import TransportMap2D

logger = logging.getLogger(__name__)

MAX_POINTS = 400
DUAL_TOLERANCE = 1e-7
MARGINAL_TOLERANCE = 1e-9
MAX_SIMPLEX_ITERATIONS = 10_000_000


@dataclass(frozen=True, eq=False)
class CouplingPlan:
    """Optimal coupling between the nonzero cells of two images."""
    source_grid: Grid2D
    target_grid: Grid2D
    source_index: np.ndarray
    target_index: np.ndarray
    source_points: np.ndarray
    target_points: np.ndarray
    source_masses: np.ndarray
    target_masses: np.ndarray
    plan: np.ndarray
    cost: float
    u: np.ndarray
    v: np.ndarray

    @property
    def marginal_residual(self) -> float:
        return float(max(np.max(np.abs(self.plan.sum(axis=1) - self.source_masses)),
                         np.max(np.abs(self.plan.sum(axis=0) - self.target_masses))))

    @property
    def dual_residual(self) -> float:
        """Largest violation of u_i + v_j <= C_ij."""
        costs = cdist(self.source_points, self.target_points, "sqeuclidean")
        return float(np.max(self.u[:, None] + self.v[None, :] - costs))

    def cost_with_targets(self, targets: np.ndarray) -> float:
        """Cost of this coupling when target point j is moved to targets[j]."""
        costs = cdist(self.source_points, targets, "sqeuclidean")
        return float(np.sum(self.plan * costs))

    def summary(self) -> Dict[str, Any]:
        return {
            "source_points": int(self.source_points.shape[0]),
            "target_points": int(self.target_points.shape[0]),
            "cost": self.cost,
            "marginal_residual": self.marginal_residual,
            "dual_residual": self.dual_residual,
            "nonzeros": int(np.count_nonzero(self.plan)),
        }


def _point_masses(img: Image2D):
    masses = img.cell_masses.ravel()
    index = np.flatnonzero(masses > 0)
    X, Y = img.grid.mesh()
    points = np.stack([X.ravel()[index], Y.ravel()[index]], axis=-1)
    weights = masses[index]
    return index, points, weights / weights.sum()


def kantorovich_lp_2d(source: Image2D, target: Image2D, max_points: int = MAX_POINTS) -> CouplingPlan:
    """
    Solve the squared-Euclidean transportation LP between two images.

    Args:
        source: Reference image
        target: Target image
        max_points: Largest number of nonzero cells allowed per side (at most 400)

    Returns:
        Certified CouplingPlan

    Raises:
        TooLarge: If either side has more than max_points nonzero cells
        OracleInfeasible: If the solver fails or the plan fails certification
    """
    max_points = min(max_points, MAX_POINTS)
    s_index, s_points, a = _point_masses(source)
    t_index, t_points, b = _point_masses(target)
    if s_points.shape[0] > max_points or t_points.shape[0] > max_points:
        raise TooLarge(
            f"LP oracle limited to {max_points} points per side, got "
            f"{s_points.shape[0]} and {t_points.shape[0]}"
        )
    costs = cdist(s_points, t_points, "sqeuclidean")
    plan, log = ot.emd(a, b, costs, numItermax=MAX_SIMPLEX_ITERATIONS, log=True)
    if log.get("warning"):
        raise OracleInfeasible(f"Network simplex did not converge: {log['warning']}")

    u, v = np.asarray(log["u"], dtype=float), np.asarray(log["v"], dtype=float)
    scale = max(1.0, float(costs.max()))
    slack = u[:, None] + v[None, :] - costs
    if np.max(slack) > DUAL_TOLERANCE * scale:
        raise OracleInfeasible(f"Dual potentials violate feasibility by {np.max(slack):.3g}")
    support = plan > 0
    if np.any(np.abs(slack[support]) > DUAL_TOLERANCE * scale):
        raise OracleInfeasible("Plan violates complementary slackness")

    result = CouplingPlan(
        source_grid=source.grid, target_grid=target.grid,
        source_index=s_index, target_index=t_index,
        source_points=s_points, target_points=t_points,
        source_masses=a, target_masses=b,
        plan=plan, cost=float(log["cost"]), u=u, v=v,
    )
    if result.marginal_residual > MARGINAL_TOLERANCE:
        raise OracleInfeasible(f"Marginals off by {result.marginal_residual:.3g}")
    logger.debug(f"LP oracle: {s_points.shape[0]}x{t_points.shape[0]} points, cost {result.cost:.6g}")
    return result


def barycentric_map(plan: CouplingPlan) -> TransportMap2D:
    """
    T(x_i) = sum_j pi_ij y_j / a_i on the source grid; zero-mass cells are left
    undefined (masked out).
    """
    grid = plan.source_grid
    values = np.full(grid.shape + (2,), np.nan)
    targets = plan.plan @ plan.target_points / plan.source_masses[:, None]
    flat = values.reshape(-1, 2)
    flat[plan.source_index] = targets
    mask = np.zeros(grid.nx * grid.ny, dtype=bool)
    mask[plan.source_index] = True
    return TransportMap2D(grid, flat.reshape(grid.shape + (2,)), mask.reshape(grid.shape))


def plan_to_csv(plan: CouplingPlan) -> str:
    """Nonzero plan entries as 'source_cell,target_cell,mass' rows."""
    rows_i, rows_j = np.nonzero(plan.plan)
    header = f"# coupling {plan.source_points.shape[0]} {plan.target_points.shape[0]} {fmt(plan.cost)}\n"
    rows = (
        (int(plan.source_index[i]), int(plan.target_index[j]), float(plan.plan[i, j]))
        for i, j in zip(rows_i, rows_j)
    )
    return header + rows_to_csv(rows)


def plan_to_json(plan: CouplingPlan) -> str:
    return json.dumps(plan.summary(), indent=2, sort_keys=True)
