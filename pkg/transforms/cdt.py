"""
One-dimensional cumulative distribution transform (CDT).

The transform of p relative to a reference r is the monotone map
p_hat = F_p^{-1} o F_r, sampled on the nodes of r's support. The inverse
pushes r forward through p_hat; for a diffeomorphism h, the generative model
p_h = h' (p o h) has transform h^{-1} o p_hat.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from diffeo.diffeo1d import Diffeo1D, translation
from signal_core.density import Signal1D, cdf, normalize, quantile, support_indices, support_interval
from signal_core.errors import BadReference, DegenerateMap, DomainMismatch, OutOfDomain
from signal_core.grid import Grid1D
from transforms.maps import TransportMap1D

logger = logging.getLogger(__name__)

DEPOSIT_SEGMENT = "segment"
DEPOSIT_LINEAR = "linear"


def reference_support(r: Signal1D) -> Tuple[int, int]:
    """
    Index range of r's support interval.

    Raises:
        BadReference: If r vanishes inside its support or the support is a single node
    """
    i0, i1 = support_indices(r.values)
    if i1 == i0:
        raise BadReference("Reference support must span at least two grid nodes")
    if np.any(r.values[i0:i1 + 1] <= 0):
        raise BadReference("Reference density must be strictly positive on its support interval")
    return i0, i1


def cdt_forward(p: Signal1D, r: Signal1D) -> TransportMap1D:
    """
    CDT of p relative to r: F_p^{-1}(F_r(x)) at every node of supp(r).

    Args:
        p: Signal to transform
        r: Reference density, strictly positive on its support interval

    Returns:
        TransportMap1D on the reference support grid

    Raises:
        BadReference: If r has interior zeros
    """
    i0, i1 = reference_support(r)
    levels = cdf(r).values[i0:i1 + 1]
    values = quantile(cdf(p), levels)
    logger.debug(f"CDT over {i1 - i0 + 1} reference nodes, range [{values.min():.4g}, {values.max():.4g}]")
    return TransportMap1D(r.grid.subgrid(i0, i1), values)


def _reference_on_map_grid(T: TransportMap1D, r: Signal1D) -> np.ndarray:
    i0, i1 = reference_support(r)
    if r.grid.subgrid(i0, i1) != T.grid:
        raise DomainMismatch("Transport map was not computed against this reference")
    return r.values[i0:i1 + 1]


def cdt_inverse(T: TransportMap1D, r: Signal1D, out_grid: Optional[Grid1D] = None,
                deposit: str = DEPOSIT_SEGMENT) -> Signal1D:
    """
    Recover a signal by pushing r forward through T.

    With deposit="segment" each reference cell's mass is spread uniformly over
    its image [T(x_i), T(x_{i+1})] and collected in cell-centred bins. With
    deposit="linear" the mass r(x_i) w_i is dropped at T(x_i) and split between
    the two neighbouring output nodes.

    Args:
        T: Transport map from cdt_forward against r
        r: The same reference
        out_grid: Output grid (defaults to r's grid)
        deposit: "segment" or "linear"

    Returns:
        Normalized Signal1D on out_grid

    Raises:
        DegenerateMap: If T is constant on supp(r)
        DomainMismatch: If no mass lands on the output grid
    """
    grid = out_grid or r.grid
    rs = _reference_on_map_grid(T, r)
    t = T.values
    if float(t.max() - t.min()) <= 0:
        raise DegenerateMap("Transport map is constant on the reference support")

    if deposit == DEPOSIT_LINEAR:
        raw = _deposit_linear(t, rs * T.grid.weights, grid)
    elif deposit == DEPOSIT_SEGMENT:
        raw = _deposit_segments(t, rs, T.grid, grid)
    else:
        raise ValueError(f"Unknown deposit mode {deposit!r}")

    if not np.any(raw > 0):
        raise DomainMismatch("Transport map sends all mass off the output grid")
    landed = trapezoid(raw, dx=grid.dx)
    if abs(landed - 1.0) > 0.05:
        logger.warning(f"cdt_inverse: {landed:.4f} of the reference mass landed on the output grid")
    return normalize(raw, grid)


def _deposit_linear(positions: np.ndarray, masses: np.ndarray, grid: Grid1D) -> np.ndarray:
    s = (positions - grid.xmin) / grid.dx
    s = np.clip(s, 0.0, grid.n - 1)
    left = np.minimum(np.floor(s).astype(int), grid.n - 2)
    frac = s - left
    binned = np.bincount(left, weights=masses * (1.0 - frac), minlength=grid.n)
    binned += np.bincount(left + 1, weights=masses * frac, minlength=grid.n)
    return binned / grid.weights


def _deposit_segments(positions: np.ndarray, density: np.ndarray, ref_grid: Grid1D, grid: Grid1D) -> np.ndarray:
    # Cumulative reference mass restricted to the map's grid, as a function of T
    mass = np.concatenate([[0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * ref_grid.dx)])
    mass /= mass[-1]
    # Collapse repeated map values, keeping the largest cumulative mass
    _, reverse_index = np.unique(positions[::-1], return_index=True)
    keep = positions.size - 1 - reverse_index
    knots, levels = positions[keep], mass[keep]
    # Cell boundaries clipped to the grid, so cell widths equal the trapezoid weights
    edges = np.clip(np.concatenate([grid.nodes - 0.5 * grid.dx, [grid.xmax + 0.5 * grid.dx]]), grid.xmin, grid.xmax)
    cumulative = np.interp(edges, knots, levels, left=0.0, right=1.0)
    return np.diff(cumulative) / grid.weights


def apply_diffeo_1d(p: Signal1D, h: Diffeo1D, out_grid: Optional[Grid1D] = None) -> Signal1D:
    """
    Generative model p_h(x) = h'(x) p(h(x)) on the output grid, renormalized.

    Raises:
        DomainMismatch: If h's validity interval cannot cover h^{-1}(supp p)
    """
    grid = out_grid or p.grid
    x = grid.nodes
    s0, s1 = support_interval(p)
    lo, hi = h.domain
    slack = p.grid.dx
    try:
        if np.isfinite(lo) and float(h(lo)) > s0 + slack:
            raise DomainMismatch(f"h({lo:.4g}) = {float(h(lo)):.4g} lies right of supp(p) start {s0:.4g}")
        if np.isfinite(hi) and float(h(hi)) < s1 - slack:
            raise DomainMismatch(f"h({hi:.4g}) = {float(h(hi)):.4g} lies left of supp(p) end {s1:.4g}")
    except OutOfDomain as e:
        raise DomainMismatch(str(e))

    inside = (x >= lo) & (x <= hi)
    raw = np.zeros(grid.n)
    xi = x[inside]
    raw[inside] = np.maximum(h.derivative(xi) * p(h(xi)), 0.0)
    if not np.any(raw > 0):
        raise DomainMismatch("Transformed signal has no mass on the output grid")
    mass = trapezoid(raw, dx=grid.dx)
    if abs(mass - 1.0) > 0.05:
        logger.warning(f"apply_diffeo_1d: mass {mass:.4f} before renormalization")
    return normalize(raw, grid)


def translate(p: Signal1D, mu: float, out_grid: Optional[Grid1D] = None) -> Signal1D:
    """Shift p to the right by mu."""
    return apply_diffeo_1d(p, translation(mu), out_grid)


def composition_push(h: Diffeo1D, T: TransportMap1D) -> TransportMap1D:
    """
    h^{-1} o T, the transform of p_h predicted from the transform of p.

    Raises:
        DomainMismatch: If T leaves the domain of h^{-1}
    """
    h_inv = h.inverse()
    try:
        values = h_inv(T.values)
    except OutOfDomain as e:
        raise DomainMismatch(f"Transport map leaves the domain of h^-1: {e}")
    return TransportMap1D(T.grid, values)


def embed(T: TransportMap1D, r: Signal1D) -> np.ndarray:
    """
    Euclidean embedding T * sqrt(r w): distances between embeddings are W2
    distances between the signals.
    """
    rs = _reference_on_map_grid(T, r)
    weights = rs * T.grid.weights
    return T.values * np.sqrt(weights / weights.sum())


def w2_distance(p: Signal1D, q: Signal1D, r: Signal1D) -> float:
    """W2(p, q) = ||(p_hat - q_hat) sqrt(r)|| on the reference support."""
    return float(np.linalg.norm(embed(cdt_forward(p, r), r) - embed(cdt_forward(q, r), r)))
