"""
Named subgroups of increasing diffeomorphisms: membership predicates and samplers.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from diffeo.diffeo1d import (
    Affine,
    Diffeo1D,
    PolynomialMonotone,
    SampledMonotone,
    TABLE_POINTS,
    identity,
)
from signal_core.errors import ConfigError, SamplingExhausted

logger = logging.getLogger(__name__)

MEMBERSHIP_TOLERANCE = 1e-8
INTERVAL_SCAN_POINTS = 1024
MAX_ATTEMPTS_PER_SAMPLE = 10_000


class GroupKind(str, Enum):
    IDENTITY = "identity"
    ISOTROPIC_SCALING = "isotropic_scaling"
    TRANSLATIONS = "translations"
    INCREASING_AFFINE = "increasing_affine"
    FIXED_POINTS = "fixed_points"
    FIXED_INTERVAL = "fixed_interval"
    INTEGER_TRANSLATIONS = "integer_translations"
    INTERSECTION = "intersection"


DEFAULT_BOUNDS: Dict[GroupKind, Dict[str, Tuple[float, float]]] = {
    GroupKind.ISOTROPIC_SCALING: {"alpha": (0.5, 2.0)},
    GroupKind.TRANSLATIONS: {"mu": (-0.3, 0.3)},
    GroupKind.INCREASING_AFFINE: {"alpha": (0.5, 2.0), "mu": (-0.3, 0.3)},
    GroupKind.INTEGER_TRANSLATIONS: {"mu": (-2.0, 2.0)},
    GroupKind.FIXED_POINTS: {"strength": (-0.9, 0.9)},
    GroupKind.FIXED_INTERVAL: {"strength": (-0.9, 0.9)},
}


@dataclass(frozen=True)
class GroupSpec1D:
    """A subgroup of increasing diffeomorphisms plus its sampler parameters."""
    kind: GroupKind
    fixed_points: Tuple[float, ...] = ()
    interval: Optional[Tuple[float, float]] = None
    domain: Tuple[float, float] = (0.0, 1.0)
    bounds: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    components: Tuple["GroupSpec1D", ...] = ()
    tolerance: float = MEMBERSHIP_TOLERANCE

    def __post_init__(self):
        object.__setattr__(self, "kind", GroupKind(self.kind))
        if self.kind == GroupKind.FIXED_POINTS and not self.fixed_points:
            raise ConfigError("FixedPoints group needs at least one fixed point")
        if self.kind == GroupKind.FIXED_INTERVAL:
            if self.interval is None or not self.interval[0] < self.interval[1]:
                raise ConfigError("FixedInterval group needs an interval with lo < hi")
        if self.kind == GroupKind.INTERSECTION and not self.components:
            raise ConfigError("Intersection group needs at least one component")

    @property
    def is_convex(self) -> bool:
        if self.kind == GroupKind.INTEGER_TRANSLATIONS:
            return False
        return all(c.is_convex for c in self.components)

    def bound(self, name: str) -> Tuple[float, float]:
        return self.bounds.get(name, DEFAULT_BOUNDS.get(self.kind, {}).get(name, (0.0, 0.0)))

    @classmethod
    def intersection(cls, *specs: "GroupSpec1D") -> "GroupSpec1D":
        """Intersection of subgroups; membership requires every component."""
        return cls(kind=GroupKind.INTERSECTION, components=tuple(specs), domain=specs[0].domain)

    def contains(self, h: Diffeo1D, tol: Optional[float] = None) -> bool:
        return group_membership(self, h, tol)

    def sample(self, count: int, seed: int) -> List[Diffeo1D]:
        return sample_group(self, count, np.random.default_rng(seed))


def _affine_fit(h: Diffeo1D) -> Tuple[float, float, float]:
    """Slope, intercept and worst residual of the best affine fit of h."""
    if isinstance(h, Affine):
        return h.alpha, -h.mu, 0.0
    x = h.scan_nodes(INTERVAL_SCAN_POINTS)
    y = h(x)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(y - (slope * x + intercept))))
    return float(slope), float(intercept), residual


def _inside(h: Diffeo1D, x: float) -> bool:
    return h.domain[0] <= x <= h.domain[1]


def group_membership(spec: GroupSpec1D, h: Diffeo1D, tol: Optional[float] = None) -> bool:
    """
    Check whether h belongs to the subgroup described by spec.

    Args:
        spec: Group description
        h: Candidate diffeomorphism
        tol: Tolerance on the defining identities (defaults to spec.tolerance)

    Returns:
        True if every defining identity holds within tol
    """
    tol = spec.tolerance if tol is None else tol
    kind = spec.kind

    if kind == GroupKind.INTERSECTION:
        return all(group_membership(c, h, tol) for c in spec.components)

    if kind == GroupKind.FIXED_POINTS:
        if not all(_inside(h, p) for p in spec.fixed_points):
            return False
        points = np.asarray(spec.fixed_points, dtype=float)
        return bool(np.max(np.abs(h(points) - points)) <= tol)

    if kind == GroupKind.FIXED_INTERVAL:
        lo, hi = spec.interval
        if not (_inside(h, lo) and _inside(h, hi)):
            return False
        y = np.linspace(lo, hi, INTERVAL_SCAN_POINTS)
        return bool(np.max(np.abs(h(y) - y)) <= tol)

    slope, intercept, residual = _affine_fit(h)
    if residual > tol:
        return False
    if kind == GroupKind.IDENTITY:
        return abs(slope - 1.0) <= tol and abs(intercept) <= tol
    if kind == GroupKind.ISOTROPIC_SCALING:
        return slope > 0 and abs(intercept) <= tol
    if kind == GroupKind.TRANSLATIONS:
        return abs(slope - 1.0) <= tol
    if kind == GroupKind.INCREASING_AFFINE:
        return slope > 0
    if kind == GroupKind.INTEGER_TRANSLATIONS:
        return abs(slope - 1.0) <= tol and abs(intercept - round(intercept)) <= tol
    raise ConfigError(f"Unknown group kind {kind}")


def _fixed_point_member(spec: GroupSpec1D, strength: float) -> PolynomialMonotone:
    # x + c * prod(x - x_i), with c scaled so that h' >= 1 - |strength|
    bump = Polynomial.fromroots(spec.fixed_points)
    scan = np.linspace(spec.domain[0], spec.domain[1], TABLE_POINTS)
    scale = float(np.max(np.abs(bump.deriv()(scan))))
    poly = Polynomial([0.0, 1.0]) + (strength / scale) * bump
    return PolynomialMonotone(poly.coef, spec.domain)


def _fixed_interval_member(spec: GroupSpec1D, strength: float) -> SampledMonotone:
    lo, hi = spec.interval
    x = np.linspace(min(spec.domain[0], lo), max(spec.domain[1], hi), TABLE_POINTS)
    below = np.minimum(x - lo, 0.0)
    above = np.maximum(x - hi, 0.0)
    bump = below ** 3 + above ** 3
    slope = 3.0 * (below ** 2 + above ** 2)
    scale = float(np.max(slope)) or 1.0
    return SampledMonotone(x, x + (strength / scale) * bump)


def sample_group(spec: GroupSpec1D, count: int, rng: np.random.Generator) -> List[Diffeo1D]:
    """
    Draw count members of the group.

    Raises:
        SamplingExhausted: If an intersection rejects too many candidates
    """
    kind = spec.kind
    members: List[Diffeo1D] = []

    if kind == GroupKind.INTERSECTION:
        attempts = 0
        while len(members) < count:
            attempts += 1
            if attempts > MAX_ATTEMPTS_PER_SAMPLE * count:
                raise SamplingExhausted(
                    f"Accepted {len(members)} of {count} intersection members after {attempts - 1} draws"
                )
            candidate = sample_group(spec.components[0], 1, rng)[0]
            if all(group_membership(c, candidate) for c in spec.components[1:]):
                members.append(candidate)
        return members

    for _ in range(count):
        if kind == GroupKind.IDENTITY:
            members.append(identity())
        elif kind == GroupKind.ISOTROPIC_SCALING:
            members.append(Affine(rng.uniform(*spec.bound("alpha")), 0.0))
        elif kind == GroupKind.TRANSLATIONS:
            members.append(Affine(1.0, rng.uniform(*spec.bound("mu"))))
        elif kind == GroupKind.INCREASING_AFFINE:
            members.append(Affine(rng.uniform(*spec.bound("alpha")), rng.uniform(*spec.bound("mu"))))
        elif kind == GroupKind.INTEGER_TRANSLATIONS:
            lo, hi = spec.bound("mu")
            members.append(Affine(1.0, float(rng.integers(math.ceil(lo), math.floor(hi) + 1))))
        elif kind == GroupKind.FIXED_POINTS:
            members.append(_fixed_point_member(spec, rng.uniform(*spec.bound("strength"))))
        elif kind == GroupKind.FIXED_INTERVAL:
            members.append(_fixed_interval_member(spec, rng.uniform(*spec.bound("strength"))))
        else:
            raise ConfigError(f"Cannot sample group kind {kind}")
    logger.debug(f"Sampled {count} members of {kind.value}")
    return members
