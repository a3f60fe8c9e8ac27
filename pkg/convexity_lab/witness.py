"""
Convexity witnesses, the integer-translation negative control and the
convex-hull partition check for transformed signal classes.

A witness trial takes two members p_{h_i}, p_{h_j} and a weight alpha, forms
M = alpha * T_i + (1 - alpha) * T_j in the transform domain and regenerates
the template through g, the map whose inverse is the convex combination of
h_i^{-1} and h_j^{-1}. The trial passes when the two paths agree.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import linprog
from scipy.spatial.distance import cdist

from convexity_lab.classes import SignalClass, generate_class, transform_matrix
from diffeo.diffeo1d import Diffeo1D, convex_combo_of_inverses, translation
from diffeo.groups import GroupKind, GroupSpec1D
from signal_core.density import Signal1D, support_interval, uniform_signal
from signal_core.errors import OracleInfeasible, OutOfDomain, PreconditionError
from signal_core.grid import Grid1D
from signal_core.seeding import task_rng
from transforms.cdt import apply_diffeo_1d, cdt_forward, cdt_inverse, translate
from transforms.maps import TransportMap1D

logger = logging.getLogger(__name__)

SIGNAL_TOLERANCE = 2e-2
ROSTER_TOLERANCE = 1e-6
ROSTER_PROBES = 64


def l1_gap(a: Signal1D, b: Signal1D) -> float:
    """L1 distance of two signals on the same grid."""
    if a.grid != b.grid:
        raise PreconditionError("Signals live on different grids")
    return float(trapezoid(np.abs(a.values - b.values), dx=a.grid.dx))


@dataclass
class WitnessTrial:
    """One two-path comparison"""
    i: int
    j: int
    alpha: float
    map_gap: float
    signal_gap: float
    in_roster: bool
    in_group: Optional[bool] = None


@dataclass
class WitnessReport:
    """Outcome of a batch of witness trials"""
    label: str
    map_tolerance: float
    signal_tolerance: float
    trials: List[WitnessTrial] = field(default_factory=list)

    @property
    def max_map_gap(self) -> float:
        return max((t.map_gap for t in self.trials), default=0.0)

    @property
    def max_signal_gap(self) -> float:
        return max((t.signal_gap for t in self.trials), default=0.0)

    @property
    def group_closed(self) -> bool:
        return all(t.in_group is not False for t in self.trials)

    @property
    def passed(self) -> bool:
        return (self.max_map_gap <= self.map_tolerance
                and self.max_signal_gap <= self.signal_tolerance
                and self.group_closed)

    def rows(self) -> List[Dict]:
        return [asdict(t) for t in self.trials]


def _roster_inverses(diffeos: Sequence[Diffeo1D], probes: np.ndarray) -> np.ndarray:
    table = np.full((len(diffeos), probes.size), np.nan)
    for k, h in enumerate(diffeos):
        try:
            table[k] = h.inverse()(probes)
        except OutOfDomain:
            logger.debug(f"Roster member {k} does not cover the probe interval")
    return table


def _matches_roster(combined: np.ndarray, table: np.ndarray) -> bool:
    gaps = np.nanmax(np.abs(table - combined[None, :]), axis=1)
    finite = np.isfinite(gaps)
    return bool(finite.any() and gaps[finite].min() <= ROSTER_TOLERANCE)


def convexity_witness(c: SignalClass, r: Signal1D, trials: int = 200, seed: int = 0,
                      alphas: Optional[Sequence[float]] = None,
                      map_tolerance: Optional[float] = None,
                      signal_tolerance: float = SIGNAL_TOLERANCE) -> WitnessReport:
    """
    Check that convex combinations of transformed members stay in the
    transformed class.

    Args:
        c: 1D class with its generating roster
        r: Reference density
        trials: Number of random (i, j, alpha) draws
        seed: Seed of the trial generator
        alphas: Optional fixed weights, cycled over the trials
        map_tolerance: Sup-norm tolerance on the maps (defaults to 3 grid steps)
        signal_tolerance: L1 tolerance on the regenerated signals

    Returns:
        WitnessReport with one entry per trial
    """
    template = c.template
    if not isinstance(template, Signal1D):
        raise PreconditionError("convexity_witness needs a 1D class")
    if not c.members:
        raise PreconditionError("Class has no members")
    tol = 3.0 * template.grid.dx if map_tolerance is None else map_tolerance
    maps = transform_matrix(c, r)
    map_grid = cdt_forward(c.members[0], r).grid

    s0, s1 = support_interval(template)
    probes = np.linspace(s0, s1, ROSTER_PROBES)
    roster = _roster_inverses(c.diffeos, probes)

    rng = np.random.default_rng(seed)
    report = WitnessReport(label=c.label, map_tolerance=tol, signal_tolerance=signal_tolerance)
    n = len(c.members)
    for trial in range(trials):
        i, j = (int(k) for k in rng.integers(0, n, size=2))
        alpha = float(alphas[trial % len(alphas)]) if alphas is not None else float(rng.uniform(0.0, 1.0))
        M = TransportMap1D(map_grid, alpha * maps[i] + (1.0 - alpha) * maps[j])

        g = convex_combo_of_inverses(c.diffeos[i], c.diffeos[j], alpha)
        regenerated = apply_diffeo_1d(template, g)
        map_gap = float(np.max(np.abs(cdt_forward(regenerated, r).values - M.values)))
        signal_gap = l1_gap(cdt_inverse(M, r, template.grid), regenerated)

        combined = alpha * roster[i] + (1.0 - alpha) * roster[j]
        in_group = c.group_spec.contains(g) if c.group_spec is not None else None
        report.trials.append(WitnessTrial(i, j, alpha, map_gap, signal_gap,
                                          _matches_roster(combined, roster), in_group))

    logger.info(f"Witness '{c.label}': {trials} trials, max map gap {report.max_map_gap:.3g}, "
                f"max signal gap {report.max_signal_gap:.3g}")
    return report


@dataclass
class NegativeControlReport:
    """Midpoint of the shift-0 and shift-2 transforms against the shift-1 transform"""
    midpoint_map_gap: float
    midpoint_signal_gap: float
    midpoint_in_roster: bool
    midpoint_in_group: bool
    quarter_in_group: bool
    map_tolerance: float

    @property
    def escapes_roster(self) -> bool:
        """The midpoint is a valid transform that the generated class does not contain."""
        return (self.midpoint_map_gap <= self.map_tolerance
                and self.midpoint_signal_gap <= SIGNAL_TOLERANCE
                and not self.midpoint_in_roster)

    @property
    def escapes_group(self) -> bool:
        return not self.quarter_in_group


def integer_translation_control(n: int = 1024, template: Optional[Signal1D] = None) -> NegativeControlReport:
    """
    Convex combinations in the integer-translation group.

    The roster holds the shifts 0 and 2 of a box on [0, 3.5]; the reference is
    the indicator of [0, 1]. The midpoint of the two transforms is the
    transform of the shift-1 signal, which is not in the roster. The weight
    0.25 produces a shift of 1.5, outside the group altogether.
    """
    grid = Grid1D(0.0, 3.5, n)
    if template is None:
        template = uniform_signal(grid, 0.35, 0.65)
    r = uniform_signal(grid, 0.0, 1.0)
    spec = GroupSpec1D(kind=GroupKind.INTEGER_TRANSLATIONS, domain=(grid.xmin, grid.xmax))
    roster = [translation(0.0), translation(2.0)]
    c = generate_class(template, roster, group_spec=spec, label="integer-shifts")
    maps = transform_matrix(c, r)
    map_grid = cdt_forward(c.members[0], r).grid
    midpoint = TransportMap1D(map_grid, 0.5 * (maps[0] + maps[1]))

    shifted = translate(template, 1.0)
    map_gap = float(np.max(np.abs(cdt_forward(shifted, r).values - midpoint.values)))
    signal_gap = l1_gap(cdt_inverse(midpoint, r, grid), shifted)

    s0, s1 = support_interval(template)
    probes = np.linspace(s0, s1, ROSTER_PROBES)
    table = _roster_inverses(roster, probes)
    in_roster = _matches_roster(0.5 * (table[0] + table[1]), table)

    midpoint_g = convex_combo_of_inverses(roster[0], roster[1], 0.5)
    quarter_g = convex_combo_of_inverses(roster[0], roster[1], 0.25)
    report = NegativeControlReport(
        midpoint_map_gap=map_gap,
        midpoint_signal_gap=signal_gap,
        midpoint_in_roster=in_roster,
        midpoint_in_group=spec.contains(midpoint_g),
        quarter_in_group=spec.contains(quarter_g),
        map_tolerance=3.0 * grid.dx,
    )
    logger.info(f"Integer-translation control: midpoint gap {map_gap:.3g}, in roster {in_roster}, "
                f"quarter combination in group {report.quarter_in_group}")
    return report


def partition_symmetry_gap(p: Signal1D, h: Diffeo1D) -> float:
    """
    L1 gap between p and the regeneration of p from q = p_h through h^{-1}.
    Small values certify p in S_{q,H} whenever q is in S_{p,H}.
    """
    q = apply_diffeo_1d(p, h)
    return l1_gap(apply_diffeo_1d(q, h.inverse()), p)


@dataclass
class PartitionReport:
    """Separation of the convex hulls of two transformed classes"""
    margin: float
    sampled_min_distance: float
    draws: int

    @property
    def separated(self) -> bool:
        return self.margin > 1e-9


def hull_margin(features_a: np.ndarray, features_b: np.ndarray) -> float:
    """
    Largest delta such that some w with |w|_inf <= 1 and offset c satisfy
    w.a <= c - delta for every row a and w.b >= c + delta for every row b.
    Zero when the convex hulls intersect.
    """
    A = np.asarray(features_a, dtype=float)
    B = np.asarray(features_b, dtype=float)
    d = A.shape[1]
    objective = np.zeros(d + 2)
    objective[-1] = -1.0
    upper = np.vstack([
        np.hstack([A, -np.ones((A.shape[0], 1)), np.ones((A.shape[0], 1))]),
        np.hstack([-B, np.ones((B.shape[0], 1)), np.ones((B.shape[0], 1))]),
    ])
    bounds = [(-1.0, 1.0)] * d + [(None, None), (0.0, 1.0)]
    result = linprog(objective, A_ub=upper, b_ub=np.zeros(upper.shape[0]), bounds=bounds, method="highs")
    if result.status != 0:
        raise OracleInfeasible(f"Hull margin LP failed: {result.message}")
    return max(float(-result.fun), 0.0)


def _random_combinations(features: np.ndarray, draws: int, rng: np.random.Generator) -> np.ndarray:
    weights = rng.dirichlet(np.ones(features.shape[0]), size=draws)
    return weights @ features


def partition_check(c1: SignalClass, c2: SignalClass, r: Signal1D, draws: int = 1000,
                    seed: int = 0) -> PartitionReport:
    """
    Measure how far apart the convex hulls of two transformed classes are.

    Args:
        c1: First class
        c2: Second class
        r: Reference density
        draws: Random convex combinations drawn per class
        seed: Master seed for the combinations

    Returns:
        PartitionReport with the LP separation margin and the smallest sampled
        L2 distance between combinations
    """
    A = transform_matrix(c1, r)
    B = transform_matrix(c2, r)
    if A.shape[1] != B.shape[1]:
        raise PreconditionError("Classes were transformed on different reference grids")
    margin = hull_margin(A, B)
    combos_a = _random_combinations(A, draws, task_rng(seed, 0))
    combos_b = _random_combinations(B, draws, task_rng(seed, 1))
    sampled = float(cdist(combos_a, combos_b).min())
    logger.info(f"Partition '{c1.label}' vs '{c2.label}': margin {margin:.3g}, sampled distance {sampled:.3g}")
    return PartitionReport(margin=margin, sampled_min_distance=sampled, draws=draws)
