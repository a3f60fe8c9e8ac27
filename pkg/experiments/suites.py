"""
Suite Runner for Verification Suites

Each suite exercises one property of the library on seeded random cases and
collects the measured gaps in a SuiteResult.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from convexity_lab.classes import generate_class, one_bump
from convexity_lab.witness import convexity_witness, integer_translation_control, l1_gap
from diffeo.diffeo2d import Ha, Hr, hr_compose, hr_inverse, max_curl, quadratic_bend
from diffeo.groups import GroupKind, GroupSpec1D
from diffeo.profiles import QuadraticMonotone
from diffeo.sampler import SupportConstraint, sample_polynomial_diffeos
from ot_oracle.kantorovich import barycentric_map, kantorovich_lp_2d
from ot_oracle.quantile import w2_quantile_oracle
from signal_core.density import Image2D, Signal1D, normalize, normalize_image, resample_image, support_interval, uniform_signal
from signal_core.errors import CertificateError
from signal_core.grid import Grid1D, Grid2D
from signal_core.io import rows_to_csv
from signal_core.seeding import derive_seed, task_rng
from transforms.cdt import apply_diffeo_1d, cdt_forward, cdt_inverse, composition_push, w2_distance
from transforms.lot2d import (PrMember, apply_diffeo_2d, composition_violation_demo, default_demo_reference,
                              generate_pr_member, lot_forward_pr, member_after_diffeo)
from transforms.maps import mean_displacement
from transforms.radon_cdt import default_angles, rcdt

logger = logging.getLogger(__name__)

ROUNDTRIP_TOLERANCE = 1e-2
W2_RELATIVE_TOLERANCE = 1e-3
W2_EXACT_TOLERANCE = 1e-4
COMPOSE_TOLERANCE = 1e-9
INVERSE_TOLERANCE = 1e-8
BEND_TOLERANCE = 1e-10
CURL_TOLERANCE = 1e-4
DISPLACEMENT_TOLERANCE_CELLS = 1.5
SHIFT_TOLERANCE_CELLS = 3.0
MAX_MEMBER_DRAWS = 5


@dataclass
class SuiteResult:
    """Result of running a verification suite"""
    suite: str
    success: bool
    columns: List[str]
    rows: List[List] = field(default_factory=list)
    max_gap: float = 0.0
    tolerance: float = 0.0
    failing_case: Optional[Dict] = None
    execution_time_seconds: float = 0.0
    error_message: Optional[str] = None
    notes: Dict[str, float] = field(default_factory=dict)

    def to_csv(self) -> str:
        return rows_to_csv([self.columns] + self.rows)


def _finish(suite: str, columns: List[str], rows: List[List], gap_column: str, tolerance: float,
            passed_column: str = "passed") -> SuiteResult:
    gap_index = columns.index(gap_column)
    passed_index = columns.index(passed_column)
    failing = next((dict(zip(columns, row)) for row in rows if not row[passed_index]), None)
    gaps = [float(row[gap_index]) for row in rows]
    return SuiteResult(
        suite=suite,
        success=failing is None,
        columns=columns,
        rows=rows,
        max_gap=max(gaps, default=0.0),
        tolerance=tolerance,
        failing_case=failing,
    )


def random_mixture(grid: Grid1D, rng: np.random.Generator) -> Signal1D:
    """A box with connected support carrying smooth bumps and an optional inner step."""
    x = grid.nodes
    a, b = rng.uniform(0.1, 0.3), rng.uniform(0.7, 0.9)
    inside = ((x >= a) & (x <= b)).astype(float)
    raw = 0.5 * np.ones_like(x)
    for _ in range(rng.integers(1, 4)):
        center, width = rng.uniform(a, b), rng.uniform(0.03, 0.08)
        raw += rng.uniform(0.5, 2.0) * np.exp(-0.5 * ((x - center) / width) ** 2)
    if rng.uniform() < 0.5:
        lo = rng.uniform(a, 0.5 * (a + b))
        raw += rng.uniform(0.2, 1.0) * ((x >= lo) & (x <= lo + 0.1)).astype(float)
    return normalize(raw * inside, grid)


def random_positive_density(grid: Grid1D, rng: np.random.Generator) -> Signal1D:
    """Uniform floor plus Gaussian bumps, strictly positive on the grid."""
    x = grid.nodes
    raw = 0.2 * np.ones_like(x)
    for _ in range(rng.integers(1, 4)):
        center, width = rng.uniform(0.15, 0.85), rng.uniform(0.04, 0.15)
        raw += rng.uniform(0.5, 2.0) * np.exp(-0.5 * ((x - center) / width) ** 2)
    return normalize(raw, grid)


def random_hr(rng: np.random.Generator) -> Hr:
    """Mild Hr map with quadratic profiles, defined on a neighbourhood of [-2, 2]^2."""
    def profile():
        return QuadraticMonotone(rng.uniform(0.0, 0.05), rng.uniform(0.85, 1.15), rng.uniform(-0.05, 0.05))
    return Hr(profile(), profile())


def suite_cdt_roundtrip(seed: int, grid_n: Optional[int] = None) -> SuiteResult:
    """Forward then inverse CDT of 20 random connected-support signals."""
    grid = Grid1D(0.0, 1.0, grid_n or 1024)
    r = uniform_signal(grid)
    rows = []
    for k in range(20):
        p = random_mixture(grid, task_rng(seed, k))
        gap = l1_gap(cdt_inverse(cdt_forward(p, r), r), p)
        rows.append([k, gap, gap <= ROUNDTRIP_TOLERANCE])
    return _finish("cdt-roundtrip", ["case", "l1_gap", "passed"], rows, "l1_gap", ROUNDTRIP_TOLERANCE)


def suite_composition_1d(seed: int, grid_n: Optional[int] = None) -> SuiteResult:
    """Transform of p_h against h^-1 applied to the transform of p, for degree-5 diffeomorphisms."""
    grid = Grid1D(0.0, 1.0, grid_n or 2048)
    r = uniform_signal(grid)
    p = one_bump(grid)
    tolerance = 3.0 * grid.dx
    diffeos = sample_polynomial_diffeos(5, 100, derive_seed(seed, 0), SupportConstraint(support_interval(p)))
    base = cdt_forward(p, r)
    rows = []
    for k, h in enumerate(diffeos):
        predicted = composition_push(h, base)
        gap = cdt_forward(apply_diffeo_1d(p, h), r).sup_distance(predicted)
        rows.append([k, gap, gap <= tolerance])
    return _finish("composition-1d", ["case", "sup_gap", "passed"], rows, "sup_gap", tolerance)


def _convex_families() -> List:
    return [
        ("translations", GroupSpec1D(kind=GroupKind.TRANSLATIONS, bounds={"mu": (-0.3, 0.3)})),
        ("increasing_affine", GroupSpec1D(kind=GroupKind.INCREASING_AFFINE,
                                          bounds={"alpha": (0.9, 1.2), "mu": (-0.1, 0.1)})),
        ("fixed_points", GroupSpec1D(kind=GroupKind.FIXED_POINTS, fixed_points=(0.3, 0.7), tolerance=1e-6)),
        ("degree5", None),
    ]


def suite_convexity_1d(seed: int, grid_n: Optional[int] = None) -> SuiteResult:
    """Witness trials for every convex family plus the integer-translation control."""
    grid = Grid1D(0.0, 1.0, grid_n or 2048)
    r = uniform_signal(grid)
    p = one_bump(grid)
    columns = ["family", "trials", "max_map_gap", "max_signal_gap", "group_closed", "passed"]
    rows = []
    for k, (name, spec) in enumerate(_convex_families()):
        member_seed = derive_seed(seed, k, 0)
        if spec is None:
            diffeos = sample_polynomial_diffeos(5, 20, member_seed, SupportConstraint(support_interval(p)))
        else:
            diffeos = spec.sample(20, member_seed)
        c = generate_class(p, diffeos, group_spec=spec, label=name)
        report = convexity_witness(c, r, trials=200, seed=derive_seed(seed, k, 1))
        rows.append([name, len(report.trials), report.max_map_gap, report.max_signal_gap,
                     report.group_closed, report.passed])

    control = integer_translation_control(n=grid.n)
    rows.append(["integer_translations_control", 1, control.midpoint_map_gap, control.midpoint_signal_gap,
                 not control.quarter_in_group, control.escapes_roster and control.escapes_group])
    result = _finish("convexity-1d", columns, rows, "max_map_gap", 3.0 * grid.dx)
    result.notes["midpoint_in_group"] = float(control.midpoint_in_group)
    return result


def suite_hr_group(seed: int, grid_n: Optional[int] = None) -> SuiteResult:
    """Group laws of Hr: composition, inversion, curl-freeness and the bend instance."""
    columns = ["check", "gap", "tolerance", "passed"]
    rows = []

    def record(check: str, gap: float, tolerance: float):
        rows.append([check, gap, tolerance, gap <= tolerance])

    bend = quadratic_bend()
    fx, fy = bend(1.0, 1.0)
    record("bend_forward", float(max(abs(fx - 1.2), abs(fy - 1.2))), BEND_TOLERANCE)
    ix, iy = hr_inverse(bend)(1.2, 1.2)
    record("bend_inverse", float(max(abs(ix - 1.0), abs(iy - 1.0))), BEND_TOLERANCE)
    record("bend_curl", max_curl(bend, (-2.0, 2.0, -2.0, 2.0)), CURL_TOLERANCE)

    for k in range(10):
        rng = task_rng(seed, k)
        h1, h2 = random_hr(rng), random_hr(rng)
        x, y = rng.uniform(-1.0, 1.0, size=(2, 256))
        cx, cy = hr_compose(h1, h2)(x, y)
        dx_, dy_ = h1(*h2(x, y))
        record(f"compose_{k}", float(np.max(np.abs(np.concatenate([cx - dx_, cy - dy_])))), COMPOSE_TOLERANCE)
        ux, uy = hr_compose(h1, hr_inverse(h1))(x, y)
        record(f"inverse_{k}", float(np.max(np.abs(np.concatenate([ux - x, uy - y])))), INVERSE_TOLERANCE)
        record(f"curl_{k}", max_curl(h1, (-2.0, 2.0, -2.0, 2.0)), CURL_TOLERANCE)

    failing = next((dict(zip(columns, row)) for row in rows if not row[3]), None)
    return SuiteResult("hr-group", failing is None, columns, rows,
                       max_gap=max(row[1] for row in rows), tolerance=CURL_TOLERANCE, failing_case=failing)


def _draw_pr_case(rng: np.random.Generator, r: Image2D, grid: Grid2D) -> Optional[PrMember]:
    """p_g for a random pair (h, g), redrawn while a certificate residual exceeds its tolerance."""
    for attempt in range(MAX_MEMBER_DRAWS):
        h, g = random_hr(rng), random_hr(rng)
        try:
            return member_after_diffeo(generate_pr_member(r, h, grid), g, grid)
        except CertificateError as e:
            logger.debug(f"Redrawing P_r pair after attempt {attempt + 1}: {e}")
    return None


def suite_pr_composition(seed: int, grid_n: Optional[int] = None) -> SuiteResult:
    """Closed-form P_r transform g^-1 o h against the LP barycentric map for 20 random pairs."""
    n = grid_n or 12
    r_fine = default_demo_reference(64)
    r_lp = default_demo_reference(n)
    member_grid = Grid2D.square(-1.0, 1.0, 128)
    rows = []
    for k in range(20):
        m_g = _draw_pr_case(task_rng(seed, k), r_fine, member_grid)
        if m_g is None:
            logger.warning(f"Case {k}: no certified P_r pair in {MAX_MEMBER_DRAWS} draws")
            rows.append([k, float("inf"), float("nan"), False])
            continue
        closed = lot_forward_pr(m_g, r_lp.grid)
        target_grid = Grid2D.bounding(closed.values[..., 0].ravel(), closed.values[..., 1].ravel(),
                                      n, n, pad_cells=1.0)
        target = resample_image(m_g.density, target_grid)
        oracle = barycentric_map(kantorovich_lp_2d(r_lp, target))
        cells = mean_displacement(oracle, closed, r_lp.cell_masses) / target_grid.cell
        rows.append([k, cells, m_g.residual, cells <= DISPLACEMENT_TOLERANCE_CELLS])
    return _finish("theorem-4-10", ["case", "displacement_cells", "certificate_residual", "passed"], rows,
                   "displacement_cells", DISPLACEMENT_TOLERANCE_CELLS)


def suite_ha_limitation(seed: int, grid_n: Optional[int] = None) -> SuiteResult:
    """Composition property failure for diag(2, 1) against the Ha control."""
    report = composition_violation_demo(grid_n=grid_n or 12)
    passed = report.violated and report.control_displacement_gap <= DISPLACEMENT_TOLERANCE_CELLS
    data = report.to_dict()
    columns = list(data) + ["passed"]
    rows = [list(data.values()) + [passed]]
    result = _finish("theorem-4-5", columns, rows, "cost_ratio", 5.0)
    result.notes["cost_ratio"] = report.cost_ratio
    return result


def _shift_test_image(grid: Grid2D):
    X, Y = grid.mesh()
    rho2 = ((X - 0.05) ** 2 + (Y + 0.05) ** 2) / 0.4 ** 2
    return normalize_image(np.maximum(1.0 - rho2, 0.0) ** 2, grid)


def suite_rcdt_shift(seed: int, grid_n: Optional[int] = None) -> SuiteResult:
    """Per-angle offsets of the R-CDT of translated images against <t, theta>."""
    grid = Grid2D.square(-1.0, 1.0, grid_n or 128)
    angles = default_angles(32)
    base_image = _shift_test_image(grid)
    base = rcdt(base_image, angles=angles)
    cell = base.sinogram.grid.dx
    rows = []
    for k in range(10):
        t = task_rng(seed, k).uniform(-0.2, 0.2, size=2)
        moved = rcdt(apply_diffeo_2d(base_image, Ha(1.0, -t)), angles=angles, offset_grid=base.sinogram.grid)
        expected = t[0] * np.cos(angles) + t[1] * np.sin(angles)
        offsets = np.array([np.mean(a.values - b.values) for a, b in zip(moved.maps, base.maps)])
        gap = float(np.max(np.abs(offsets - expected))) / cell
        rows.append([k, float(t[0]), float(t[1]), gap, gap <= SHIFT_TOLERANCE_CELLS])
    return _finish("rcdt-shift", ["case", "tx", "ty", "gap_cells", "passed"], rows, "gap_cells",
                   SHIFT_TOLERANCE_CELLS)


def suite_w2_embedding(seed: int, grid_n: Optional[int] = None) -> SuiteResult:
    """Embedding distance against the quantile oracle, plus the box versus half-box value."""
    grid = Grid1D(0.0, 1.0, grid_n or 1024)
    r = uniform_signal(grid)
    columns = ["case", "embedding", "oracle", "gap", "passed"]
    rows = []
    for k in range(50):
        rng = task_rng(seed, k)
        p, q = random_positive_density(grid, rng), random_positive_density(grid, rng)
        embedded, oracle = w2_distance(p, q, r), w2_quantile_oracle(p, q)
        gap = abs(embedded - oracle) / oracle
        rows.append([f"pair_{k}", embedded, oracle, gap, gap <= W2_RELATIVE_TOLERANCE])

    fine = Grid1D(0.0, 1.0, 20001)
    box, half = uniform_signal(fine), uniform_signal(fine, 0.0, 0.5)
    exact = 1.0 / (2.0 * np.sqrt(3.0))
    embedded = w2_distance(box, half, box)
    oracle = w2_quantile_oracle(box, half)
    gap = max(abs(embedded - exact), abs(oracle - exact))
    rows.append(["box_vs_half_box", embedded, oracle, gap, gap <= W2_EXACT_TOLERANCE])
    return _finish("w2-embedding", columns, rows, "gap", W2_RELATIVE_TOLERANCE)


SUITES: Dict[str, Callable[[int, Optional[int]], SuiteResult]] = {
    "cdt-roundtrip": suite_cdt_roundtrip,
    "composition-1d": suite_composition_1d,
    "convexity-1d": suite_convexity_1d,
    "hr-group": suite_hr_group,
    "theorem-4-10": suite_pr_composition,
    "theorem-4-5": suite_ha_limitation,
    "rcdt-shift": suite_rcdt_shift,
    "w2-embedding": suite_w2_embedding,
}


def run_suite(name: str, seed: int = 0, grid_n: Optional[int] = None) -> SuiteResult:
    """
    Run a named verification suite

    Args:
        name: Suite name, one of SUITES
        seed: Master seed
        grid_n: Optional grid size override

    Returns:
        SuiteResult with timing filled in
    """
    suite = SUITES[name]
    logger.info(f"Starting suite: {name} (seed {seed})")
    start = time.perf_counter()
    result = suite(seed, grid_n)
    result.execution_time_seconds = time.perf_counter() - start
    status = "passed" if result.success else "failed"
    logger.info(f"Suite {name} {status} in {result.execution_time_seconds:.2f}s, max gap {result.max_gap:.3g}")
    return result
