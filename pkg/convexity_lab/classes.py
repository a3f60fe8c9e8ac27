"""
Signal classes generated from a template by a roster of diffeomorphisms.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from diffeo.diffeo1d import Diffeo1D
from diffeo.diffeo2d import Diffeo2D
from diffeo.groups import GroupSpec1D
from signal_core.density import Image2D, Signal1D, normalize
from signal_core.errors import ConfigError, PreconditionError
from signal_core.grid import Grid1D
from transforms.cdt import apply_diffeo_1d, cdt_forward
from transforms.lot2d import apply_diffeo_2d
from transforms.maps import TransportMap1D

logger = logging.getLogger(__name__)

Template = Union[Signal1D, Image2D]


@dataclass(frozen=True, eq=False)
class SignalClass:
    """Template, its generating roster and the generated members."""
    label: str
    template: Template
    diffeos: List[Union[Diffeo1D, Diffeo2D]]
    members: List[Template]
    group_spec: Optional[GroupSpec1D] = None
    _transforms: Dict[Tuple[Grid1D, bytes], List[TransportMap1D]] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.members)


def _boxes(grid: Grid1D, intervals: Sequence[Sequence[float]]) -> Signal1D:
    x = grid.nodes
    slack = 1e-9 * grid.dx
    raw = np.zeros(grid.n)
    for lo, hi in intervals:
        raw += ((x >= lo - slack) & (x <= hi + slack)).astype(float)
    return normalize(raw, grid)


def one_bump(grid: Grid1D) -> Signal1D:
    """Indicator of [0.35, 0.65]."""
    return _boxes(grid, [(0.35, 0.65)])


def two_bump(grid: Grid1D) -> Signal1D:
    """Sum of the indicators of [0.35, 0.45] and [0.55, 0.65]."""
    return _boxes(grid, [(0.35, 0.45), (0.55, 0.65)])


def gaussian_bump(grid: Grid1D, mean: float = 0.5, sigma: float = 0.08) -> Signal1D:
    x = grid.nodes
    return normalize(np.exp(-0.5 * ((x - mean) / sigma) ** 2), grid)


def two_box(grid: Grid1D) -> Signal1D:
    """Unequal boxes on [0.2, 0.35] and [0.6, 0.9]."""
    x = grid.nodes
    raw = np.where((x >= 0.2) & (x <= 0.35), 2.0, 0.0) + np.where((x >= 0.6) & (x <= 0.9), 1.0, 0.0)
    return normalize(raw, grid)


TEMPLATES: Dict[str, Callable[[Grid1D], Signal1D]] = {
    "one_bump": one_bump,
    "two_bump": two_bump,
    "gaussian": gaussian_bump,
    "two_box": two_box,
}


def make_template(name: str, grid: Grid1D) -> Signal1D:
    try:
        return TEMPLATES[name](grid)
    except KeyError:
        raise ConfigError(f"Unknown template {name!r}; choose from {sorted(TEMPLATES)}")


def generate_class(template: Template, diffeos: Sequence[Union[Diffeo1D, Diffeo2D]],
                   group_spec: Optional[GroupSpec1D] = None, label: str = "class",
                   out_grid=None) -> SignalClass:
    """
    Apply every diffeomorphism of the roster to the template.

    Args:
        template: Signal1D or Image2D
        diffeos: Roster of 1D or 2D diffeomorphisms
        group_spec: Group the roster was drawn from, if any
        label: Class name used in reports
        out_grid: Output grid for the members (defaults to the template's)

    Returns:
        SignalClass
    """
    if isinstance(template, Image2D):
        members = [apply_diffeo_2d(template, h, out_grid) for h in diffeos]
    else:
        members = [apply_diffeo_1d(template, h, out_grid) for h in diffeos]
    logger.info(f"Generated class '{label}' with {len(members)} members")
    return SignalClass(label=label, template=template, diffeos=list(diffeos), members=members,
                       group_spec=group_spec)


def transform_class(c: SignalClass, r: Signal1D) -> List[TransportMap1D]:
    """CDT of every member against r (cached per reference grid and values)."""
    if isinstance(c.template, Image2D):
        raise PreconditionError("transform_class handles 1D classes; use lot_forward_pr for P_r members")
    key = (r.grid, r.values.tobytes())
    if key not in c._transforms:
        c._transforms[key] = [cdt_forward(p, r) for p in c.members]
    return c._transforms[key]


def transform_matrix(c: SignalClass, r: Signal1D) -> np.ndarray:
    return np.stack([t.values for t in transform_class(c, r)])
