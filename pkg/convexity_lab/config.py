"""
Typed experiment configuration shared by the lab routines and the CLI loader.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple


@dataclass(frozen=True)
class GridConfig:
    """Uniform 1D grid"""
    xmin: float = 0.0
    xmax: float = 1.0
    n: int = 512


@dataclass(frozen=True)
class SamplerConfig:
    """How the diffeomorphisms of a class are drawn"""
    kind: str
    count: int
    bounds: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    degree: int = 5
    boxes: Optional[List[Tuple[float, float]]] = None
    margin: float = 0.01
    fixed_points: Tuple[float, ...] = ()
    interval: Optional[Tuple[float, float]] = None


@dataclass(frozen=True)
class ClassConfig:
    """One signal class: a template and its sampler"""
    label: str
    template: str
    sampler: SamplerConfig


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete experiment definition"""
    experiment: str
    seed: int = 0
    grid: GridConfig = field(default_factory=GridConfig)
    classes: List[ClassConfig] = field(default_factory=list)
    trials: int = 1000
    reference: str = "uniform"
    require_separation: bool = True
    options: Dict[str, Any] = field(default_factory=dict)
    description: str = ""

    @property
    def file_path(self) -> Optional[str]:
        """Path to the definition file"""
        return getattr(self, '_file_path', None)
