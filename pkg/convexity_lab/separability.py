"""
Linear separability of two generated classes, in the raw signal domain and in
the CDT domain.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from convexity_lab.classes import SignalClass, generate_class, make_template, transform_matrix
from convexity_lab.config import ClassConfig, ExperimentConfig, SamplerConfig
from convexity_lab.lda import LdaModel, lda_fit
from convexity_lab.witness import PartitionReport, partition_check
from diffeo.diffeo1d import Diffeo1D
from diffeo.groups import GroupKind, GroupSpec1D
from diffeo.sampler import SupportConstraint, sample_polynomial_diffeos
from signal_core.density import Signal1D, support_interval, uniform_signal
from signal_core.errors import ConfigError
from signal_core.grid import Grid1D
from signal_core.seeding import derive_seed

logger = logging.getLogger(__name__)

POLYNOMIAL_SAMPLER = "polynomial"


@dataclass
class SeparabilityReport:
    """Per-sample projections plus accuracies in both domains"""
    experiment: str
    labels: Tuple[str, str]
    raw_accuracy: float
    transform_accuracy: float
    partition: PartitionReport
    raw_model: LdaModel
    transform_model: LdaModel
    rows: List[Dict] = field(default_factory=list)
    classes: Tuple[SignalClass, ...] = ()

    @property
    def passed(self) -> bool:
        return self.transform_accuracy == 1.0 and self.partition.separated

    def summary(self) -> Dict:
        return {
            "experiment": self.experiment,
            "raw_accuracy": self.raw_accuracy,
            "transform_accuracy": self.transform_accuracy,
            "margin": self.partition.margin,
            "sampled_min_distance": self.partition.sampled_min_distance,
        }


def build_reference(config: ExperimentConfig, grid: Grid1D) -> Signal1D:
    if config.reference != "uniform":
        raise ConfigError(f"Unsupported reference {config.reference!r}; only 'uniform' is available")
    return uniform_signal(grid)


def sample_roster(sampler: SamplerConfig, template: Signal1D, grid: Grid1D,
                  seed: int) -> Tuple[List[Diffeo1D], Optional[GroupSpec1D]]:
    """Draw the diffeomorphisms of one class as described by its sampler."""
    domain = (grid.xmin, grid.xmax)
    if sampler.kind == POLYNOMIAL_SAMPLER:
        constraint = SupportConstraint(support_interval(template), domain, sampler.margin)
        return sample_polynomial_diffeos(sampler.degree, sampler.count, seed, constraint, sampler.boxes), None
    try:
        kind = GroupKind(sampler.kind)
    except ValueError:
        raise ConfigError(f"Unknown sampler kind {sampler.kind!r}")
    spec = GroupSpec1D(kind=kind, fixed_points=tuple(sampler.fixed_points), interval=sampler.interval,
                       domain=domain, bounds=dict(sampler.bounds))
    return spec.sample(sampler.count, seed), spec


def build_class(class_config: ClassConfig, grid: Grid1D, seed: int) -> SignalClass:
    template = make_template(class_config.template, grid)
    diffeos, spec = sample_roster(class_config.sampler, template, grid, seed)
    return generate_class(template, diffeos, group_spec=spec, label=class_config.label)


def build_classes(config: ExperimentConfig) -> Tuple[Grid1D, List[SignalClass]]:
    """Grid and classes of a config, each class seeded from its index."""
    grid = Grid1D(config.grid.xmin, config.grid.xmax, config.grid.n)
    classes = [build_class(cc, grid, derive_seed(config.seed, k)) for k, cc in enumerate(config.classes)]
    return grid, classes


def separability_experiment(config: ExperimentConfig) -> SeparabilityReport:
    """
    Fit LDA on raw signals and on their CDTs for the two configured classes.

    Args:
        config: Experiment with exactly two classes

    Returns:
        SeparabilityReport; rows carry class, index and both projections

    Raises:
        ConfigError: If the config does not name exactly two classes
    """
    if len(config.classes) != 2:
        raise ConfigError(f"Separability needs exactly two classes, got {len(config.classes)}")
    grid, (c_a, c_b) = build_classes(config)
    r = build_reference(config, grid)

    raw_a = np.stack([p.values for p in c_a.members])
    raw_b = np.stack([p.values for p in c_b.members])
    maps_a = transform_matrix(c_a, r)
    maps_b = transform_matrix(c_b, r)

    raw_model = lda_fit(raw_a, raw_b)
    transform_model = lda_fit(maps_a, maps_b)
    partition = partition_check(c_a, c_b, r, draws=config.trials, seed=derive_seed(config.seed, len(config.classes)))

    rows = []
    for label, raw, maps in ((c_a.label, raw_a, maps_a), (c_b.label, raw_b, maps_b)):
        raw_proj = raw_model.project(raw)
        map_proj = transform_model.project(maps)
        for idx in range(raw.shape[0]):
            rows.append({
                "class": label,
                "index": idx,
                "raw_projection": float(raw_proj[idx]),
                "transform_projection": float(map_proj[idx]),
            })

    report = SeparabilityReport(
        experiment=config.experiment,
        labels=(c_a.label, c_b.label),
        raw_accuracy=raw_model.accuracy(raw_a, raw_b),
        transform_accuracy=transform_model.accuracy(maps_a, maps_b),
        partition=partition,
        raw_model=raw_model,
        transform_model=transform_model,
        rows=rows,
        classes=(c_a, c_b),
    )
    logger.info(f"Separability '{config.experiment}': raw accuracy {report.raw_accuracy:.3f}, "
                f"transform accuracy {report.transform_accuracy:.3f}, margin {partition.margin:.3g}")
    return report
