"""
Experiment Runner

Executes experiment definitions and writes plot-ready CSV files.
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List

import numpy as np

from convexity_lab.classes import make_template
from convexity_lab.config import ExperimentConfig
from convexity_lab.separability import SeparabilityReport, separability_experiment
from diffeo.diffeo2d import Hr, eval2
from diffeo.profiles import AffinePlus, QuadraticMonotone
from signal_core.density import uniform_signal
from signal_core.errors import ConfigError
from signal_core.grid import Grid1D
from signal_core.io import atomic_write_text, rows_to_csv
from transforms.cdt import cdt_forward

logger = logging.getLogger(__name__)


@dataclass
class ExperimentResult:
    """Result of running an experiment"""
    experiment: str
    success: bool
    outputs: List[Path] = field(default_factory=list)
    summary: Dict[str, object] = field(default_factory=dict)
    execution_time_seconds: float = 0.0
    error_message: str = ""


def _write_csv(out_dir: Path, name: str, header: List[str], rows, result: ExperimentResult):
    path = atomic_write_text(out_dir / name, rows_to_csv([header] + list(rows)))
    result.outputs.append(path)


def _write_separability(report: SeparabilityReport, out_dir: Path, result: ExperimentResult):
    columns = ["class", "index", "raw_projection", "transform_projection"]
    _write_csv(out_dir, "projections.csv", columns, ([row[c] for c in columns] for row in report.rows), result)
    summary = report.summary()
    _write_csv(out_dir, "summary.csv", list(summary), [list(summary.values())], result)
    result.summary.update(summary)


def run_separability(config: ExperimentConfig, out_dir: Path, result: ExperimentResult):
    """one-two-bump: projections in both domains and the accuracy summary."""
    report = separability_experiment(config)
    _write_separability(report, out_dir, result)
    result.success = report.passed if config.require_separation else True


def run_lda_degree5(config: ExperimentConfig, out_dir: Path, result: ExperimentResult):
    """LDA projections of degree-5 classes plus the templates and a few samples of each class."""
    report = separability_experiment(config)
    _write_separability(report, out_dir, result)

    samples = int(config.options.get("samples_per_class", 3))
    columns = ["x"]
    series = []
    for c in report.classes:
        columns.append(f"{c.label}_template")
        series.append(c.template.values)
    for c in report.classes:
        for k in range(min(samples, len(c.members))):
            columns.append(f"{c.label}_sample_{k}")
            series.append(c.members[k].values)
    x = report.classes[0].template.grid.nodes
    rows = ([float(x[i])] + [float(s[i]) for s in series] for i in range(x.size))
    _write_csv(out_dir, "templates_and_samples.csv", columns, rows, result)
    result.success = report.passed if config.require_separation else True


def run_vector_field(config: ExperimentConfig, out_dir: Path, result: ExperimentResult):
    """Hr map with f'(t) = t + c t^2 and g'(t) = t on a square grid."""
    lo, hi = config.options.get("box", [-2.0, 2.0])
    n = int(config.options.get("n", 21))
    h = Hr(QuadraticMonotone(float(config.options.get("f_quadratic", 0.1)), 1.0), AffinePlus(1.0, 0.0))
    axis = np.linspace(lo, hi, n)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    HX, HY = eval2(h, X, Y)
    rows = ([float(X[i, j]), float(Y[i, j]), float(HX[i, j]), float(HY[i, j])]
            for i in range(n) for j in range(n))
    _write_csv(out_dir, "vector_field.csv", ["x", "y", "hx", "hy"], rows, result)
    result.summary["points"] = n * n
    result.success = True


def run_cdt_examples(config: ExperimentConfig, out_dir: Path, result: ExperimentResult):
    """Example signals and their CDTs against the uniform reference."""
    grid = Grid1D(config.grid.xmin, config.grid.xmax, config.grid.n)
    r = uniform_signal(grid)
    names = list(config.options.get("templates", ["gaussian", "two_box"]))
    signals = [make_template(name, grid) for name in names]
    maps = [cdt_forward(p, r) for p in signals]

    x = grid.nodes
    _write_csv(out_dir, "signals.csv", ["x"] + names,
               ([float(x[i])] + [float(p.values[i]) for p in signals] for i in range(grid.n)), result)
    map_x = maps[0].grid.nodes
    _write_csv(out_dir, "transforms.csv", ["x"] + [f"{name}_cdt" for name in names],
               ([float(map_x[i])] + [float(T.values[i]) for T in maps] for i in range(map_x.size)), result)
    result.success = True


RUNNERS: Dict[str, Callable[[ExperimentConfig, Path, ExperimentResult], None]] = {
    "one-two-bump": run_separability,
    "lda-degree5": run_lda_degree5,
    "vector-field": run_vector_field,
    "cdt-examples": run_cdt_examples,
}


def run_experiment(config: ExperimentConfig, out_dir: Path) -> ExperimentResult:
    """
    Execute a single experiment

    Args:
        config: Validated experiment definition
        out_dir: Existing output directory

    Returns:
        ExperimentResult listing the files written
    """
    if config.experiment not in RUNNERS:
        raise ConfigError(f"Unknown experiment '{config.experiment}'")
    result = ExperimentResult(experiment=config.experiment, success=False)
    logger.info(f"Starting experiment: {config.experiment} (seed {config.seed})")
    start = time.perf_counter()
    RUNNERS[config.experiment](config, Path(out_dir), result)
    result.execution_time_seconds = time.perf_counter() - start
    logger.info(f"Experiment {config.experiment} finished in {result.execution_time_seconds:.2f}s")
    return result
