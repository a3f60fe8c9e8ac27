"""
Experiments

Verification suites, experiment definitions and the transportlab CLI.
"""

from .config_loader import ExperimentLoader
from .run_manifest import RunManifest
from .runner import ExperimentResult, run_experiment
from .suites import SUITES, SuiteResult, run_suite

__all__ = [
    'ExperimentLoader',
    'RunManifest',
    'ExperimentResult',
    'run_experiment',
    'SUITES',
    'SuiteResult',
    'run_suite',
]
