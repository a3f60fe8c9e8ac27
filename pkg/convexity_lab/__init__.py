"""
Generative signal classes, convexity witnesses, partition checks and the
Fisher-discriminant separability experiments.
"""

from .classes import SignalClass, generate_class, transform_class
from .config import ClassConfig, ExperimentConfig, GridConfig, SamplerConfig
from .lda import LdaModel, lda_fit
from .separability import SeparabilityReport, separability_experiment
from .witness import (NegativeControlReport, PartitionReport, WitnessReport, convexity_witness,
                      integer_translation_control, partition_check)

__all__ = [
    "SignalClass",
    "generate_class",
    "transform_class",
    "ClassConfig",
    "ExperimentConfig",
    "GridConfig",
    "SamplerConfig",
    "LdaModel",
    "lda_fit",
    "SeparabilityReport",
    "separability_experiment",
    "NegativeControlReport",
    "PartitionReport",
    "WitnessReport",
    "convexity_witness",
    "integer_translation_control",
    "partition_check",
]
