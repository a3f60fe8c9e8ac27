"""
Experiment Loader

Handles loading, validation and lookup of experiment definitions.
"""

import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from jsonschema import ValidationError, validate

from convexity_lab.config import ClassConfig, ExperimentConfig, GridConfig, SamplerConfig
from signal_core.errors import ConfigError

logger = logging.getLogger(__name__)

SCHEMA_FILE = "experiment_schema.json"


class ExperimentLoader:
    """Loads and validates experiment definitions"""

    def __init__(self, definitions_directory: Union[str, Path, None] = None):
        """
        Initialize experiment loader

        Args:
            definitions_directory: Directory holding <experiment>/*.json definitions
        """
        package_dir = Path(__file__).parent
        if definitions_directory is None:
            definitions_directory = package_dir / "definitions"

        self.definitions_directory = Path(definitions_directory)
        self.schema = self._load_schema(package_dir / SCHEMA_FILE)
        self._config_cache: Dict[str, ExperimentConfig] = {}

    def _load_schema(self, schema_path: Path) -> Dict[str, Any]:
        """Load the experiment definition JSON schema"""
        try:
            with open(schema_path, 'r') as f:
                return json.load(f)
        except FileNotFoundError:
            raise ConfigError(f"Experiment schema not found at {schema_path}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"Invalid JSON in experiment schema: {e}")

    def load_config(self, config_file: Union[str, Path]) -> ExperimentConfig:
        """
        Load a single experiment definition from file

        Args:
            config_file: Path to the definition JSON file

        Returns:
            ExperimentConfig instance

        Raises:
            ConfigError: If the file is missing, malformed or fails validation
        """
        config_path = Path(config_file)
        if not config_path.is_absolute() and not config_path.exists():
            config_path = self.definitions_directory / config_path

        cache_key = str(config_path.resolve())
        if cache_key in self._config_cache:
            return self._config_cache[cache_key]

        try:
            with open(config_path, 'r') as f:
                config_data = json.load(f)
        except FileNotFoundError:
            raise ConfigError(f"Experiment file not found: {config_path}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"Invalid JSON in experiment file {config_path}: {e}")

        config = self.parse(config_data, source=str(config_path))
        object.__setattr__(config, '_file_path', str(config_path))

        self._config_cache[cache_key] = config
        return config

    def parse(self, config_data: Dict[str, Any], source: str = "<config>") -> ExperimentConfig:
        """Validate a definition document and convert it to an ExperimentConfig"""
        try:
            validate(instance=config_data, schema=self.schema)
        except ValidationError as e:
            raise ConfigError(f"Experiment validation failed for {source}: {e.message}")
        return self._dict_to_config(config_data)

    def load_builtin(self, experiment: str) -> ExperimentConfig:
        """
        Load the built-in definition of a named experiment

        Args:
            experiment: Experiment name such as 'one-two-bump'

        Returns:
            ExperimentConfig
        """
        directory = self.definitions_directory / experiment.replace('-', '_')
        files = sorted(directory.glob('*.json')) if directory.is_dir() else []
        if not files:
            raise ConfigError(f"No built-in definition for experiment '{experiment}'")
        return self.load_config(files[0])

    def load_all_configs(self) -> List[ExperimentConfig]:
        """Load every definition under the definitions directory"""
        configs = []
        for json_file in sorted(self.definitions_directory.rglob('*.json')):
            try:
                configs.append(self.load_config(json_file))
            except ConfigError as e:
                logger.warning(f"Failed to load experiment from {json_file}: {e}")
        return configs

    def _dict_to_config(self, config_data: Dict[str, Any]) -> ExperimentConfig:
        """Convert dictionary to ExperimentConfig object"""

        grid = GridConfig()
        if 'grid' in config_data:
            grid_data = config_data['grid']
            grid = GridConfig(
                xmin=float(grid_data.get('xmin', 0.0)),
                xmax=float(grid_data.get('xmax', 1.0)),
                n=int(grid_data['n'])
            )
            if not grid.xmin < grid.xmax:
                raise ConfigError(f"Grid needs xmin < xmax, got [{grid.xmin}, {grid.xmax}]")

        classes = []
        for class_data in config_data.get('classes', []):
            sampler_data = class_data['sampler']
            boxes = sampler_data.get('boxes')
            interval = sampler_data.get('interval')
            sampler = SamplerConfig(
                kind=sampler_data['kind'],
                count=sampler_data['count'],
                bounds={k: (float(v[0]), float(v[1])) for k, v in sampler_data.get('bounds', {}).items()},
                degree=sampler_data.get('degree', 5),
                boxes=[(float(lo), float(hi)) for lo, hi in boxes] if boxes is not None else None,
                margin=float(sampler_data.get('margin', 0.01)),
                fixed_points=tuple(float(x) for x in sampler_data.get('fixed_points', [])),
                interval=(float(interval[0]), float(interval[1])) if interval is not None else None
            )
            classes.append(ClassConfig(
                label=class_data['label'],
                template=class_data['template'],
                sampler=sampler
            ))

        return ExperimentConfig(
            experiment=config_data['experiment'],
            seed=config_data.get('seed', 0),
            grid=grid,
            classes=classes,
            trials=config_data.get('trials', 1000),
            reference=config_data.get('reference', 'uniform'),
            require_separation=config_data.get('require_separation', True),
            options=dict(config_data.get('options', {})),
            description=config_data.get('description', '')
        )

    def clear_cache(self):
        """Clear the definition cache"""
        self._config_cache.clear()


def with_overrides(config: ExperimentConfig, seed: Optional[int] = None,
                   grid_n: Optional[int] = None) -> ExperimentConfig:
    """Apply the --seed and --grid-n command-line overrides."""
    if seed is not None:
        config = replace(config, seed=seed)
    if grid_n is not None:
        config = replace(config, grid=replace(config.grid, n=grid_n))
    return config
