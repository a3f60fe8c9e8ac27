"""
Tests for experiment definitions, run manifests and the command-line interface.
"""

import json

import numpy as np
import pytest

from convexity_lab.classes import one_bump, two_bump
from experiments.cli import EXIT_BAD_REFERENCE, EXIT_OK, EXIT_USAGE, OUTPUT_DIR_ENV, main
from experiments.config_loader import ExperimentLoader, with_overrides
from experiments.run_manifest import MANIFEST_NAME, RunManifest, config_digest
from signal_core.density import uniform_signal
from signal_core.errors import ConfigError
from signal_core.grid import Grid1D
from signal_core.io import parse_map1d, write_signal


class TestExperimentLoader:
    """Test loading and validation of experiment definitions."""

    def setup_method(self):
        """Set up test fixtures."""
        self.loader = ExperimentLoader()

    def test_builtin_definitions_are_valid(self):
        """Test that every shipped definition loads."""
        configs = self.loader.load_all_configs()

        assert {c.experiment for c in configs} == {"one-two-bump", "lda-degree5", "vector-field", "cdt-examples"}

    def test_load_one_two_bump(self):
        """Test the built-in one-two-bump definition."""
        config = self.loader.load_builtin("one-two-bump")

        assert config.seed == 7
        assert config.grid.n == 512
        assert [c.label for c in config.classes] == ["one_bump", "two_bump"]
        assert config.classes[0].sampler.bounds["mu"] == (-0.3, 0.3)
        assert config.file_path.endswith("one_two_bump.json")

    def test_unknown_experiment(self):
        """Test that unknown experiments are rejected by the schema."""
        with pytest.raises(ConfigError, match="validation failed"):
            self.loader.parse({"experiment": "three-bump"})

    def test_reversed_grid(self):
        """Test that a grid with xmin >= xmax is rejected."""
        with pytest.raises(ConfigError, match="xmin < xmax"):
            self.loader.parse({"experiment": "cdt-examples", "grid": {"xmin": 1.0, "xmax": 0.0, "n": 16}})

    def test_missing_file(self):
        """Test that a missing definition file is reported."""
        with pytest.raises(ConfigError, match="not found"):
            self.loader.load_config("/nonexistent/experiment.json")

    def test_overrides(self):
        """Test the seed and grid overrides."""
        config = with_overrides(self.loader.load_builtin("cdt-examples"), seed=5, grid_n=64)

        assert config.seed == 5
        assert config.grid.n == 64
        assert with_overrides(config) == config


class TestRunManifest:
    """Test the run record."""

    def test_digest_is_deterministic(self):
        """Test that key order does not change the digest."""
        assert config_digest({"a": 1, "b": 2}) == config_digest({"b": 2, "a": 1})
        assert config_digest({"a": 1}) != config_digest({"a": 2})

    def test_write_manifest(self, tmp_path):
        """Test that a finished manifest is written as JSON."""
        manifest = RunManifest(command="verify hr-group", config_digest="abc", seed=3)
        manifest.add_output(tmp_path / "hr-group.csv")
        manifest.finish(0)
        data = json.loads(manifest.write(tmp_path).read_text())

        assert data["exit_code"] == 0
        assert data["seed"] == 3
        assert data["finished_at"] is not None
        assert data["outputs"] == [str(tmp_path / "hr-group.csv")]


class TestCli:
    """Test the command-line interface."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = Grid1D(0.0, 1.0, 128)

    def test_no_command(self):
        """Test that a missing command is a usage error."""
        assert main([]) == EXIT_USAGE

    def test_unknown_suite(self):
        """Test that argparse rejects unknown suites."""
        with pytest.raises(SystemExit) as exc_info:
            main(["verify", "no-such-suite"])
        assert exc_info.value.code == 2

    def test_list(self, capsys):
        """Test listing suites and experiments."""
        assert main(["list"]) == EXIT_OK
        output = capsys.readouterr().out
        assert "hr-group" in output
        assert "one-two-bump" in output

    def test_validate(self):
        """Test validating the built-in definitions."""
        assert main(["validate"]) == EXIT_OK

    def test_experiment_needs_output_dir(self, monkeypatch):
        """Test that experiments refuse to run without an output directory."""
        monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)

        assert main(["experiment", "vector-field"]) == EXIT_USAGE

    def test_vector_field_experiment(self, tmp_path):
        """Test that the vector field is written with its manifest."""
        assert main(["experiment", "vector-field", "--out", str(tmp_path)]) == EXIT_OK

        lines = (tmp_path / "vector_field.csv").read_text().splitlines()
        manifest = json.loads((tmp_path / MANIFEST_NAME).read_text())
        assert lines[0] == "x,y,hx,hy"
        assert len(lines) == 1 + 21 * 21
        assert manifest["exit_code"] == EXIT_OK

    def test_output_dir_from_environment(self, tmp_path, monkeypatch):
        """Test that the environment variable supplies the output directory."""
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))

        assert main(["experiment", "cdt-examples", "--grid-n", "64"]) == EXIT_OK
        assert (tmp_path / "signals.csv").exists()
        assert (tmp_path / "transforms.csv").exists()

    def test_cdt_command(self, tmp_path):
        """Test transforming a signal file against the uniform reference."""
        signal_path = write_signal(tmp_path / "p.txt", one_bump(self.grid))
        out_path = tmp_path / "maps" / "T.txt"

        assert main(["cdt", "--in", str(signal_path), "--out", str(out_path)]) == EXIT_OK
        assert out_path.read_text().startswith("# tmap1d")
        assert (out_path.parent / MANIFEST_NAME).exists()

    def test_cdt_of_uniform_is_identity(self, tmp_path):
        """Test that the uniform signal maps to the identity."""
        signal_path = write_signal(tmp_path / "u.txt", uniform_signal(self.grid))
        out_path = tmp_path / "T.txt"

        assert main(["cdt", "--in", str(signal_path), "--out", str(out_path)]) == EXIT_OK
        grid, values = parse_map1d(out_path.read_text())
        assert np.max(np.abs(values - grid.nodes)) <= 3 * self.grid.dx

    def test_experiment_outputs_are_deterministic(self, tmp_path):
        """Test that two identical runs write byte-identical CSV files."""
        for run in ("a", "b"):
            assert main(["experiment", "cdt-examples", "--grid-n", "64", "--out", str(tmp_path / run)]) == EXIT_OK

        for name in ("signals.csv", "transforms.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_separability_outputs_are_deterministic(self, tmp_path):
        """Test that two one-two-bump runs from the same definition write identical files."""
        sampler = {"kind": "translations", "count": 20, "bounds": {"mu": [-0.2, 0.2]}}
        definition = {
            "experiment": "one-two-bump",
            "seed": 11,
            "grid": {"xmin": 0.0, "xmax": 1.0, "n": 256},
            "classes": [
                {"label": "one_bump", "template": "one_bump", "sampler": sampler},
                {"label": "two_bump", "template": "two_bump", "sampler": sampler},
            ],
            "trials": 50,
            "require_separation": False,
        }
        config_path = tmp_path / "small.json"
        config_path.write_text(json.dumps(definition))

        for run in ("a", "b"):
            args = ["experiment", "one-two-bump", "--config", str(config_path), "--out", str(tmp_path / run)]
            assert main(args) == EXIT_OK

        for name in ("projections.csv", "summary.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_cdt_bad_reference(self, tmp_path):
        """Test that a reference with an interior gap exits with code 3."""
        signal_path = write_signal(tmp_path / "p.txt", one_bump(self.grid))
        ref_path = write_signal(tmp_path / "r.txt", two_bump(self.grid))

        assert main(["cdt", "--in", str(signal_path), "--ref", str(ref_path)]) == EXIT_BAD_REFERENCE

    def test_cdt_malformed_signal(self, tmp_path):
        """Test that a malformed signal file is a usage error."""
        bad = tmp_path / "bad.txt"
        bad.write_text("not a signal\n")

        assert main(["cdt", "--in", str(bad)]) == EXIT_USAGE

    def test_verify_hr_group(self, tmp_path):
        """Test running the Hr group suite."""
        assert main(["verify", "hr-group", "--out", str(tmp_path)]) == EXIT_OK
        assert (tmp_path / "hr-group.csv").read_text().startswith("check,gap,tolerance,passed")


if __name__ == "__main__":
    pytest.main([__file__])
