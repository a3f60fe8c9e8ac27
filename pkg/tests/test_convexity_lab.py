"""
Tests for signal classes, convexity witnesses, partitions and LDA.
"""

import gc

import numpy as np
import pytest

from convexity_lab.classes import generate_class, make_template, one_bump, transform_class, two_bump
from convexity_lab.config import ClassConfig, ExperimentConfig, GridConfig, SamplerConfig
from convexity_lab.lda import lda_fit
from convexity_lab.separability import separability_experiment
from convexity_lab.witness import (
    convexity_witness,
    hull_margin,
    integer_translation_control,
    l1_gap,
    partition_check,
    partition_symmetry_gap,
)
from diffeo.diffeo1d import translation
from diffeo.diffeo2d import Ha
from diffeo.groups import GroupKind, GroupSpec1D
from signal_core.density import normalize, uniform_signal
from signal_core.errors import ConfigError, DimensionMismatch, PreconditionError
from signal_core.grid import Grid1D
from transforms.cdt import cdt_forward
from transforms.lot2d import default_demo_reference


class TestSignalClasses:
    """Test templates and generated classes."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = Grid1D(0.0, 1.0, 256)

    def test_generate_translated_class(self):
        """Test that every roster entry produces one member."""
        roster = [translation(mu) for mu in (-0.1, 0.0, 0.1)]
        c = generate_class(one_bump(self.grid), roster, label="shifted")

        assert len(c) == 3
        assert c.label == "shifted"
        assert all(m.grid == self.grid for m in c.members)

    def test_transforms_are_cached(self):
        """Test that class transforms are computed once per reference."""
        c = generate_class(one_bump(self.grid), [translation(0.05)])
        r = uniform_signal(self.grid)

        assert transform_class(c, r) is transform_class(c, r)
        assert transform_class(c, uniform_signal(self.grid)) is transform_class(c, r)

    def test_successive_references_get_their_own_transforms(self):
        """Test that a new reference never reuses maps computed for a discarded one."""
        c = generate_class(one_bump(self.grid), [translation(-0.05), translation(0.05)])
        x = self.grid.nodes

        for i in range(10):
            r = normalize(1.0 + i * x**2, self.grid)
            maps = transform_class(c, r)
            for member, T in zip(c.members, maps):
                assert np.array_equal(T.values, cdt_forward(member, r).values)
            del r, maps
            gc.collect()

    def test_unknown_template(self):
        """Test that unknown template names are rejected."""
        with pytest.raises(ConfigError, match="Unknown template"):
            make_template("three_bump", self.grid)

    def test_image_classes_have_no_cdt(self):
        """Test that 2D classes are refused by the 1D transform."""
        c = generate_class(default_demo_reference(8), [Ha(1.0)])
        with pytest.raises(PreconditionError, match="1D classes"):
            transform_class(c, uniform_signal(self.grid))

    def test_l1_gap_needs_same_grid(self):
        """Test that signals on different grids cannot be compared."""
        with pytest.raises(PreconditionError, match="different grids"):
            l1_gap(one_bump(self.grid), one_bump(Grid1D(0.0, 1.0, 128)))


class TestConvexityWitness:
    """Test the two-path convexity witness and the negative control."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = Grid1D(0.0, 1.0, 1024)
        self.r = uniform_signal(self.grid)

    def test_translations_are_convex(self):
        """Test that combinations of translated bumps stay in the class."""
        spec = GroupSpec1D(kind=GroupKind.TRANSLATIONS, bounds={"mu": (-0.2, 0.2)})
        c = generate_class(one_bump(self.grid), spec.sample(10, seed=0), group_spec=spec)
        report = convexity_witness(c, self.r, trials=10, seed=1)

        assert len(report.trials) == 10
        assert report.group_closed
        assert report.max_map_gap <= 3 * self.grid.dx
        assert report.passed

    def test_fixed_weights_are_cycled(self):
        """Test that explicit weights are used in turn."""
        c = generate_class(one_bump(self.grid), [translation(-0.1), translation(0.1)])
        report = convexity_witness(c, self.r, trials=4, seed=0, alphas=[0.0, 1.0])

        assert [t.alpha for t in report.trials] == [0.0, 1.0, 0.0, 1.0]
        assert all(t.in_roster for t in report.trials)
        assert all(t.in_group is None for t in report.trials)

    def test_empty_class(self):
        """Test that a class without members has no witness."""
        c = generate_class(one_bump(self.grid), [])
        with pytest.raises(PreconditionError, match="no members"):
            convexity_witness(c, self.r, trials=1)

    def test_integer_translation_control(self):
        """Test that the shift-0/shift-2 midpoint leaves the roster and a quarter leaves the group."""
        report = integer_translation_control(n=1024)

        assert report.midpoint_map_gap <= report.map_tolerance
        assert not report.midpoint_in_roster
        assert report.midpoint_in_group
        assert not report.quarter_in_group
        assert report.escapes_roster
        assert report.escapes_group

    def test_partition_symmetry(self):
        """Test that p is regenerated from p_h through h^-1."""
        assert partition_symmetry_gap(one_bump(self.grid), translation(0.1)) <= 2e-2


class TestPartition:
    """Test convex-hull separation in the transform domain."""

    def test_hull_margin_of_two_points(self):
        """Test the margin between two points one unit apart."""
        assert hull_margin(np.array([[0.0, 0.0]]), np.array([[1.0, 0.0]])) == pytest.approx(0.5)

    def test_hull_margin_of_overlapping_sets(self):
        """Test that overlapping hulls have zero margin."""
        A = np.array([[0.0, 0.0], [1.0, 1.0]])
        B = np.array([[1.0, 0.0], [0.0, 1.0]])

        assert hull_margin(A, B) == pytest.approx(0.0, abs=1e-9)

    def test_identical_classes_are_not_separated(self):
        """Test that a class is not separated from itself."""
        grid = Grid1D(0.0, 1.0, 128)
        c = generate_class(one_bump(grid), [translation(mu) for mu in (-0.1, 0.0, 0.1)])
        report = partition_check(c, c, uniform_signal(grid), draws=20, seed=0)

        assert not report.separated
        assert report.sampled_min_distance >= 0.0


class TestLda:
    """Test the two-class Fisher discriminant."""

    def test_symmetric_classes(self):
        """Test classes mirrored across the second axis."""
        A = np.array([[1.0, 0.0], [1.0, 1.0]])
        B = np.array([[-1.0, 0.0], [-1.0, 1.0]])
        model = lda_fit(A, B)

        assert np.allclose(model.direction, [-1.0, 0.0])
        assert model.threshold == pytest.approx(0.0)
        assert model.accuracy(A, B) == 1.0
        assert not model.degenerate

    def test_single_samples(self):
        """Test that a class with one vector is rejected."""
        with pytest.raises(PreconditionError, match="at least 2 samples"):
            lda_fit([0.0, 0.0], np.array([[3.0, 4.0], [3.0, 5.0]]))
        with pytest.raises(PreconditionError, match="features_b"):
            lda_fit(np.array([[0.0, 0.0], [1.0, 0.0]]), [3.0, 4.0])

    def test_coincident_means(self):
        """Test that identical means give a degenerate model."""
        model = lda_fit(np.array([[1.0, 0.0], [-1.0, 0.0]]), np.array([[0.0, 1.0], [0.0, -1.0]]))

        assert model.degenerate
        assert np.allclose(model.direction, [1.0, 0.0])

    def test_dimension_mismatch(self):
        """Test that feature dimensions must agree."""
        with pytest.raises(DimensionMismatch, match="differ"):
            lda_fit(np.ones((3, 2)), np.ones((3, 4)))

    def test_empty_class(self):
        """Test that empty inputs are rejected."""
        with pytest.raises(DimensionMismatch, match="non-empty"):
            lda_fit([], np.ones((3, 2)))


class TestSeparability:
    """Test the two-class separability experiment."""

    def setup_method(self):
        """Set up test fixtures."""
        sampler = SamplerConfig(kind="translations", count=15, bounds={"mu": (-0.2, 0.2)})
        self.config = ExperimentConfig(
            experiment="one-two-bump",
            seed=3,
            grid=GridConfig(n=256),
            classes=[ClassConfig("one_bump", "one_bump", sampler), ClassConfig("two_bump", "two_bump", sampler)],
            trials=50,
        )

    def test_transforms_separate_translated_bumps(self):
        """Test that one- and two-bump classes separate in the transform domain."""
        report = separability_experiment(self.config)

        assert report.labels == ("one_bump", "two_bump")
        assert len(report.rows) == 30
        assert report.transform_accuracy == 1.0
        assert report.partition.separated
        assert report.passed
        assert set(report.summary()) == {
            "experiment", "raw_accuracy", "transform_accuracy", "margin", "sampled_min_distance"
        }

    def test_needs_two_classes(self):
        """Test that a single class is rejected."""
        config = ExperimentConfig(experiment="one-two-bump", classes=self.config.classes[:1])
        with pytest.raises(ConfigError, match="exactly two classes"):
            separability_experiment(config)

    def test_unknown_sampler(self):
        """Test that unknown sampler kinds are rejected."""
        bad = SamplerConfig(kind="rotations", count=3)
        config = ExperimentConfig(
            experiment="one-two-bump",
            grid=GridConfig(n=128),
            classes=[ClassConfig("a", "one_bump", bad), ClassConfig("b", "two_bump", bad)],
        )
        with pytest.raises(ConfigError, match="Unknown sampler kind"):
            separability_experiment(config)


if __name__ == "__main__":
    pytest.main([__file__])
