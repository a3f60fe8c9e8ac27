"""
Tests for subgroup membership, subgroup sampling and the polynomial sampler.
"""

import numpy as np
import pytest

from diffeo.diffeo1d import Affine, PolynomialMonotone, convex_combo_of_inverses, identity, translation
from diffeo.groups import GroupKind, GroupSpec1D, group_membership
from diffeo.sampler import SupportConstraint, default_boxes, sample_polynomial_diffeos
from signal_core.errors import ConfigError


class TestGroupMembership:
    """Test membership checks for the supported subgroups."""

    def test_translations(self):
        """Test membership in the translation group."""
        spec = GroupSpec1D(kind=GroupKind.TRANSLATIONS)

        assert spec.contains(translation(0.2))
        assert not spec.contains(Affine(2.0, 0.1))

    def test_increasing_affine(self):
        """Test membership in the increasing affine group."""
        spec = GroupSpec1D(kind=GroupKind.INCREASING_AFFINE)

        assert spec.contains(Affine(2.0, 0.1))
        assert not spec.contains(PolynomialMonotone([0.0, 1.0, 0.3], (0.0, 1.0)))

    def test_isotropic_scaling(self):
        """Test that scalings must fix the origin."""
        spec = GroupSpec1D(kind=GroupKind.ISOTROPIC_SCALING)

        assert spec.contains(Affine(2.0, 0.0))
        assert not spec.contains(Affine(2.0, 0.1))

    def test_integer_translations(self):
        """Test that only whole shifts belong to the integer group."""
        spec = GroupSpec1D(kind=GroupKind.INTEGER_TRANSLATIONS)

        assert spec.contains(translation(2.0))
        assert not spec.contains(translation(1.5))
        assert not spec.is_convex

    def test_fixed_interval(self):
        """Test that members must fix every point of the interval."""
        spec = GroupSpec1D(kind=GroupKind.FIXED_INTERVAL, interval=(0.4, 0.6))

        assert spec.contains(identity())
        assert not spec.contains(translation(0.1))

    def test_intersection(self):
        """Test that translations and scalings only share the identity."""
        spec = GroupSpec1D.intersection(
            GroupSpec1D(kind=GroupKind.TRANSLATIONS),
            GroupSpec1D(kind=GroupKind.ISOTROPIC_SCALING),
        )

        assert spec.is_convex
        assert spec.contains(identity())
        assert not spec.contains(translation(0.1))
        assert not spec.contains(Affine(2.0, 0.0))

    def test_fixed_points_require_points(self):
        """Test that a fixed-point group needs at least one point."""
        with pytest.raises(ConfigError, match="at least one fixed point"):
            GroupSpec1D(kind=GroupKind.FIXED_POINTS)

    def test_fixed_interval_requires_interval(self):
        """Test that a fixed-interval group needs lo < hi."""
        with pytest.raises(ConfigError, match="lo < hi"):
            GroupSpec1D(kind=GroupKind.FIXED_INTERVAL, interval=(0.6, 0.4))

    def test_fixed_point_cubic(self):
        """Test that 0.5 + (x - 0.5) + 0.2 (x - 0.5)^3 fixes 0.5 but not 0.3."""
        h = PolynomialMonotone([-0.025, 1.15, -0.3, 0.2], (0.0, 1.0))

        assert float(h(0.5)) == pytest.approx(0.5, abs=1e-12)
        assert GroupSpec1D(kind=GroupKind.FIXED_POINTS, fixed_points=(0.5,)).contains(h)
        assert not GroupSpec1D(kind=GroupKind.FIXED_POINTS, fixed_points=(0.3,)).contains(h)

    def test_explicit_tolerance(self):
        """Test that a given tolerance replaces the group's own, also inside intersections."""
        h = PolynomialMonotone([-0.025, 1.15, -0.3, 0.2], (0.0, 1.0))
        near = GroupSpec1D(kind=GroupKind.FIXED_POINTS, fixed_points=(0.3,))
        both = GroupSpec1D.intersection(near, GroupSpec1D(kind=GroupKind.FIXED_POINTS, fixed_points=(0.5,)))

        # h(0.3) = 0.3 - 0.0016
        assert near.contains(h, tol=1e-2)
        assert not near.contains(h, tol=1e-3)
        assert group_membership(both, h, 1e-2)
        assert not group_membership(both, h)


class TestGroupSampling:
    """Test seeded sampling of subgroup members."""

    def test_translation_samples_stay_in_bounds(self):
        """Test that sampled shifts respect their bounds."""
        spec = GroupSpec1D(kind=GroupKind.TRANSLATIONS, bounds={"mu": (-0.1, 0.2)})
        members = spec.sample(50, seed=1)

        assert len(members) == 50
        assert all(spec.contains(h) for h in members)
        assert all(-0.1 <= h.mu <= 0.2 for h in members)

    def test_sampling_is_deterministic(self):
        """Test that the same seed gives the same members."""
        spec = GroupSpec1D(kind=GroupKind.INCREASING_AFFINE)
        first = [(h.alpha, h.mu) for h in spec.sample(10, seed=4)]
        second = [(h.alpha, h.mu) for h in spec.sample(10, seed=4)]

        assert first == second

    def test_fixed_point_members(self):
        """Test that sampled members fix the requested points."""
        spec = GroupSpec1D(kind=GroupKind.FIXED_POINTS, fixed_points=(0.3, 0.7))
        members = spec.sample(10, seed=2)
        points = np.array([0.3, 0.7])

        for h in members:
            assert np.allclose(h(points), points, atol=1e-10)
            assert spec.contains(h)

    def test_integer_translation_samples(self):
        """Test that integer shifts are whole numbers."""
        spec = GroupSpec1D(kind=GroupKind.INTEGER_TRANSLATIONS)
        members = spec.sample(20, seed=0)

        assert all(float(h.mu).is_integer() for h in members)
        assert all(-2.0 <= h.mu <= 2.0 for h in members)


class TestConvexClosure:
    """Test that mixing inverses of two members stays in the group."""

    def setup_method(self):
        """Set up test fixtures."""
        self.alphas = (0.25, 0.5, 0.75)

    def test_isotropic_scaling(self):
        """Test convex combinations of two scalings."""
        spec = GroupSpec1D(kind=GroupKind.ISOTROPIC_SCALING)
        h1, h2 = Affine(2.0, 0.0), Affine(0.5, 0.0)

        for alpha in self.alphas:
            g = convex_combo_of_inverses(h1, h2, alpha)
            assert spec.contains(g)
            assert spec.contains(g.inverse())

    def test_fixed_interval(self):
        """Test convex combinations of two members fixing [0.4, 0.6]."""
        spec = GroupSpec1D(kind=GroupKind.FIXED_INTERVAL, interval=(0.4, 0.6))
        h1, h2 = spec.sample(2, seed=3)

        for alpha in self.alphas:
            g = convex_combo_of_inverses(h1, h2, alpha)
            assert spec.contains(g)
            assert spec.contains(g.inverse())


class TestPolynomialSampler:
    """Test the rejection sampler for increasing polynomials."""

    def setup_method(self):
        """Set up test fixtures."""
        self.constraint = SupportConstraint(support=(0.35, 0.65))

    def test_default_boxes_centre_on_identity(self):
        """Test that the default boxes contain the identity coefficients."""
        boxes = default_boxes(5)

        assert len(boxes) == 6
        assert boxes[0][0] < 0.0 < boxes[0][1]
        assert boxes[1][0] < 1.0 < boxes[1][1]

    def test_samples_are_increasing_and_cover_support(self):
        """Test the monotonicity and coverage of accepted polynomials."""
        members = sample_polynomial_diffeos(5, 20, 3, self.constraint)
        scan = np.linspace(0.0, 1.0, 501)

        assert len(members) == 20
        for h in members:
            assert h.degree <= 5
            assert np.all(h.derivative(scan) > 0)
            assert float(h(0.0)) <= 0.35 - 0.01
            assert float(h(1.0)) >= 0.65 + 0.01

    def test_samples_are_deterministic(self):
        """Test that a fixed seed reproduces the coefficients."""
        first = sample_polynomial_diffeos(5, 5, 9, self.constraint)
        second = sample_polynomial_diffeos(5, 5, 9, self.constraint)

        for a, b in zip(first, second):
            assert np.array_equal(a.coefficients, b.coefficients)

    def test_degree_must_be_positive(self):
        """Test that degree 0 is rejected."""
        with pytest.raises(ConfigError, match="at least 1"):
            sample_polynomial_diffeos(0, 5, 0, self.constraint)

    def test_box_count_must_match_degree(self):
        """Test that one box per coefficient is required."""
        with pytest.raises(ConfigError, match="Expected 3 coefficient boxes"):
            sample_polynomial_diffeos(2, 5, 0, self.constraint, boxes=[(0.0, 0.1), (0.9, 1.1)])


if __name__ == "__main__":
    pytest.main([__file__])
