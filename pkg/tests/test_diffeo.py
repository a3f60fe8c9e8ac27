"""
Tests for 1D and planar diffeomorphisms, profiles and their JSON descriptors.
"""

import numpy as np
import pytest

from diffeo.diffeo1d import (
    Affine,
    PolynomialMonotone,
    SampledMonotone,
    compose,
    convex_combo_of_inverses,
    evaluate,
    identity,
    sup_distance,
    translation,
)
from diffeo.diffeo2d import (
    Ha,
    Hr,
    Hs,
    LinearGradient,
    eval2,
    hr_compose,
    hr_inverse,
    hs_compose,
    hs_convex_combination,
    hs_membership,
    is_curl_free,
    max_curl,
    potential_value,
    quadratic_bend,
)
from diffeo.profiles import AffinePlus, QuadraticMonotone
from diffeo.serialization import diffeo_from_dict, dumps, loads
from signal_core.errors import (
    DomainMismatch,
    NotInvertible,
    OutOfDomain,
    OutOfRange,
    PreconditionError,
    SignalFormatError,
)


class TestDiffeo1D:
    """Test increasing 1D diffeomorphisms."""

    def setup_method(self):
        """Set up test fixtures."""
        self.bend = PolynomialMonotone([0.0, 1.0, 0.2], (0.0, 1.0))
        self.nodes = np.linspace(0.0, 1.0, 11)

    def test_affine_evaluation_and_inverse(self):
        """Test h(x) = alpha x - mu and its exact inverse."""
        h = Affine(2.0, 1.0)

        assert float(h(3.0)) == pytest.approx(5.0)
        assert float(h.inverse()(5.0)) == pytest.approx(3.0)
        assert float(h.derivative(0.7)) == pytest.approx(2.0)

    def test_affine_needs_positive_slope(self):
        """Test that a non-increasing affine map is rejected."""
        with pytest.raises(NotInvertible, match="positive"):
            Affine(0.0, 1.0)

    def test_translation_shifts_right(self):
        """Test that translation(mu) maps x to x - mu."""
        assert float(translation(0.25)(1.0)) == pytest.approx(0.75)

    def test_compose_affine_pair(self):
        """Test that composing affine maps stays affine."""
        h = compose(Affine(2.0, 1.0), Affine(1.0, 0.5))

        assert isinstance(h, Affine)
        assert float(h(3.0)) == pytest.approx(4.0)

    def test_identity_is_neutral(self):
        """Test that composing with the identity returns the other map."""
        assert compose(identity(), self.bend) is self.bend
        assert compose(self.bend, identity()) is self.bend

    def test_polynomial_needs_bounded_domain(self):
        """Test that polynomial maps require a bounded domain."""
        with pytest.raises(DomainMismatch, match="bounded domain"):
            PolynomialMonotone([0.0, 1.0], (-np.inf, np.inf))

    def test_polynomial_must_increase(self):
        """Test that a decreasing polynomial is rejected."""
        with pytest.raises(NotInvertible, match="not increasing"):
            PolynomialMonotone([1.0, -1.0], (0.0, 1.0))

    def test_evaluation_outside_domain(self):
        """Test that evaluating off the validity interval raises."""
        with pytest.raises(OutOfDomain):
            evaluate(self.bend, 1.5)

    def test_polynomial_inverse(self):
        """Test the tabulated inverse of a polynomial map."""
        inverse = self.bend.inverse()

        assert inverse.domain == pytest.approx((0.0, 1.2))
        assert np.allclose(inverse(self.bend(self.nodes)), self.nodes, atol=1e-6)

    def test_compose_polynomials_is_exact(self):
        """Test that polynomial compositions stay polynomial."""
        h = compose(self.bend, Affine(1.0, 0.0, (0.0, 1.0)))

        assert isinstance(h, PolynomialMonotone)
        assert np.allclose(h(self.nodes), self.bend(self.nodes))

    def test_sampled_table_must_increase(self):
        """Test that a non-monotone table is rejected."""
        with pytest.raises(NotInvertible, match="strictly increasing"):
            SampledMonotone([0.0, 0.5, 1.0], [0.0, 0.6, 0.4])

    def test_convex_combination_of_translations(self):
        """Test that opposite translations average to the identity."""
        g = convex_combo_of_inverses(translation(0.1), translation(-0.1), 0.5)

        assert isinstance(g, Affine)
        assert np.allclose(g(self.nodes), self.nodes)

    def test_convex_combination_inverse(self):
        """Test that g^-1 is the weighted mix of the inverses."""
        straight = Affine(1.0, 0.0, (0.0, 1.0))
        g = convex_combo_of_inverses(self.bend, straight, 0.3)
        y = np.linspace(0.05, 0.95, 7)
        expected = 0.3 * self.bend.inverse()(y) + 0.7 * straight.inverse()(y)

        assert np.allclose(g.inverse()(y), expected, atol=1e-6)

    def test_convex_weight_out_of_range(self):
        """Test that weights outside [0, 1] are rejected."""
        with pytest.raises(OutOfRange, match="Convex weight"):
            convex_combo_of_inverses(translation(0.1), translation(0.2), 1.5)

    def test_sup_distance_on_nodes(self):
        """Test the sup distance between two translations."""
        assert sup_distance(translation(0.0), translation(0.1), nodes=self.nodes) == pytest.approx(0.1)

    def test_sampled_derivative(self):
        """Test the slope of a tabulated x^2 on [1, 2]."""
        x = np.linspace(1.0, 2.0, 4096)
        h = SampledMonotone(x, x ** 2)

        assert float(h.derivative(1.5)) == pytest.approx(3.0, abs=1e-4)

    def test_compose_with_inverse_for_every_variant(self):
        """Test that h o h^-1 is the identity for affine, polynomial and tabulated maps."""
        x = np.linspace(1.0, 2.0, 4096)
        cases = [
            (Affine(2.0, 1.0), np.linspace(-3.0, 3.0, 101)),
            (self.bend, np.linspace(0.0, 1.2, 101)),
            (SampledMonotone(x, x ** 2), np.linspace(1.0, 4.0, 101)),
        ]
        for h, y in cases:
            assert np.allclose(compose(h, h.inverse())(y), y, rtol=0.0, atol=1e-8)

    def test_inverse_derivative(self):
        """Test that (h^-1)'(h(x)) h'(x) = 1."""
        x = np.linspace(1.0, 2.0, 4096)
        cases = [
            (Affine(2.0, 1.0), np.linspace(-1.0, 1.0, 21)),
            (self.bend, np.linspace(0.05, 0.95, 19)),
            (SampledMonotone(x, x ** 2), np.linspace(1.05, 1.95, 19)),
        ]
        for h, points in cases:
            product = h.inverse().derivative(h(points)) * h.derivative(points)
            assert np.allclose(product, 1.0, rtol=0.0, atol=1e-6)


class TestDiffeo2D:
    """Test the Ha, Hs and Hr families."""

    def setup_method(self):
        """Set up test fixtures."""
        self.bend = quadratic_bend()
        self.x = np.array([0.3, -1.0, 1.5, 0.0])
        self.y = np.array([-0.2, 0.4, 1.0, 0.0])

    def test_bend_value_and_jacobian(self):
        """Test the quadratic bend at (1, 1)."""
        hx, hy = eval2(self.bend, 1.0, 1.0)
        jac = self.bend.jacobian(1.0, 1.0)

        assert float(hx) == pytest.approx(1.2)
        assert float(hy) == pytest.approx(1.2)
        assert np.allclose(jac, [[1.2, 0.2], [0.2, 1.2]])
        assert float(self.bend.jacobian_det(1.0, 1.0)) == pytest.approx(1.4)

    def test_bend_inverse(self):
        """Test that the Hr inverse undoes the bend."""
        inverse = hr_inverse(self.bend)
        u, v = self.bend(self.x, self.y)
        x, y = inverse(u, v)

        assert np.allclose(x, self.x, atol=1e-10)
        assert np.allclose(y, self.y, atol=1e-10)

    def test_compose_with_inverse_is_identity(self):
        """Test that h o h^-1 is the identity in Hr form."""
        composed = hr_compose(self.bend, hr_inverse(self.bend))
        x, y = composed(self.x, self.y)

        assert isinstance(composed, Hr)
        assert np.allclose(x, self.x, atol=1e-9)
        assert np.allclose(y, self.y, atol=1e-9)

    def test_bend_is_curl_free(self):
        """Test that Hr maps are gradient fields."""
        assert max_curl(self.bend, (-2.0, 2.0, -2.0, 2.0), n=32) < 1e-4

    def test_potential_gradient_is_the_map(self):
        """Test that central differences of the potential reproduce h."""
        x, y, eps = 0.4, -0.3, 1e-5
        dphi_dx = (potential_value(self.bend, x + eps, y) - potential_value(self.bend, x - eps, y)) / (2 * eps)
        dphi_dy = (potential_value(self.bend, x, y + eps) - potential_value(self.bend, x, y - eps)) / (2 * eps)
        hx, hy = eval2(self.bend, x, y)

        assert float(dphi_dx) == pytest.approx(float(hx), abs=1e-6)
        assert float(dphi_dy) == pytest.approx(float(hy), abs=1e-6)

    def test_rotation_field_has_curl(self):
        """Test that a rotation field is not curl free."""
        def rotation(x, y):
            return -np.asarray(y), np.asarray(x)

        assert not is_curl_free(rotation, (-1.0, 1.0, -1.0, 1.0), n=16)

    def test_quadratic_profile_needs_nonnegative_curvature(self):
        """Test that a concave quadratic profile is rejected."""
        with pytest.raises(NotInvertible, match="a >= 0"):
            QuadraticMonotone(-0.1, 1.0)

    def test_ha_needs_positive_scale(self):
        """Test that Ha rejects non-positive scales."""
        with pytest.raises(NotInvertible):
            Ha(0.0)

    def test_ha_embeds_in_hs(self):
        """Test that Ha maps agree with their Hs form."""
        h = Ha(2.0, (1.0, -0.5))
        hs = h.to_hs()
        hx, hy = h(self.x, self.y)
        sx, sy = hs(self.x, self.y)

        assert np.allclose(hs.matrix, 2.0 * np.eye(2))
        assert np.allclose(hx, sx) and np.allclose(hy, sy)

    def test_hs_matches_its_hr_form(self):
        """Test that Hs maps agree with their Hr profiles."""
        h = Hs(1.5, 0.5, 0.2, -0.4)
        hx, hy = h(self.x, self.y)
        rx, ry = h.to_hr()(self.x, self.y)

        assert np.allclose(hx, rx) and np.allclose(hy, ry)

    def test_hs_membership(self):
        """Test recognition of the Hs matrix form."""
        assert hs_membership([[2.0, 1.0], [1.0, 2.0]])
        assert not hs_membership([[2.0, 1.0], [1.0, 3.0]])
        assert not hs_membership([[1.0, 2.0], [2.0, 1.0]])

    def test_hs_from_matrix(self):
        """Test recovering Hs parameters from a matrix."""
        h = Hs.from_matrix([[3.0, 1.0], [1.0, 3.0]], (0.0, 0.0))

        assert (h.a1, h.a2) == pytest.approx((2.0, 1.0))
        with pytest.raises(PreconditionError, match="not in Hs"):
            Hs.from_matrix([[2.0, 1.0], [1.0, 3.0]], (0.0, 0.0))

    def test_hs_closed_under_composition(self):
        """Test that Hs compositions multiply the matrices."""
        h1, h2 = Hs(1.0, 0.5), Hs(0.75, 2.0)

        assert np.allclose(hs_compose(h1, h2).matrix, h1.matrix @ h2.matrix)

    def test_hs_convex_combination(self):
        """Test that convex combinations of Hs maps stay in Hs."""
        h = hs_convex_combination(Hs(1.0, 0.5), Hs(0.75, 2.0), 0.25)

        assert hs_membership(h.matrix)
        assert h.a1 == pytest.approx(0.8125)

    def test_linear_gradient_needs_symmetric_matrix(self):
        """Test that non-symmetric matrices are rejected."""
        with pytest.raises(PreconditionError, match="symmetric"):
            LinearGradient([[1.0, 2.0], [3.0, 4.0]])

    def test_ha_hs_hr_embedding(self):
        """Test that Ha -> Hs -> Hr conversions evaluate identically."""
        h = Ha(2.0, (1.0, -0.5))
        hs = h.to_hs()
        forms = [hs, hs.to_hr(), h.to_hr()]
        hx, hy = eval2(h, self.x, self.y)

        for form in forms:
            fx, fy = eval2(form, self.x, self.y)
            assert np.allclose(fx, hx, rtol=0.0, atol=1e-10)
            assert np.allclose(fy, hy, rtol=0.0, atol=1e-10)

    def test_potential_vanishes_at_origin(self):
        """Test the normalization phi(0, 0) = 0 of Hr potentials."""
        for h in (self.bend, Hs(1.5, 0.5, 0.2, -0.4).to_hr(), Ha(2.0, (1.0, -0.5)).to_hr()):
            assert float(potential_value(h, 0.0, 0.0)) == pytest.approx(0.0, abs=1e-15)


class TestSerialization:
    """Test JSON descriptors of diffeomorphisms."""

    def test_affine_descriptor(self):
        """Test rebuilding an affine map with its domain."""
        h = loads(dumps(Affine(2.0, 1.0, (0.0, 1.0))))

        assert isinstance(h, Affine)
        assert (h.alpha, h.mu) == (2.0, 1.0)
        assert h.domain == (0.0, 1.0)

    def test_hr_descriptor(self):
        """Test rebuilding the quadratic bend."""
        h = loads(dumps(quadratic_bend()))
        hx, hy = h(1.0, 1.0)

        assert isinstance(h, Hr)
        assert isinstance(h.g_prime, AffinePlus)
        assert float(hx) == pytest.approx(1.2)
        assert float(hy) == pytest.approx(1.2)

    def test_unknown_variant(self):
        """Test that unknown variants are rejected."""
        with pytest.raises(SignalFormatError, match="Unknown diffeomorphism"):
            diffeo_from_dict({"variant": "spline", "params": {}})

    def test_missing_parameter(self):
        """Test that incomplete descriptors are rejected."""
        with pytest.raises(SignalFormatError, match="Missing parameter"):
            diffeo_from_dict({"variant": "affine", "params": {"alpha": 1.0}})


if __name__ == "__main__":
    pytest.main([__file__])
