"""
Tests for the CDT, the closed-form P_r transform and the Radon-CDT.
"""

import numpy as np
import pytest
from scipy.integrate import trapezoid

from convexity_lab.classes import gaussian_bump, one_bump, two_bump
from diffeo.diffeo1d import translation
from diffeo.diffeo2d import Ha, quadratic_bend
from signal_core.density import image_mass, normalize, normalize_image, uniform_signal
from signal_core.errors import BadReference, DegenerateMap, GridError, MassLoss, PreconditionError, SupportEscape
from signal_core.grid import Grid1D, Grid2D
from transforms.cdt import (
    DEPOSIT_LINEAR,
    apply_diffeo_1d,
    cdt_forward,
    cdt_inverse,
    composition_push,
    translate,
    w2_distance,
)
from transforms.lot2d import (
    apply_diffeo_2d,
    composition_violation_demo,
    default_demo_reference,
    generate_pr_member,
    lot_compose_pr,
    lot_distance,
    lot_forward_pr,
)
from transforms.maps import TransportMap1D, TransportMap2D
from transforms.radon_cdt import default_angles, radon, rcdt


class TestCdt:
    """Test the forward and inverse cumulative distribution transform."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = Grid1D(0.0, 1.0, 512)
        self.r = uniform_signal(self.grid)

    def test_transform_of_box(self):
        """Test that a box on [0.2, 0.6] transforms to x -> 0.2 + 0.4 x."""
        p = uniform_signal(self.grid, 0.2, 0.6)
        T = cdt_forward(p, self.r)
        x = T.grid.nodes

        assert T.grid == self.grid
        assert np.max(np.abs(T.values - (0.2 + 0.4 * x))) <= 3 * self.grid.dx

    def test_translation_adds_constant(self):
        """Test that translating a signal shifts its transform."""
        p = one_bump(self.grid)
        T = cdt_forward(p, self.r)
        T_shifted = cdt_forward(translate(p, 0.1), self.r)

        assert T_shifted.sup_distance(T) == pytest.approx(0.1, abs=3 * self.grid.dx)
        assert np.max(np.abs(T_shifted.values - T.values - 0.1)) <= 3 * self.grid.dx

    def test_composition_push_matches_direct_transform(self):
        """Test that the transform of p_h equals h^-1 o T_p."""
        p = one_bump(self.grid)
        h = translation(-0.15)
        predicted = composition_push(h, cdt_forward(p, self.r))
        direct = cdt_forward(apply_diffeo_1d(p, h), self.r)

        assert direct.sup_distance(predicted) <= 3 * self.grid.dx

    def test_roundtrip_recovers_signal(self):
        """Test that the inverse transform recovers a smooth signal."""
        p = gaussian_bump(self.grid)
        recovered = cdt_inverse(cdt_forward(p, self.r), self.r)

        assert trapezoid(np.abs(recovered.values - p.values), dx=self.grid.dx) <= 1e-2

    def test_linear_deposit_roundtrip(self):
        """Test the inverse transform with the linear deposit."""
        p = gaussian_bump(self.grid)
        recovered = cdt_inverse(cdt_forward(p, self.r), self.r, deposit=DEPOSIT_LINEAR)

        assert trapezoid(np.abs(recovered.values - p.values), dx=self.grid.dx) <= 0.1

    def test_reference_with_interior_zero(self):
        """Test that a reference vanishing inside its support is rejected."""
        with pytest.raises(BadReference, match="strictly positive"):
            cdt_forward(one_bump(self.grid), two_bump(self.grid))

    def test_constant_map_is_degenerate(self):
        """Test that a constant map cannot be inverted."""
        T = TransportMap1D(self.grid, np.full(self.grid.n, 0.5))
        with pytest.raises(DegenerateMap):
            cdt_inverse(T, self.r)

    def test_map_must_be_nondecreasing(self):
        """Test that decreasing maps are rejected."""
        with pytest.raises(GridError, match="nondecreasing"):
            TransportMap1D(self.grid, self.grid.nodes[::-1])

    def test_w2_between_boxes(self):
        """Test W2 between the unit box and the half box."""
        grid = Grid1D(0.0, 1.0, 2001)
        r = uniform_signal(grid)
        distance = w2_distance(r, uniform_signal(grid, 0.0, 0.5), r)

        assert distance == pytest.approx(1.0 / (2.0 * np.sqrt(3.0)), abs=1e-3)

    def test_inverse_of_identity(self):
        """Test that the identity map reproduces the reference."""
        grid = Grid1D(0.0, 1.0, 1024)
        r = uniform_signal(grid)
        recovered = cdt_inverse(TransportMap1D(grid, grid.nodes), r)

        assert trapezoid(np.abs(recovered.values - r.values), dx=grid.dx) < 1e-3

    def test_inverse_of_shift(self):
        """Test that x -> x + 0.25 moves the unit box to [0.25, 1.25]."""
        grid = Grid1D(0.0, 1.0, 1025)
        out = Grid1D(0.0, 1.5, 1537)
        recovered = cdt_inverse(TransportMap1D(grid, grid.nodes + 0.25), uniform_signal(grid), out_grid=out)
        expected = uniform_signal(out, 0.25, 1.25)

        assert trapezoid(np.abs(recovered.values - expected.values), dx=out.dx) <= 1e-2

    def test_inverse_of_halving(self):
        """Test that x -> x / 2 concentrates the unit box on [0, 0.5] with height 2."""
        grid = Grid1D(0.0, 1.0, 1024)
        recovered = cdt_inverse(TransportMap1D(grid, grid.nodes / 2.0), uniform_signal(grid))
        expected = uniform_signal(grid, 0.0, 0.5)

        assert np.max(expected.values) == pytest.approx(2.0, rel=1e-2)
        assert trapezoid(np.abs(recovered.values - expected.values), dx=grid.dx) <= 1e-2

    def test_w2_is_a_pseudometric(self):
        """Test symmetry and the triangle inequality of the transform-domain W2."""
        x = self.grid.nodes
        p = gaussian_bump(self.grid)
        q = normalize(1.0 + 2.0 * x, self.grid)
        s = uniform_signal(self.grid, 0.3, 0.9)

        assert w2_distance(p, q, self.r) == w2_distance(q, p, self.r)
        assert w2_distance(p, p, self.r) == 0.0
        assert w2_distance(p, s, self.r) <= w2_distance(p, q, self.r) + w2_distance(q, s, self.r) + 1e-8
        assert w2_distance(q, s, self.r) <= w2_distance(q, p, self.r) + w2_distance(p, s, self.r) + 1e-8


class TestPrTransform:
    """Test P_r members and their closed-form transforms."""

    def setup_method(self):
        """Set up test fixtures."""
        self.r = default_demo_reference(64)
        self.member_grid = Grid2D.square(-1.0, 1.0, 128)

    def test_mass_leaving_the_grid(self):
        """Test that shifting an image off its grid is rejected."""
        with pytest.raises(MassLoss):
            apply_diffeo_2d(self.r, Ha(1.0, (-2.0, 0.0)))

    def test_member_certificate(self):
        """Test generating a member of P_r from the quadratic bend."""
        m = generate_pr_member(self.r, quadratic_bend(), self.member_grid)
        T = lot_forward_pr(m)
        X, Y = self.r.grid.mesh()
        hx, hy = quadratic_bend()(X, Y)

        assert m.residual <= 5e-2
        assert T.curl_free
        assert np.allclose(T.values[..., 0], hx)
        assert np.allclose(T.values[..., 1], hy)

    def test_compose_with_identity(self):
        """Test that composing with the identity keeps the transform."""
        m = generate_pr_member(self.r, quadratic_bend(), self.member_grid)

        assert np.allclose(lot_compose_pr(m, Ha(1.0)).values, lot_forward_pr(m).values, atol=1e-12)

    def test_lot_distance_of_shift(self):
        """Test that a constant shift of 0.1 has LOT distance 0.1."""
        X, Y = self.r.grid.mesh()
        base = TransportMap2D(self.r.grid, np.stack([X, Y], axis=-1))
        moved = TransportMap2D(self.r.grid, np.stack([X + 0.1, Y], axis=-1))

        assert lot_distance(base, base, self.r) == 0.0
        assert lot_distance(base, moved, self.r) == pytest.approx(0.1)

    def test_composition_fails_outside_ha(self):
        """Test that diag(2, 1) breaks the composition property while the Ha control holds."""
        report = composition_violation_demo()
        data = report.to_dict()

        assert not report.h_in_ha
        assert report.violated
        assert report.control_displacement_gap <= 1.5
        assert data["cost_ratio"] > 5.0

    def test_violation_demo_needs_linear_ha(self):
        """Test that shifted Ha maps are refused by the demo."""
        with pytest.raises(PreconditionError, match="u = 0"):
            composition_violation_demo(h=Ha(2.0, (0.1, 0.0)))

    def test_isotropic_scaling_preserves_mass(self):
        """Test that Ha(2, 0) gives 4 p(2x) with the mass kept on the grid."""
        grid = Grid2D.square(-1.0, 1.0, 64)
        X, Y = grid.mesh()
        p = normalize_image(np.exp(-0.5 * ((X - 0.1) ** 2 + Y ** 2) / 0.2 ** 2), grid)
        raw = 4.0 * p.sample(2.0 * X, 2.0 * Y)
        p_h = apply_diffeo_2d(p, Ha(2.0))

        assert image_mass(raw, grid) == pytest.approx(1.0, abs=1e-2)
        assert np.allclose(p_h.values, raw, rtol=1e-2, atol=1e-6)
        assert float(np.sum(X * p_h.cell_masses)) == pytest.approx(0.05, abs=grid.dx)


class TestRadonCdt:
    """Test projections and the Radon-CDT."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = Grid2D.square(-1.0, 1.0, 64)
        X, Y = self.grid.mesh()
        self.image = normalize_image(np.exp(-0.5 * ((X - 0.1) ** 2 + Y ** 2) / 0.15 ** 2), self.grid)

    def test_default_angles(self):
        """Test the evenly spaced angles in [0, pi)."""
        assert np.allclose(default_angles(4), [0.0, np.pi / 4, np.pi / 2, 3 * np.pi / 4])

    def test_projections_are_normalized(self):
        """Test that every projection carries unit mass."""
        sinogram = radon(self.image, angles=default_angles(8))

        assert len(sinogram.projections) == 8
        for projection in sinogram.projections:
            assert trapezoid(projection.values, dx=sinogram.grid.dx) == pytest.approx(1.0)
        assert np.allclose(sinogram.raw_masses, 1.0, atol=2e-2)

    def test_transform_means_follow_centre(self):
        """Test that the mean of each map is the projected centre of mass."""
        stack = rcdt(self.image, angles=np.array([0.0, np.pi / 2]))
        cell = stack.sinogram.grid.dx

        assert stack.as_array().shape == (2, stack.sinogram.grid.n)
        assert np.mean(stack.maps[0].values) == pytest.approx(0.1, abs=2 * cell)
        assert np.mean(stack.maps[1].values) == pytest.approx(0.0, abs=2 * cell)

    def test_support_escape(self):
        """Test that a too narrow offset grid is rejected."""
        with pytest.raises(SupportEscape):
            radon(self.image, angles=default_angles(4), offset_grid=Grid1D(-0.1, 0.1, 16))

    def test_opposite_angles_reflect(self):
        """Test that the projection at theta + pi is the reflected projection at theta."""
        sinogram = radon(self.image, angles=np.array([0.3, 0.3 + np.pi]))
        forward, backward = sinogram.projections

        assert np.max(np.abs(backward.values - forward.values[::-1])) <= 1e-3


class TestRadonSymmetricBump:
    """Test the Radon-CDT of a compactly supported radially symmetric bump."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = Grid2D.square(-1.0, 1.0, 128)
        X, Y = self.grid.mesh()
        rho = np.hypot(X, Y) / 0.5
        self.image = normalize_image(np.maximum(1.0 - rho ** 2, 0.0) ** 2, self.grid)
        self.offsets = Grid1D(-1.0, 1.0, 128)

    def test_projection_mass(self):
        """Test that all 32 projections keep unit mass before renormalization."""
        sinogram = radon(self.image, angles=default_angles(32))

        assert sinogram.raw_masses.shape == (32,)
        assert np.allclose(sinogram.raw_masses, 1.0, atol=1e-2)

    def test_self_transport_is_identity(self):
        """Test that every angle maps to the identity against the bump's own projection."""
        r1 = radon(self.image, angles=[0.0], offset_grid=self.offsets).projections[0]
        stack = rcdt(self.image, r1=r1, angles=default_angles(8))

        assert len(stack.maps) == 8
        for T in stack.maps:
            assert np.max(np.abs(T.values - T.grid.nodes)) <= 2 * self.offsets.dx


if __name__ == "__main__":
    pytest.main([__file__])
