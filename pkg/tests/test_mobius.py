import math

import numpy as np
import pytest

from kleinian.errors import DiscsOverlap, NumericallyAmbiguous
from kleinian.mobius import (Transform, classify, image_disc, pair_discs,
                             parabolic_fixing, rotation_moving_to_pole)
from kleinian.model import BoundaryPoint, InteriorPoint, hyperbolic_distance

from conftest import arc, cap, random_boundary_points, random_interior_points, \
    random_reduced_words


def word_transform(group, letters):
    return group.word_transform(letters)


def fd_boundary_derivative(g, theta: float, h: float = 1.5e-5) -> float:
    """Independent boundary-derivative oracle: Richardson-extrapolated
    central difference of chord length over angle."""
    def chord(hh: float) -> float:
        plus = g.apply_boundary(BoundaryPoint.from_angle(theta + hh)).coords
        minus = g.apply_boundary(BoundaryPoint.from_angle(theta - hh)).coords
        return float(np.linalg.norm(plus - minus) / (2.0 * hh))

    return (4.0 * chord(h / 2.0) - chord(h)) / 3.0


class TestGroupLaw:
    def test_identity_composition(self, std_group):
        ident = Transform.identity(1)
        g = std_group.generators[0].transform
        assert ident.compose(g).is_close(g)
        assert g.compose(ident).is_close(g)

    def test_inverse_gives_identity(self, std_group):
        for gen in std_group.generators:
            prod = gen.transform.compose(gen.transform.inverse())
            assert prod.is_identity(tol=1e-12)

    def test_dimension_mismatch(self, std_group, std_group_2d):
        with pytest.raises(ValueError):
            std_group.generators[0].transform.compose(
                std_group_2d.generators[0].transform)

    def test_composition_acts_by_double_application(self, std_group, std_group_2d, rng):
        for group in (std_group, std_group_2d):
            words = random_reduced_words(rng, group, 40, 4)
            pts = random_interior_points(rng, group.dim, 25)
            for w1, w2 in zip(words[::2], words[1::2]):
                g, h = word_transform(group, w1), word_transform(group, w2)
                gh = g.compose(h)
                for z in pts:
                    zp = InteriorPoint(z)
                    direct = gh.apply_interior(zp).coords
                    stepwise = g.apply_interior(h.apply_interior(zp)).coords
                    assert np.allclose(direct, stepwise, atol=1e-9)


class TestAction:
    def test_identity_fixes_points(self, std_group):
        ident = Transform.identity(1)
        z = InteriorPoint([0.3, 0.1])
        zeta = BoundaryPoint.from_angle(0.8)
        assert np.allclose(ident.apply_interior(z).coords, z.coords)
        assert np.allclose(ident.apply_boundary(zeta).coords, zeta.coords)

    def test_preserves_ball_and_sphere(self, std_group_2d, rng):
        g = word_transform(std_group_2d, (0, 2, 0))
        for z in random_interior_points(rng, 2, 50, rmax=0.99):
            assert g.apply_interior(InteriorPoint(z)).norm() < 1.0
        for zeta in random_boundary_points(rng, 2, 50):
            img = g.apply_boundary(BoundaryPoint(zeta))
            assert np.linalg.norm(img.coords) == pytest.approx(1.0, abs=1e-12)

    def test_isometry(self, std_group, std_group_2d, rng):
        # moderate words and radii: the distance of two deeply contracted
        # images is below float resolution of their coordinates
        for group in (std_group, std_group_2d):
            for letters in random_reduced_words(rng, group, 20, 3):
                g = word_transform(group, letters)
                pts = random_interior_points(rng, group.dim, 20, rmax=0.7)
                for z, w in zip(pts[::2], pts[1::2]):
                    zp, wp = InteriorPoint(z), InteriorPoint(w)
                    d0 = hyperbolic_distance(zp, wp)
                    d1 = hyperbolic_distance(g.apply_interior(zp),
                                             g.apply_interior(wp))
                    assert d1 == pytest.approx(d0, rel=1e-9, abs=1e-9)

    def test_generator_maps_exterior_to_interior(self, std_group, rng):
        gen = std_group.generators[0]
        for theta in rng.uniform(-math.pi, math.pi, size=400):
            zeta = BoundaryPoint.from_angle(float(theta))
            if gen.source.contains(zeta):
                continue
            assert gen.target.contains(gen.transform.apply_boundary(zeta))

    def test_cached_origin_images(self, std_group, rng):
        for letters in random_reduced_words(rng, std_group, 20, 5):
            g = word_transform(std_group, letters)
            direct = g.apply_interior(InteriorPoint.origin(1)).coords
            assert np.allclose(g.origin_image.coords, direct, atol=1e-10)
            direct_inv = g.inverse().apply_interior(InteriorPoint.origin(1)).coords
            assert np.allclose(g.origin_preimage.coords, direct_inv, atol=1e-10)


class TestDerivatives:
    def test_identity_derivatives_are_one(self, std_group, rng):
        ident = Transform.identity(1)
        for zeta in random_boundary_points(rng, 1, 10):
            assert ident.derivative_boundary(BoundaryPoint(zeta)) == pytest.approx(1.0)
        for z in random_interior_points(rng, 1, 10):
            assert ident.derivative_interior(InteriorPoint(z)) == pytest.approx(1.0)

    def test_boundary_chain_rule(self, std_group, std_group_2d, rng):
        for group in (std_group, std_group_2d):
            words = random_reduced_words(rng, group, 60, 6)
            zetas = random_boundary_points(rng, group.dim, 30)
            for w1, w2 in zip(words[::2], words[1::2]):
                g, h = word_transform(group, w1), word_transform(group, w2)
                gh = g.compose(h)
                for zeta in zetas:
                    bp = BoundaryPoint(zeta)
                    lhs = gh.derivative_boundary(bp)
                    rhs = g.derivative_boundary(h.apply_boundary(bp)) * \
                        h.derivative_boundary(bp)
                    assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_interior_chain_rule_inverse(self, std_group, rng):
        for letters in random_reduced_words(rng, std_group, 30, 3):
            g = word_transform(std_group, letters)
            for z in random_interior_points(rng, 1, 10, rmax=0.7):
                zp = InteriorPoint(z)
                gz = g.apply_interior(zp)
                assert g.inverse().derivative_interior(gz) * \
                    g.derivative_interior(zp) == pytest.approx(1.0, rel=1e-10)

    def test_boundary_derivative_is_kernel_at_preimage(self, std_group_2d, rng):
        from kleinian.model import poisson_kernel

        for letters in random_reduced_words(rng, std_group_2d, 30, 5):
            g = word_transform(std_group_2d, letters)
            for zeta in random_boundary_points(rng, 2, 10):
                bp = BoundaryPoint(zeta)
                assert g.derivative_boundary(bp) == pytest.approx(
                    poisson_kernel(g.origin_preimage, bp), rel=1e-10)

    def test_finite_difference_oracle(self, std_group, rng):
        # Richardson-extrapolated central difference of the circle action,
        # sampled where the stretch factor is resolvable by the step
        checked = 0
        for letters in random_reduced_words(rng, std_group, 60, 5):
            g = word_transform(std_group, letters)
            for theta in rng.uniform(-math.pi, math.pi, size=8):
                j = g.derivative_boundary(BoundaryPoint.from_angle(theta))
                if not 1e-3 < j < 1e3:
                    continue
                assert fd_boundary_derivative(g, theta) == pytest.approx(j, rel=1e-6)
                checked += 1
        assert checked > 50

    def test_boundary_limit_of_interior_derivative(self, std_group, rng):
        # Richardson extrapolation of j(g, t zeta) as t -> 1
        for letters in random_reduced_words(rng, std_group, 10, 4):
            g = word_transform(std_group, letters)
            zeta = BoundaryPoint.from_angle(float(rng.uniform(-math.pi, math.pi)))
            values = []
            for k in range(3, 9):
                t = 1.0 - 10.0 ** (-k)
                values.append(g.derivative_interior(
                    InteriorPoint(t * zeta.coords)))
            extrapolated = (10.0 * values[-1] - values[-2]) / 9.0
            assert extrapolated == pytest.approx(
                g.derivative_boundary(zeta), rel=1e-7)

    def test_positivity(self, std_group, rng):
        for letters in random_reduced_words(rng, std_group, 50, 6):
            g = word_transform(std_group, letters)
            zeta = BoundaryPoint.from_angle(float(rng.uniform(-math.pi, math.pi)))
            assert g.derivative_boundary(zeta) > 0.0


class TestClassification:
    def test_identity(self):
        assert classify(Transform.identity(1)).kind == "identity"
        assert classify(Transform(-np.eye(2), 2)).kind == "identity"

    def test_pairing_generator_is_loxodromic(self, std_group):
        gen = std_group.generators[0]
        tc = classify(gen.transform)
        assert tc.kind == "loxodromic"
        attracting, repelling = tc.fixed_points
        assert gen.target.contains(attracting)
        assert gen.source.contains(repelling)

    def test_loxodromic_fixed_points_by_iteration(self, std_group):
        # iterating g from a random seed converges to the attracting point
        gen = std_group.generators[1]
        tc = classify(gen.transform)
        z = BoundaryPoint.from_angle(0.123)
        for _ in range(60):
            z = gen.transform.apply_boundary(z)
        assert np.allclose(z.coords, tc.fixed_points[0].coords, atol=1e-9)
        z = BoundaryPoint.from_angle(0.123)
        inv = gen.transform.inverse()
        for _ in range(60):
            z = inv.apply_boundary(z)
        assert np.allclose(z.coords, tc.fixed_points[1].coords, atol=1e-9)

    def test_parabolic_translation(self):
        # unit translation of the half plane, conjugated to the disc
        p = Transform(np.array([[1.0, 1.0], [0.0, 1.0]]), 1)
        tc = classify(p)
        assert tc.kind == "parabolic"
        zeta = tc.fixed_points[0]
        assert np.allclose(p.apply_boundary(zeta).coords, zeta.coords, atol=1e-12)
        assert p.derivative_boundary(zeta) == pytest.approx(1.0, abs=1e-9)

    def test_elliptic_rotation(self):
        t = 0.7
        rot = Transform(np.array([[math.cos(t / 2), -math.sin(t / 2)],
                                  [math.sin(t / 2), math.cos(t / 2)]]), 1)
        assert classify(rot).kind == "elliptic"

    def test_numerically_ambiguous_band(self):
        # trace^2 - 4 of order 4 a^2 ~ 1e-10: refuse to guess
        a = 5e-6
        m = np.array([[1.0 + a, 0.0], [0.0, 1.0 / (1.0 + a)]])
        with pytest.raises(NumericallyAmbiguous):
            classify(Transform(m, 1))


class TestPairDiscs:
    def test_exterior_to_interior_on_samples(self, rng):
        c_plus = arc(100, 12)
        c_minus = arc(250, 8)
        g = pair_discs(c_plus, c_minus)
        for theta in rng.uniform(-math.pi, math.pi, size=1000):
            zeta = BoundaryPoint.from_angle(float(theta))
            image = g.apply_boundary(zeta)
            if c_plus.contains(zeta, closed=False):
                assert not c_minus.contains(image)
            else:
                d = c_minus.chordal_distance(image)
                assert d <= c_minus.radius + 1e-9

    def test_inverse_swaps_roles(self, rng):
        c_plus = arc(80, 10)
        c_minus = arc(200, 14)
        g_inv = pair_discs(c_plus, c_minus).inverse()
        for theta in rng.uniform(-math.pi, math.pi, size=300):
            zeta = BoundaryPoint.from_angle(float(theta))
            if not c_minus.contains(zeta):
                assert c_plus.contains(g_inv.apply_boundary(zeta))

    def test_antipodal_arcs(self):
        g = pair_discs(arc(90, 15), arc(270, 15))
        assert classify(g).kind == "loxodromic"
        # the far midpoint of the exterior maps into the target arc
        mid = BoundaryPoint.from_angle(0.0)
        assert arc(270, 15).contains(g.apply_boundary(mid))

    def test_overlap_rejected(self):
        with pytest.raises(DiscsOverlap):
            pair_discs(arc(10, 20), arc(40, 20))

    def test_images_shrink_discs(self, rng):
        g = pair_discs(arc(100, 12), arc(250, 12))
        for center, radius in ((0.0, 8.0), (170.0, 10.0), (310.0, 6.0)):
            sample = arc(center, radius)
            if not sample.is_disjoint_from(arc(100, 12)):
                continue
            image = image_disc(g, sample)
            assert image.radius < sample.radius

    def test_caps_on_sphere(self, rng):
        c_plus = cap([0.0, 1.0, 0.0], 0.4)
        c_minus = cap([-1.0, 0.0, 0.0], 0.3)
        g = pair_discs(c_plus, c_minus)
        pts = rng.normal(size=(500, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        for p in pts:
            zeta = BoundaryPoint(p)
            inside_source = c_plus.contains(zeta, closed=False)
            image = g.apply_boundary(zeta)
            assert c_minus.contains(image) == (not inside_source)

    def test_pole_covering_cap_is_handled(self):
        # a cap containing the projection pole forces the rotation fallback
        c_plus = cap([1.0, 0.0, 0.0], 0.5)
        c_minus = cap([-1.0, 0.0, 0.0], 0.5)
        g = pair_discs(c_plus, c_minus)
        mid = BoundaryPoint([0.0, 1.0, 0.0])
        assert c_minus.contains(g.apply_boundary(mid))

    def test_equal_radii_not_required(self):
        g = pair_discs(arc(60, 4), arc(240, 18))
        assert classify(g).kind == "loxodromic"


class TestImageDisc:
    def test_matches_boundary_samples(self, std_group_2d, rng):
        g = word_transform(std_group_2d, (0, 2))
        sample = cap([0.0, 0.0, -1.0], 0.35)
        img = image_disc(g, sample)
        from kleinian.mobius import disc_boundary_points, apply_boundary_raw

        pts = disc_boundary_points(sample, 64)
        images = apply_boundary_raw(g.matrix[None, :, :], pts)
        dists = np.linalg.norm(images - img.center.coords[None, :], axis=1)
        assert np.max(np.abs(dists - img.radius)) < 1e-10

    def test_arc_image_exact(self, std_group, rng):
        g = word_transform(std_group, (0,))
        sample = arc(144, 10)
        img = image_disc(g, sample)
        for t in np.linspace(-1.0, 1.0, 41):
            theta = 144 * math.pi / 180 + t * sample.angular_radius
            image = g.apply_boundary(BoundaryPoint.from_angle(theta))
            assert img.chordal_distance(image) <= img.radius + 1e-10


class TestParabolicConstruction:
    def test_fixes_disc_center_with_unit_derivative(self):
        disc = arc(180, 12)
        p = parabolic_fixing(disc, 4.0)
        tc = classify(p)
        assert tc.kind == "parabolic"
        assert np.allclose(tc.fixed_points[0].coords, disc.center.coords, atol=1e-9)
        assert p.derivative_boundary(disc.center) == pytest.approx(1.0, abs=1e-9)

    def test_powers_map_exterior_inside(self):
        disc = arc(180, 12)
        p = parabolic_fixing(disc, 4.0)
        outside = [BoundaryPoint.from_angle(t) for t in np.linspace(-2.0, 2.0, 50)]
        mat = np.eye(2, dtype=complex)
        for _ in range(12):
            mat = mat @ p.matrix
            g = Transform(mat, 1, _trusted_unit_det=True)
            for zeta in outside:
                assert disc.contains(g.apply_boundary(zeta))

    def test_strength_must_exceed_two(self):
        with pytest.raises(ValueError):
            parabolic_fixing(arc(180, 12), 1.5)


class TestRotations:
    def test_moves_point_to_pole(self, rng):
        for p in random_boundary_points(rng, 2, 30):
            rot = Transform(rotation_moving_to_pole(p, 2), 2)
            moved = rot.apply_boundary(BoundaryPoint(p))
            assert np.allclose(moved.coords, [1.0, 0.0, 0.0], atol=1e-10)

    def test_equatorial_rotation_is_real(self, rng):
        for theta in rng.uniform(-math.pi, math.pi, size=10):
            p = BoundaryPoint.from_angle(float(theta))
            rot = rotation_moving_to_pole(p.coords, 1)
            assert np.max(np.abs(rot.imag)) < 1e-14
