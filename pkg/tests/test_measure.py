import math

import numpy as np
import pytest

from kleinian.errors import TargetNotInDomainClosure
from kleinian.group import (DeclaredStabilizer, EndingSequenceSpec, QuotientSpec,
                            SchottkyGroup, ending_sequence, enumerate_words)
from kleinian.measure import (classify_atomicity, conformality_residual,
                              ending_measure, orbit_measure,
                              singularity_diagnostic, support_gap, weak_distance)
from kleinian.model import BoundaryPoint, InteriorPoint
from kleinian.series import branch_contraction

from conftest import arc

DOMAIN_POINT = BoundaryPoint.from_angle(math.radians(108.0))


@pytest.fixture(scope="module")
def group():
    return SchottkyGroup.from_disc_pairs(
        1, [(arc(72, 10), arc(216, 10)), (arc(144, 10), arc(288, 10))],
        labels=["a", "b"])


def one_atom_measure(angle: float):
    return ending_measure(SchottkyGroup.trivial(1), BoundaryPoint.from_angle(angle),
                          1.0, 2, stab=DeclaredStabilizer.trivial())


class TestOrbitMeasure:
    def test_depth_zero_single_atom(self, group):
        z = InteriorPoint([0.3, -0.1])
        mu = orbit_measure(group, z, 1.0, 0)
        assert mu.atom_count == 1
        assert np.allclose(mu.points[0], z.coords)
        assert mu.weights[0] == 1.0

    def test_unit_mass_at_every_depth(self, group):
        z = InteriorPoint([0.3, -0.1])
        for depth in range(5):
            mu = orbit_measure(group, z, 0.8, depth)
            assert mu.total_mass() == pytest.approx(1.0, abs=1e-12)

    def test_weights_match_per_word_recomputation(self, group):
        z = InteriorPoint([0.25, 0.15])
        s = 1.1
        mu = orbit_measure(group, z, s, 6)
        oracle_weights = {}
        total = 0.0
        for w, t in enumerate_words(group, 6):
            val = t.derivative_interior(z) ** s
            total += val
            oracle_weights[t.apply_interior(z).coords.tobytes()] = val
        # check the identity atom and a couple of named orbit atoms
        assert mu.weight_at(z) == pytest.approx(1.0 / mu.series.partial_sum,
                                                rel=1e-10)
        g = group.generators[0].transform
        assert mu.weight_at(g.apply_interior(z)) == pytest.approx(
            g.derivative_interior(z) ** s / mu.series.partial_sum, rel=1e-9)

    def test_matches_extended_precision_oracle(self, group):
        z = InteriorPoint([0.25, 0.15])
        mu = orbit_measure(group, z, 1.0, 6)
        from kleinian.series import poincare_partial

        oracle = poincare_partial(group, z, 1.0, 6, precision="extended")
        assert mu.series.partial_sum == pytest.approx(oracle.partial_sum, rel=1e-12)


class TestEndingMeasure:
    def test_trivial_group_single_atom(self):
        mu = one_atom_measure(0.9)
        assert mu.atom_count == 1
        assert mu.weights[0] == 1.0
        assert mu.series.verdict.kind == "converged_within"

    def test_unit_mass(self, group):
        mu = ending_measure(group, DOMAIN_POINT, 1.0, 6,
                            stab=DeclaredStabilizer.trivial())
        assert mu.total_mass() == pytest.approx(1.0, abs=1e-12)

    def test_target_atom_weight_is_reciprocal_partial(self, group):
        mu = ending_measure(group, DOMAIN_POINT, 1.0, 6,
                            stab=DeclaredStabilizer.trivial())
        assert mu.weight_at(DOMAIN_POINT) == pytest.approx(
            1.0 / mu.series.partial_sum, rel=1e-12)

    def test_conformal_pushforward_on_atoms(self, group):
        # weight at g(zeta) = j(g, zeta)^s * weight at zeta
        s = 1.0
        mu = ending_measure(group, DOMAIN_POINT, s, 6,
                            stab=DeclaredStabilizer.trivial())
        base = mu.weight_at(DOMAIN_POINT)
        for gen in group.generators:
            for t in (gen.transform, gen.transform.inverse()):
                expected = t.derivative_boundary(DOMAIN_POINT) ** s * base
                assert mu.weight_at(t.apply_boundary(DOMAIN_POINT)) == \
                    pytest.approx(expected, rel=1e-10)

    def test_atoms_inside_first_letter_discs(self, group):
        # truncation shadow of boundary support: every non-identity atom
        # lies in a generator disc
        mu = ending_measure(group, DOMAIN_POINT, 1.0, 5,
                            stab=DeclaredStabilizer.trivial())
        discs = [d for _, d in group.discs()]
        for point, length in zip(mu.points, mu.word_lengths):
            if length == 0:
                continue
            assert any(d.contains(BoundaryPoint(point)) for d in discs)

    def test_target_inside_disc_rejected(self, group):
        inside = BoundaryPoint.from_angle(math.radians(72.0))
        with pytest.raises(TargetNotInDomainClosure):
            ending_measure(group, inside, 1.0, 3,
                           stab=DeclaredStabilizer.trivial())

    def test_stabilizer_disc_exempt_from_domain_check(self, group):
        extended = SchottkyGroup.free_product(group).with_parabolic(
            "p", arc(180, 12), 4.5)
        zeta = extended.generator("p").transform.classify().fixed_points[0]
        mu = ending_measure(extended, zeta, 0.7, 4,
                            stab=DeclaredStabilizer(("p",)))
        assert mu.total_mass() == pytest.approx(1.0, abs=1e-12)

    def test_kernel_restriction_sums_kernel_words_only(self, group):
        quotient = QuotientSpec("free", {"a": (), "b": ("b",)})
        zeta = group.generator("b").transform.classify().fixed_points[0]
        mu = ending_measure(group, zeta, 0.6, 4, kernel=quotient)
        from kleinian.group import kernel_enumerate

        expected = math.fsum(
            t.derivative_boundary(zeta) ** 0.6
            for _, t in kernel_enumerate(group, quotient, 4))
        assert mu.series.partial_sum == pytest.approx(expected, rel=1e-12)


class TestConformalityResidual:
    def test_identity_transform_zero(self, group):
        from kleinian.mobius import Transform

        mu = ending_measure(group, DOMAIN_POINT, 1.0, 5,
                            stab=DeclaredStabilizer.trivial())
        assert conformality_residual(mu, Transform.identity(1), 1.0) < 1e-14

    def test_residual_decreases_with_depth(self, group):
        g = group.generators[0].transform
        res = []
        for depth in (5, 7):
            mu = ending_measure(group, DOMAIN_POINT, 1.0, depth,
                                stab=DeclaredStabilizer.trivial())
            res.append(conformality_residual(mu, g, 1.0))
        assert res[1] < res[0]

    def test_residual_bounded_by_shell_mass(self, group):
        for depth in (5, 6, 7):
            mu = ending_measure(group, DOMAIN_POINT, 1.0, depth,
                                stab=DeclaredStabilizer.trivial())
            for gen in group.generators:
                residual = conformality_residual(mu, gen.transform, 1.0)
                assert residual <= 2.0 * mu.shell_mass() + 1e-15

    def test_orbit_measure_residual(self, group):
        z = InteriorPoint([0.2, 0.3])
        mu = orbit_measure(group, z, 1.0, 6)
        g = group.generators[1].transform
        assert conformality_residual(mu, g, 1.0) <= 2.0 * mu.shell_mass() + 1e-15


class TestClassifyAtomicity:
    def test_loxodromic_fixed_point_no_atom(self, group):
        tc = group.generators[0].transform.classify()
        verdict = classify_atomicity(group, tc.fixed_points[0], 1.0,
                                     DeclaredStabilizer(("a",)), 5)
        assert verdict.stabilizer_check.kind == "derivative_not_one"
        assert verdict.conclusion == "no_atom_at_target"
        assert verdict.stabilizer_check.witness == "a"

    def test_certified_atom_with_contraction_certificate(self, group):
        cert = branch_contraction(group, 2.5).boundary_certificate(1.5)
        verdict = classify_atomicity(group, DOMAIN_POINT, 1.5,
                                     DeclaredStabilizer.trivial(), 6, tail=cert)
        assert verdict.conclusion == "atom_at_target"

    def test_no_certificate_is_inconclusive(self, group):
        verdict = classify_atomicity(group, DOMAIN_POINT, 1.5,
                                     DeclaredStabilizer.trivial(), 6)
        assert verdict.conclusion == "inconclusive"

    def test_undeclared_stabilizer_is_inconclusive(self, group):
        verdict = classify_atomicity(group, DOMAIN_POINT, 1.5, None, 5)
        assert verdict.stabilizer_check.kind == "none_declared"
        assert verdict.conclusion == "inconclusive"

    def test_parabolic_point_unreduced_diverges_reduced_consulted(self, group):
        extended = SchottkyGroup.free_product(group).with_parabolic(
            "p", arc(180, 12), 4.5)
        zeta = extended.generator("p").transform.classify().fixed_points[0]
        from kleinian.series import horospherical_partial

        unreduced = horospherical_partial(extended, zeta, 0.7, 6)
        assert unreduced.verdict.kind == "growth_witness"
        verdict = classify_atomicity(extended, zeta, 0.7,
                                     DeclaredStabilizer(("p",)), 6)
        assert verdict.stabilizer_check.kind == "all_derivatives_one"
        # reduced series carries no certificate here: stays honest
        assert verdict.conclusion == "inconclusive"

    def test_misdeclared_stabilizer_rejected(self, group):
        with pytest.raises(ValueError):
            classify_atomicity(group, DOMAIN_POINT, 1.0,
                               DeclaredStabilizer(("a",)), 4)


class TestWeakDistance:
    def test_self_distance_zero(self, group):
        mu = ending_measure(group, DOMAIN_POINT, 1.0, 5,
                            stab=DeclaredStabilizer.trivial())
        assert weak_distance(mu, mu) == 0.0

    def test_two_point_masses_distance_shrinks_with_angle(self):
        base = one_atom_measure(1.0)
        distances = [weak_distance(base, one_atom_measure(1.0 + theta))
                     for theta in (0.5, 0.1, 0.01, 0.001)]
        assert all(b < a for a, b in zip(distances, distances[1:]))
        assert distances[-1] < 2e-3

    def test_symmetry(self, group):
        mu = ending_measure(group, DOMAIN_POINT, 1.0, 5,
                            stab=DeclaredStabilizer.trivial())
        nu = orbit_measure(group, InteriorPoint.radial(DOMAIN_POINT, 0.9), 1.0, 5)
        assert weak_distance(mu, nu) == pytest.approx(weak_distance(nu, mu),
                                                      abs=1e-14)

    def test_orbit_measures_approach_ending_measure(self, group):
        nu = ending_measure(group, DOMAIN_POINT, 1.0, 5,
                            stab=DeclaredStabilizer.trivial())
        seq = ending_sequence(group, EndingSequenceSpec.dyadic(DOMAIN_POINT, 8))
        distances = [weak_distance(orbit_measure(group, z, 1.0, 5), nu)
                     for z in seq]
        assert all(b < a for a, b in zip(distances, distances[1:]))


class TestSingularityDiagnostic:
    def test_identical_measures_full_overlap(self, group):
        mu = ending_measure(group, DOMAIN_POINT, 1.0, 4,
                            stab=DeclaredStabilizer.trivial())
        overlap = singularity_diagnostic(mu, mu, 1e-9)
        assert overlap[0] == pytest.approx(1.0, abs=1e-12)
        assert overlap[1] == pytest.approx(1.0, abs=1e-12)

    def test_separated_supports_no_overlap(self):
        m1, m2 = one_atom_measure(0.5), one_atom_measure(2.5)
        gap = support_gap(m1, m2)
        assert gap > 1.0
        assert singularity_diagnostic(m1, m2, gap / 4.0) == (0.0, 0.0)

    def test_eps_validation(self):
        m1 = one_atom_measure(0.5)
        with pytest.raises(ValueError):
            singularity_diagnostic(m1, m1, 0.0)


class TestCsvExport:
    def test_csv_rows_sorted_by_weight(self, group, tmp_path):
        mu = ending_measure(group, DOMAIN_POINT, 1.0, 4,
                            stab=DeclaredStabilizer.trivial())
        path = tmp_path / "atoms.csv"
        mu.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "x,y,weight,word_length"
        weights = [float(line.split(",")[2]) for line in lines[1:]]
        assert weights == sorted(weights, reverse=True)
        assert len(weights) == mu.atom_count
