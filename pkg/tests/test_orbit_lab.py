import unittest

import numpy as np
from numpy.testing import assert_allclose

from shiftlab.exceptions import DomainError, PreconditionError
from shiftlab.models.lattice_vector import LatticeVector, WindowPolicy
from shiftlab.models.operators import DiagonalOperator, Direction, OperatorPower, ShiftOperator
from shiftlab.models.orbit_trace import OrbitTrace
from shiftlab.models.subspace import PatternSubspace
from shiftlab.models.weights import WeightSequence
from shiftlab.services import seqspace
from shiftlab.services.constructor import scaled_backward_shift
from shiftlab.services.orbit_lab import (compare_traces, compression_orbit_identity, compression_trace, coverage,
                                         coverage_curve, orbit, orbit_in_M, projected_orbit_inclusion,
                                         quotient_orbit)


def e(n, scale=1.0, one_sided=False):
    return LatticeVector.basis(n, scale, one_sided)


class TestOrbit(unittest.TestCase):
    def setUp(self):
        self.T = ShiftOperator(Direction.FORWARD, WeightSequence.split(0, 0.5, 3.0))
        self.M = PatternSubspace.even_zero()

    def test_orbit_of_basis_vector(self):
        trace = orbit(self.T, e(1), 4)
        self.assertEqual(trace.powers, [0, 1, 2, 3, 4])
        for n, point in zip(trace.powers, trace.points):
            self.assertTrue(point.allclose(e(1 + n, 2.0 ** -n)))
        self.assertTrue(all(trace.trusted))
        self.assertFalse(trace.overflow)

    def test_scaled_backward_shift_falls_off_the_edge(self):
        two_b = scaled_backward_shift(2.0)
        trace = orbit(two_b, e(3, one_sided=True), 5)
        self.assertTrue(trace.points[2].allclose(e(1, 4.0, one_sided=True)))
        self.assertTrue(trace.points[3].allclose(e(0, 8.0, one_sided=True)))
        self.assertTrue(trace.points[4].is_zero())
        self.assertEqual(trace.window[0], 0)

    def test_leaking_points_are_untrusted(self):
        trace = orbit(self.T, e(1), 4, WindowPolicy(default_half_width=2))
        self.assertEqual(trace.trusted, [True, True, False, False, False])
        self.assertEqual(trace.window, (-2, 2))

    def test_orbit_of_zero(self):
        trace = orbit(self.T, LatticeVector.zeros(), 5)
        self.assertEqual(len(trace), 6)
        self.assertTrue(all(point.is_zero() for point in trace.points))

    def test_row_norms_survive_large_coefficients(self):
        big = ShiftOperator(Direction.FORWARD, WeightSequence.constant(1e160))
        trace = orbit(big, LatticeVector.from_terms({0: 1, 1: 1}), 1, WindowPolicy(default_half_width=8))
        rows = trace.rows()
        assert_allclose(rows[1]["norm"], np.sqrt(2.0) * 1e160, rtol=1e-12)
        for row, point in zip(rows, trace.points):
            self.assertEqual(row["norm"], seqspace.norm(point))
        squared = OrbitTrace(e(0), [0], [LatticeVector.from_terms({0: 1e200, 1: 1e200})], [0.0])
        assert_allclose(squared.rows()[0]["norm"], np.sqrt(2.0) * 1e200, rtol=1e-12)

    def test_length_must_be_positive(self):
        with self.assertRaises(DomainError):
            orbit(self.T, e(1), 0)

    def test_orbit_in_m_keeps_powers(self):
        in_m = orbit_in_M(orbit(self.T, e(1), 4), self.M)
        self.assertEqual(in_m.powers, [0, 2, 4])
        self.assertEqual(orbit_in_M(orbit(self.T, e(1), 4), PatternSubspace.whole_space()).powers, [0, 1, 2, 3, 4])

    def test_even_orbit_never_meets_odd_support(self):
        trace = orbit(OperatorPower(self.T, 2), e(0), 6)
        self.assertEqual(len(orbit_in_M(trace, self.M)), 0)

    def test_projected_inclusion(self):
        report = projected_orbit_inclusion(orbit(self.T, LatticeVector.from_terms({0: 1, 1: 1}), 6), self.M)
        self.assertTrue(report.holds)
        self.assertFalse(report.checks[0].in_subspace)
        self.assertEqual(report.checks[0].projected_norm, 1.0)
        self.assertEqual(report.to_dict()["per_power"][0]["power"], 0)


class TestCoverage(unittest.TestCase):
    def setUp(self):
        self.T = ShiftOperator(Direction.FORWARD, WeightSequence.split(0, 0.5, 3.0))
        self.M = PatternSubspace.even_zero()
        self.targets = [e(3, 0.25), e(5, 2.0 ** -4)]

    def test_targets_on_the_orbit_are_covered(self):
        report = coverage(orbit(self.T, e(1), 6), self.M, self.targets, 1e-9)
        self.assertEqual(report.score, 1.0)
        self.assertEqual([hit.best_power for hit in report.hits], [2, 4])

    def test_untrusted_points_do_not_count(self):
        trace = orbit(self.T, e(1), 6, WindowPolicy(default_half_width=2))
        self.assertEqual(coverage(trace, self.M, self.targets, 1e-9).score, 0.0)

    def test_empty_target_set(self):
        self.assertEqual(coverage(orbit(self.T, e(1), 2), self.M, [], 0.1).score, 0.0)

    def test_targets_must_lie_in_m(self):
        with self.assertRaises(PreconditionError):
            coverage(orbit(self.T, e(1), 2), self.M, [e(0)], 0.1)
        with self.assertRaises(DomainError):
            coverage(orbit(self.T, e(1), 2), self.M, self.targets, 0.0)

    def test_projected_distances(self):
        x = LatticeVector.from_terms({1: 1, 2: 5})
        trace = orbit(self.T, x, 2)
        self.assertLess(coverage(trace, self.M, [e(3, 0.25)], 1e-9).score, 1.0)
        self.assertEqual(coverage(trace, self.M, [e(3, 0.25)], 1e-9, projected=True).score, 1.0)

    def test_curve_is_nondecreasing(self):
        curve = coverage_curve(orbit(self.T, e(1), 6), self.M, self.targets, 1e-9, [4, 0, 2])
        self.assertEqual(curve, [(0, 0.0), (2, 0.5), (4, 1.0)])


class TestCompressionAndQuotient(unittest.TestCase):
    def setUp(self):
        self.T2 = OperatorPower(ShiftOperator(Direction.FORWARD, WeightSequence.split(0, 0.5, 3.0)), 2)
        self.M = PatternSubspace.even_zero()
        self.Mperp = self.M.complement()

    def test_compression_identity(self):
        report = compression_orbit_identity(self.T2, LatticeVector.from_terms({0: 1, 2: -1j}), self.Mperp, 10)
        self.assertTrue(report.holds)
        self.assertEqual(report.powers, list(range(11)))

    def test_identity_on_random_vectors(self):
        rng = np.random.default_rng(7)
        grid = np.arange(-10, 11)
        for _ in range(50):
            x = seqspace.random_vector(rng, -10, 10, mask=self.Mperp.admissible_mask(grid))
            report = compression_orbit_identity(self.T2, x, self.Mperp, 30)
            self.assertTrue(report.holds, msg=f"max deviation {report.max_deviation:.3e}")

    def test_compression_preconditions(self):
        with self.assertRaises(PreconditionError):
            compression_orbit_identity(self.T2, e(1), self.Mperp, 5)
        with self.assertRaises(PreconditionError):
            compression_orbit_identity(self.T2.base, e(0), self.Mperp, 5)

    def test_diagonal_compression(self):
        D = DiagonalOperator.from_pairs([(0, 0.5), (2, 2.0)])
        report = compression_orbit_identity(D, LatticeVector.from_terms({0: 1, 2: 1}), self.Mperp, 8)
        self.assertTrue(report.holds)

    def test_quotient_of_a_vector_in_m_is_zero(self):
        trace = quotient_orbit(self.T2, e(1), self.M, 5)
        self.assertTrue(all(point.is_zero() for point in trace.points))

    def test_quotient_drops_the_m_component(self):
        plain = orbit(self.T2, e(0), 8)
        self.assertTrue(compare_traces("e0", quotient_orbit(self.T2, e(0), self.M, 8), plain).holds)
        mixed = quotient_orbit(self.T2, LatticeVector.from_terms({0: 1, 1: 1}), self.M, 8)
        self.assertTrue(compare_traces("e0+e1", mixed, plain).holds)

    def test_quotient_agrees_with_compression(self):
        x = LatticeVector.from_terms({-2: 2, 0: 1, 4: 0.5})
        report = compare_traces("quotient", quotient_orbit(self.T2, x, self.M, 12),
                                compression_trace(self.T2, x, self.Mperp, 12))
        self.assertTrue(report.holds)

    def test_quotient_needs_invariance(self):
        with self.assertRaises(PreconditionError):
            quotient_orbit(self.T2.base, e(0), self.M, 3)


if __name__ == '__main__':
    unittest.main()
