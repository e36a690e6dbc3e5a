import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from shiftlab.exceptions import DomainError
from shiftlab.models.lattice_vector import LatticeVector, WindowPolicy, scaled_norm
from shiftlab.services import seqspace

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)


@st.composite
def lattice_vectors(draw, max_size=12):
    lo = draw(st.integers(min_value=-20, max_value=20))
    re = draw(st.lists(finite, min_size=1, max_size=max_size))
    im = draw(st.lists(finite, min_size=len(re), max_size=len(re)))
    return LatticeVector(lo, np.array(re) + 1j * np.array(im))


def e(n, scale=1.0):
    return LatticeVector.basis(n, scale)


class TestLatticeVector(unittest.TestCase):
    def test_window_bounds(self):
        v = LatticeVector(-2, [1, 0, 3])
        self.assertEqual(v.hi, 0)
        self.assertEqual(v.at(0), 3)
        self.assertEqual(v.at(5), 0)

    def test_empty_vector_rejected(self):
        with self.assertRaises(DomainError):
            LatticeVector(0, [])

    def test_one_sided_vector_rejects_negative_mass(self):
        with self.assertRaises(DomainError):
            LatticeVector(-1, [1.0, 2.0], one_sided=True)

    def test_one_sided_vector_drops_zero_negative_padding(self):
        v = LatticeVector(-2, [0, 0, 5], one_sided=True)
        self.assertEqual(v.lo, 0)
        self.assertEqual(v.at(0), 5)

    def test_literal_parsing(self):
        v = LatticeVector.from_dict({"lo": -1, "coeffs": [[1, 2], 3]})
        self.assertEqual(v.at(-1), 1 + 2j)
        self.assertEqual(v.at(0), 3)

    def test_coefficients_are_read_only(self):
        v = LatticeVector(0, [1.0])
        with self.assertRaises(ValueError):
            v.coeffs[0] = 2.0

    def test_window_policy_widens_to_cover_vectors(self):
        policy = WindowPolicy(10)
        self.assertEqual(policy.bounds(), (-10, 10))
        self.assertEqual(policy.bounds(one_sided=True), (0, 20))
        self.assertEqual(policy.bounds_covering([LatticeVector(5, np.ones(30))]), (-10, 34))


class TestInnerAndNorm(unittest.TestCase):
    def test_inner_on_basis(self):
        self.assertEqual(seqspace.inner(e(0), e(0)), 1)
        self.assertEqual(seqspace.inner(e(0), e(1)), 0)

    def test_inner_linear_in_first_argument(self):
        u = LatticeVector.from_terms({3: 2, 5: 1j})
        self.assertEqual(seqspace.inner(u, e(5)), 1j)

    def test_norm_examples(self):
        self.assertEqual(seqspace.norm(LatticeVector.zeros()), 0)
        self.assertEqual(seqspace.norm(e(2, 3.0)), 3)
        assert_allclose(seqspace.norm(LatticeVector.from_terms({1: 1, -1: 1})), np.sqrt(2), rtol=1e-15)

    def test_norm_survives_large_coefficients(self):
        v = LatticeVector(0, [1e200, 1e200])
        assert_allclose(seqspace.norm(v), np.sqrt(2) * 1e200, rtol=1e-15)

    def test_scaled_norm_edges(self):
        self.assertEqual(scaled_norm(np.array([], dtype=np.complex128)), 0.0)
        self.assertEqual(scaled_norm(np.array([np.inf, 1.0])), np.inf)
        assert_allclose(scaled_norm(np.array([3e300j, 4e300])), 5e300, rtol=1e-15)

    def test_l1_norm(self):
        self.assertEqual(seqspace.l1_norm(LatticeVector(0, [3, -4j])), 7)

    @given(lattice_vectors(), lattice_vectors())
    @settings(deadline=None)
    def test_cauchy_schwarz(self, u, v):
        bound = seqspace.norm(u) * seqspace.norm(v)
        self.assertLessEqual(abs(seqspace.inner(u, v)), bound * (1 + 1e-12) + 1e-300)

    @given(lattice_vectors(), lattice_vectors(), st.integers(1, 10), st.integers(1, 10))
    @settings(deadline=None)
    def test_zero_padding_changes_nothing(self, u, v, left, right):
        wide = u.rewindow(u.lo - left, u.hi + right)
        assert_allclose(seqspace.norm(wide), seqspace.norm(u), rtol=1e-15)
        slack = 1e-14 * (1 + seqspace.norm(u) * seqspace.norm(v))
        assert_allclose(seqspace.inner(wide, v), seqspace.inner(u, v), rtol=0, atol=slack)

    @given(lattice_vectors())
    @settings(deadline=None)
    def test_inner_with_self_is_squared_norm(self, v):
        value = seqspace.inner(v, v)
        self.assertAlmostEqual(value.imag, 0.0)
        assert_allclose(value.real, seqspace.norm(v) ** 2, rtol=1e-12)


class TestAxpy(unittest.TestCase):
    def test_examples(self):
        zero = LatticeVector.zeros()
        self.assertTrue(seqspace.axpy(1, e(0), zero).allclose(e(0)))
        v, y = LatticeVector(0, [1, 2]), LatticeVector(-3, [4])
        self.assertTrue(seqspace.axpy(0, v, y).allclose(y))
        self.assertTrue(seqspace.axpy(2, e(1), e(1)).allclose(e(1, 3.0)))

    def test_result_window_covers_both_inputs(self):
        result = seqspace.axpy(1, e(-4), e(6))
        self.assertEqual((result.lo, result.hi), (-4, 6))

    def test_mixed_sidedness_gives_two_sided_sum(self):
        one_sided = LatticeVector(0, [1.0, 2.0], one_sided=True)
        result = seqspace.axpy(2, one_sided, e(1))
        self.assertFalse(result.one_sided)
        self.assertTrue(result.allclose(LatticeVector.from_terms({0: 2, 1: 5})))
        result = seqspace.axpy(1, e(-2), one_sided)
        self.assertFalse(result.one_sided)
        self.assertEqual((result.lo, result.hi), (-2, 1))

    def test_one_sided_inputs_stay_one_sided(self):
        one_sided = LatticeVector.basis(3, one_sided=True)
        self.assertTrue(seqspace.axpy(1, one_sided, one_sided).one_sided)

    @given(lattice_vectors(), lattice_vectors(), st.integers(1, 5))
    @settings(deadline=None)
    def test_commutes_with_window_extension(self, x, y, pad):
        direct = seqspace.axpy(2 - 1j, x, y)
        padded = seqspace.axpy(2 - 1j, x.rewindow(x.lo - pad, x.hi + pad), y)
        self.assertTrue(direct.allclose(padded, atol=0.0))


class TestTruncation(unittest.TestCase):
    def test_truncate_reports_leakage(self):
        v = LatticeVector(-1, [3, 1, 4])
        inside, leaked = seqspace.truncate(v, 0, 0)
        self.assertEqual(inside.at(0), 1)
        assert_allclose(leaked, 5.0)

    def test_truncate_inside_window_is_lossless(self):
        _, leaked = seqspace.truncate(LatticeVector(0, [1, 2]), -5, 5)
        self.assertEqual(leaked, 0.0)

    def test_random_vector_respects_mask(self):
        rng = np.random.default_rng(3)
        mask = np.array([True, False, True, False])
        v = seqspace.random_vector(rng, 0, 3, mask=mask)
        self.assertEqual(v.at(1), 0)
        self.assertEqual(v.at(3), 0)


if __name__ == '__main__':
    unittest.main()
