import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from shiftlab.exceptions import ConfigurationError, DomainError, NoninvertibleOperatorError
from shiftlab.models.lattice_vector import LatticeVector
from shiftlab.models.operators import DiagonalOperator, Direction, OperatorPower, ShiftOperator
from shiftlab.models.weights import WeightRule, WeightSequence
from shiftlab.services import seqspace
from shiftlab.services.shift_ops import (adjoint, apply, apply_power, diagonal_power_apply, flip, flip_conjugate,
                                         operator_power_apply, right_inverse_apply, right_inverse_power_apply,
                                         weight_product)


def example3_shift(direction=Direction.FORWARD):
    return ShiftOperator(direction, WeightSequence.split(0, 0.5, 3.0))


def e(n, scale=1.0, one_sided=False):
    return LatticeVector.basis(n, scale, one_sided)


def listed_weights(lo, values, default=1.0):
    rules = tuple(WeightRule("range", (lo + i, lo + i), float(w)) for i, w in enumerate(values))
    return WeightSequence(rules + (WeightRule("default", (), default),))


def repeated(step, k, v):
    for _ in range(k):
        v = step(v)
    return v


@st.composite
def shift_setups(draw, max_power=50):
    direction = draw(st.sampled_from(list(Direction)))
    weights = draw(st.lists(st.floats(0.1, 10.0), min_size=1, max_size=120))
    default = draw(st.floats(0.1, 10.0))
    T = ShiftOperator(direction, listed_weights(-60, weights, default))
    k = draw(st.integers(0, max_power))
    lo = draw(st.integers(-30, 30))
    coeffs = draw(st.lists(st.floats(-5, 5).map(lambda c: round(c, 3)), min_size=1, max_size=8))
    return T, k, LatticeVector(lo, np.array(coeffs, dtype=float))


class TestSingleStep(unittest.TestCase):
    def setUp(self):
        self.T = example3_shift()

    def test_forward_action(self):
        self.assertTrue(apply(self.T, e(1)).allclose(e(2, 0.5)))
        self.assertTrue(apply(self.T, e(-1)).allclose(e(0, 3.0)))

    def test_unit_weights_translate(self):
        T = ShiftOperator(Direction.FORWARD, WeightSequence.constant(1.0))
        v = LatticeVector(-2, [1, 2j, 3])
        moved = apply(T, v)
        self.assertEqual(moved.lo, -1)
        assert_allclose(moved.coeffs, v.coeffs)

    def test_backward_action(self):
        B = example3_shift(Direction.BACKWARD)
        self.assertTrue(apply(B, e(1)).allclose(e(0, 0.5)))

    def test_right_inverse_examples(self):
        self.assertTrue(right_inverse_apply(self.T, e(1)).allclose(e(0, 2.0)))
        twice = right_inverse_apply(self.T, right_inverse_apply(self.T, e(1)))
        self.assertTrue(twice.allclose(e(-1, 2.0 / 3.0), atol=1e-15))
        self.assertTrue(right_inverse_power_apply(self.T, 2, e(1)).allclose(twice, atol=1e-15))

    def test_rule_gap_is_a_configuration_error(self):
        T = ShiftOperator(Direction.FORWARD, WeightSequence((WeightRule("ge", (0,), 1.0),)))
        with self.assertRaises(ConfigurationError):
            apply(T, e(-3))

    def test_weight_below_floor_blocks_the_inverse(self):
        T = ShiftOperator(Direction.FORWARD, WeightSequence.split(0, 1e-12, 1.0))
        with self.assertRaises(NoninvertibleOperatorError):
            right_inverse_apply(T, e(1))
        with self.assertRaises(NoninvertibleOperatorError):
            weight_product(T, 1, 3, inverse=True)

    def test_flagged_noninvertible_operator(self):
        T = ShiftOperator(Direction.FORWARD, WeightSequence.constant(2.0), invertible=False)
        with self.assertRaises(NoninvertibleOperatorError):
            right_inverse_apply(T, e(0))

    def test_one_sided_backward_shift_annihilates_e0(self):
        B = ShiftOperator(Direction.BACKWARD, WeightSequence.constant(2.0), one_sided=True)
        self.assertTrue(apply(B, e(0, one_sided=True)).is_zero())

    @given(st.lists(st.floats(0.1, 10.0), min_size=1, max_size=40), st.integers(-15, 15),
           st.sampled_from(list(Direction)))
    @settings(deadline=None, max_examples=100)
    def test_right_inverse_identity(self, weights, m, direction):
        T = ShiftOperator(direction, listed_weights(-20, weights, 1.5))
        restored = apply(T, right_inverse_apply(T, e(m)))
        self.assertEqual(restored.support().tolist(), [m])
        assert_allclose(restored.at(m), 1.0, rtol=1e-12)


class TestWeightProduct(unittest.TestCase):
    def setUp(self):
        self.T = example3_shift()

    def test_forward_product(self):
        assert_allclose(weight_product(self.T, 1, 10), 2.0 ** -10, rtol=1e-15)

    def test_empty_product(self):
        self.assertEqual(weight_product(self.T, 7, 0), 1.0)
        self.assertEqual(weight_product(self.T, 7, 0, inverse=True), 1.0)

    def test_inverse_product_includes_the_weight_at_zero(self):
        # reciprocals of w_0, w_{-1}, w_{-2}, w_{-3}
        assert_allclose(weight_product(self.T, 1, 4, inverse=True), 2.0 / 27.0, rtol=1e-15)
        assert_allclose(weight_product(self.T, 0, 4, inverse=True), 3.0 ** -4, rtol=1e-15)

    def test_backward_ranges(self):
        B = example3_shift(Direction.BACKWARD)
        # w_1 w_0 and 1/(w_2 w_3)
        assert_allclose(weight_product(B, 1, 2), 0.25)
        assert_allclose(weight_product(B, 1, 2, inverse=True), 4.0)
        assert_allclose(weight_product(B, -1, 2), 9.0)

    def test_power_limits(self):
        with self.assertRaises(DomainError):
            weight_product(self.T, 0, -1)
        T = ShiftOperator(Direction.FORWARD, WeightSequence.constant(2.0), max_power=10)
        with self.assertRaises(DomainError):
            weight_product(T, 0, 11)

    def test_underflow_is_reported(self):
        T = ShiftOperator(Direction.FORWARD, WeightSequence.constant(1e-3))
        with self.assertLogs("shiftlab.services.shift_ops", level="WARNING"):
            self.assertEqual(weight_product(T, 0, 200), 0.0)

    @given(st.integers(-30, 30), st.integers(0, 25), st.integers(0, 25), st.booleans())
    @settings(deadline=None)
    def test_telescoping(self, m, k1, k2, inverse):
        T = example3_shift()
        step = -k1 if inverse else k1
        joined = weight_product(T, m, k1 + k2, inverse)
        split = weight_product(T, m, k1, inverse) * weight_product(T, m + step, k2, inverse)
        assert_allclose(joined, split, rtol=1e-12)


class TestApplyPower(unittest.TestCase):
    def setUp(self):
        self.T = example3_shift()

    def test_zero_power_is_identity(self):
        v = LatticeVector(-3, [1, 2, 3])
        self.assertIs(apply_power(self.T, 0, v), v)

    def test_two_steps(self):
        self.assertTrue(apply_power(self.T, 2, e(1)).allclose(e(3, 0.25)))

    def test_inverse_power_matches_repeated_steps(self):
        v = LatticeVector(-2, [1, -1, 2, 0.5])
        oracle = repeated(lambda u: right_inverse_apply(self.T, u), 7, v)
        assert_allclose(right_inverse_power_apply(self.T, 7, v).values_at(oracle.indices), oracle.coeffs, rtol=1e-12)

    def test_even_powers_of_2B_keep_the_even_pattern(self):
        two_b = ShiftOperator(Direction.BACKWARD, WeightSequence.constant(2.0), one_sided=True)
        a = np.array([1.0, -2.0, 0.5, 3.0, 0.25])
        x = LatticeVector(0, np.ravel(np.column_stack([a, np.zeros_like(a)])), one_sided=True)
        for n in (1, 2):
            image = apply_power(two_b, 2 * n, x)
            for j in range(a.size):
                self.assertEqual(image.at(2 * j + 1), 0)
                expected = 2.0 ** (2 * n) * (a[j + n] if j + n < a.size else 0.0)
                self.assertEqual(image.at(2 * j), expected)

    @given(shift_setups())
    @settings(deadline=None, max_examples=200)
    def test_matches_repeated_application(self, setup):
        T, k, v = setup
        oracle = repeated(lambda u: apply(T, u), k, v)
        fast = apply_power(T, k, v)
        self.assertEqual((fast.lo, fast.hi), (oracle.lo, oracle.hi))
        assert_allclose(fast.coeffs, oracle.coeffs, rtol=1e-12, atol=0)

    def test_long_support_matches_repeated_application(self):
        T = ShiftOperator(Direction.FORWARD, listed_weights(-40, np.linspace(0.2, 5.0, 90)))
        v = LatticeVector(-20, np.arange(1.0, 41.0))
        for k in (1, 3, 7, 40):
            oracle = repeated(lambda u: apply(T, u), k, v)
            assert_allclose(apply_power(T, k, v).coeffs, oracle.coeffs, rtol=1e-12, atol=0)
            inverse = repeated(lambda u: right_inverse_apply(T, u), k, v)
            assert_allclose(right_inverse_power_apply(T, k, v).coeffs, inverse.coeffs, rtol=1e-12, atol=0)

    def test_operator_power_dispatch(self):
        T2 = OperatorPower(self.T, 2)
        self.assertTrue(operator_power_apply(T2, 3, e(1)).allclose(apply_power(self.T, 6, e(1))))
        with self.assertRaises(DomainError):
            OperatorPower(self.T, 0)


class TestDiagonalPower(unittest.TestCase):
    def setUp(self):
        self.D = DiagonalOperator.from_pairs([(0, 0.5), (1, 2.0)])

    def test_examples(self):
        v = LatticeVector(0, [1, 1])
        self.assertIs(diagonal_power_apply(self.D, 0, v), v)
        self.assertTrue(diagonal_power_apply(self.D, 3, e(0)).allclose(e(0, 0.125)))
        self.assertTrue(diagonal_power_apply(self.D, 3, e(1)).allclose(e(1, 8.0)))

    def test_support_outside_eigenpairs(self):
        with self.assertRaises(DomainError):
            diagonal_power_apply(self.D, 1, e(5))

    def test_duplicate_indices_rejected(self):
        with self.assertRaises(DomainError):
            DiagonalOperator.from_pairs([(0, 0.5), (0, 2.0)])


class TestDuality(unittest.TestCase):
    def setUp(self):
        self.T = example3_shift()

    def test_flip_conjugates_forward_into_backward(self):
        backward = flip_conjugate(self.T)
        self.assertIs(backward.direction, Direction.BACKWARD)
        for n in range(-6, 7):
            conjugated = flip(apply(self.T, flip(e(n))))
            self.assertTrue(conjugated.allclose(apply(backward, e(n)), atol=1e-12))

    def test_flip_is_two_sided_only(self):
        with self.assertRaises(DomainError):
            flip(e(0, one_sided=True))

    def test_adjoint_matches_inner_products(self):
        T_star = adjoint(self.T)
        self.assertIs(T_star.direction, Direction.BACKWARD)
        for n in range(-4, 5):
            for m in range(-4, 5):
                left = seqspace.inner(apply(self.T, e(n)), e(m))
                right = seqspace.inner(e(n), apply(T_star, e(m)))
                self.assertAlmostEqual(left, right, places=14)

    def test_adjoint_of_adjoint(self):
        twice = adjoint(adjoint(self.T))
        grid = np.arange(-10, 11)
        assert_allclose(twice.weights.values(grid), self.T.weights.values(grid))
        self.assertIs(twice.direction, Direction.FORWARD)


class TestPhase(unittest.TestCase):
    def setUp(self):
        self.T = ShiftOperator(Direction.FORWARD, WeightSequence.split(0, 0.5, 3.0), phase=1j)

    def test_single_steps(self):
        self.assertTrue(apply(self.T, e(1)).allclose(e(2, 0.5j)))
        self.assertTrue(right_inverse_apply(self.T, e(1)).allclose(e(0, -2j)))
        v = LatticeVector(-2, [1, -1j, 2])
        self.assertTrue(apply(self.T, right_inverse_apply(self.T, v)).allclose(v))

    def test_powers_match_repeated_steps(self):
        v = LatticeVector(-3, [1, 2, -1, 0.5])
        for k in (1, 2, 5):
            oracle = repeated(lambda u: apply(self.T, u), k, v)
            assert_allclose(apply_power(self.T, k, v).coeffs, oracle.coeffs, rtol=1e-12)
            inverse = repeated(lambda u: right_inverse_apply(self.T, u), k, v)
            assert_allclose(right_inverse_power_apply(self.T, k, v).coeffs, inverse.coeffs, rtol=1e-12)

    def test_weight_products_ignore_the_phase(self):
        self.assertEqual(weight_product(self.T, 1, 2), 0.25)

    def test_adjoint_conjugates_the_phase(self):
        T_star = adjoint(self.T)
        self.assertEqual(T_star.phase, -1j)
        for n in range(-3, 4):
            for m in range(-3, 4):
                left = seqspace.inner(apply(self.T, e(n)), e(m))
                right = seqspace.inner(e(n), apply(T_star, e(m)))
                self.assertAlmostEqual(left, right, places=14)

    def test_config(self):
        block = {"weights": [{"if": "default", "w": 2}], "phase": [0, 1]}
        T = ShiftOperator.from_config(block)
        self.assertEqual(T.phase, 1j)
        self.assertEqual(T.to_config()["phase"], [0.0, 1.0])
        self.assertNotIn("phase", example3_shift().to_config())
        with self.assertRaises(ConfigurationError) as ctx:
            ShiftOperator.from_config(dict(block, phase=2))
        self.assertEqual(ctx.exception.field, "operator.phase")


if __name__ == '__main__':
    unittest.main()
