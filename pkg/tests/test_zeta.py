"""
Tests for the subset decomposition of formal sums
"""

import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from algebra.exceptions import NonPositiveMultiplicity, NotEnoughDivisors, TooManyDivisors
from algebra.series import Series
from services.fgl_service import additive_law, multiplicative_law, universal_fgl
from services.zeta_service import (
    decompose, specialization_commutes, verify_inductive_splitting, verify_single_divisor_identity
)
from utils.helpers import subset_mask


class TestDecompose(unittest.TestCase):
    """Components F_I"""

    def test_additive_two_divisors(self):
        """x1 + x2 splits into F_{1} = 1, F_{2} = 1, F_{1,2} = 0"""
        decomposition = decompose(additive_law(6), [1, 1])
        one = decomposition.total.one_like()
        self.assertEqual(decomposition.component(subset_mask([1])).terms, one.terms)
        self.assertEqual(decomposition.component(subset_mask([2])).terms, one.terms)
        self.assertTrue(decomposition.component(subset_mask([1, 2])).is_zero())

    def test_multiplicative_two_divisors(self):
        """x1 + x2 - x1 x2 has F_{1,2} = -1"""
        decomposition = decompose(multiplicative_law(6), [1, 1])
        self.assertEqual(decomposition.component(3).constant_term(), -1)
        self.assertEqual(len(decomposition.component(3)), 1)

    def test_own_variables(self):
        """Components can be read in the variables of their subset"""
        decomposition = decompose(multiplicative_law(6), [2, 1])
        component = decomposition.component_in_own_variables(1)
        self.assertEqual(component.variables, ('x1',))
        self.assertEqual(component, Series.parse('2 - x1', ('x1',), precision=5))

    def test_reassembly(self):
        """sum over I of x^I F_I gives back the formal sum"""
        decomposition = decompose(universal_fgl(5).law, [2, 3])
        self.assertTrue(decomposition.check_reassembly().passed)

    def test_payload_keys(self):
        """JSON components are keyed by subset"""
        payload = decompose(additive_law(4), [1, 1]).to_payload()
        self.assertEqual(sorted(payload['components']), ['{1,2}', '{1}', '{2}'])
        self.assertEqual(payload['multiplicities'], [1, 1])

    def test_zero_multiplicity(self):
        """Zero multiplicities are never allowed"""
        with self.assertRaises(NonPositiveMultiplicity):
            decompose(additive_law(4), [1, 0])

    def test_negative_multiplicity(self):
        """Negative multiplicities need opting in"""
        with self.assertRaises(NonPositiveMultiplicity):
            decompose(multiplicative_law(4), [-1])
        decomposition = decompose(multiplicative_law(4), [-1], allow_negative=True)
        self.assertTrue(decomposition.check_reassembly().passed)

    def test_too_many_divisors(self):
        """More divisors than subset bits"""
        with self.assertRaises(TooManyDivisors):
            decompose(additive_law(2), [1] * 17)

    def test_threads_agree(self):
        """Parallel extraction gives the same components"""
        law = multiplicative_law(6)
        serial = decompose(law, [1, 2, 1])
        parallel = decompose(law, [1, 2, 1], threads=3)
        for mask in serial.masks():
            self.assertEqual(serial.component(mask), parallel.component(mask))


class TestIdentities(unittest.TestCase):
    """Single divisor, splitting and specialization"""

    def test_single_divisor(self):
        """x F_{1}(x) = [m]x"""
        for m in range(1, 4):
            self.assertTrue(verify_single_divisor_identity(multiplicative_law(6), m).passed)
        self.assertTrue(verify_single_divisor_identity(universal_fgl(5).law, 2).passed)

    def test_splitting(self):
        """Components avoiding divisor 1 come from the smaller sum"""
        self.assertTrue(verify_inductive_splitting(multiplicative_law(6), [2, 3]).passed)
        self.assertTrue(verify_inductive_splitting(universal_fgl(5).law, [1, 1, 1]).passed)

    def test_splitting_needs_two(self):
        """One divisor cannot be split"""
        with self.assertRaises(NotEnoughDivisors):
            verify_inductive_splitting(additive_law(4), [2])

    def test_specialization(self):
        """Decomposition commutes with the classifying map"""
        self.assertTrue(specialization_commutes(universal_fgl(5), multiplicative_law(5), [1, 2]).passed)

    @given(st.lists(st.integers(1, 3), min_size=1, max_size=3))
    @settings(max_examples=10, deadline=None)
    def test_reassembly_property(self, multiplicities):
        """Reassembly holds for any positive multiplicities"""
        self.assertTrue(decompose(multiplicative_law(5), multiplicities).check_reassembly().passed)


if __name__ == '__main__':
    unittest.main()
