"""
Tests for specialized theories: Conner-Floyd pushforwards, Todd classes,
Chern characters and Hirzebruch-Riemann-Roch
"""

import unittest
from fractions import Fraction
from math import comb

from hypothesis import given, settings
from hypothesis import strategies as st

from algebra.exceptions import NonIntegerResult, UnsupportedTheory, WrongLaw
from algebra.rings import RATIONALS
from services.chern_service import ChernContext, ProjectiveBundleContext, SplitBundle
from services.fgl_service import additive_law, multiplicative_law, perturb_law, universal_fgl
from services.rr_service import (
    PushforwardTable, SpecializedTheory, ToddData, cf_pushforward_check, chern_character_additive,
    chern_character_multiplicative, chern_character_ring_map_check, geom_fgl_specialization_check,
    geometric_ratio, hrr_projective_space, todd_class, unit_pushforward, verify_cf_product_expansion,
    verify_geometric_series_identity, verify_projection_formula
)


class TestTheories(unittest.TestCase):
    """Point classes and normalizations"""

    def test_normalizations(self):
        """Both closed-form theories match their logarithms"""
        self.assertTrue(SpecializedTheory.additive(5).check_normalization().passed)
        self.assertTrue(SpecializedTheory.multiplicative(5).check_normalization().passed)

    def test_universal_needs_table(self):
        """No closed-form table for the universal law"""
        with self.assertRaises(UnsupportedTheory):
            SpecializedTheory.for_law(universal_fgl(3).law)

    def test_unit_pushforward(self):
        """pi_!(1) of a trivial bundle is the class of projective space"""
        mult = SpecializedTheory.multiplicative(5)
        additive = SpecializedTheory.additive(5)
        for rank in range(1, 4):
            self.assertEqual(unit_pushforward(mult, rank).scalar_value(), 1)
            self.assertEqual(unit_pushforward(additive, rank).scalar_value(), 1 if rank == 1 else 0)

    def test_wrong_law(self):
        """A bundle over another law cannot be pushed forward"""
        theory = SpecializedTheory.multiplicative(5)
        pb = ProjectiveBundleContext(ChernContext(multiplicative_law(5), 1, 1))
        with self.assertRaises(WrongLaw):
            PushforwardTable.build(SpecializedTheory.additive(5), pb)
        self.assertEqual(len(PushforwardTable.build(theory, pb).values), 1)


class TestConnerFloyd(unittest.TestCase):
    """pi_!(t^i) = 1 in the multiplicative theory"""

    def test_cf_pushforward(self):
        """Every t^i below the rank pushes forward to 1"""
        theory = SpecializedTheory.multiplicative(5)
        for rank in (1, 2, 3):
            pb = ProjectiveBundleContext(theory.context(rank, 1))
            self.assertTrue(cf_pushforward_check(theory, pb).passed)

    def test_perturbed_law_detected(self):
        """A flipped a_11 breaks the pushforward values"""
        law = perturb_law(multiplicative_law(5), 1, 1)
        theory = SpecializedTheory.for_law(law, SpecializedTheory.multiplicative().normalization)
        pb = ProjectiveBundleContext(theory.context(2, 1))
        result = cf_pushforward_check(theory, pb)
        self.assertFalse(result.passed)

    def test_product_expansion(self):
        """t^i as a product of twisted sections"""
        pb = ProjectiveBundleContext(SpecializedTheory.multiplicative(5).context(2, 1))
        for i in range(3):
            self.assertTrue(verify_cf_product_expansion(pb, i).passed)

    def test_product_expansion_needs_multiplicative(self):
        """The expansion is specific to x + y - xy"""
        pb = ProjectiveBundleContext(ChernContext(additive_law(5), 1, 1))
        with self.assertRaises(WrongLaw):
            verify_cf_product_expansion(pb, 1)

    def test_projection_formula(self):
        """pi_!(pi^* a alpha) = a pi_!(alpha)"""
        theory = SpecializedTheory.multiplicative(5)
        ctx = theory.context(2, 1)
        pb = ProjectiveBundleContext(ctx)
        a = ctx.element('x1 + 2*x2')
        alpha = pb.t().power(3)
        self.assertTrue(verify_projection_formula(theory, pb, a, alpha).passed)

    def test_geometric_fgl(self):
        """The law is recovered from classes of projective bundles"""
        self.assertTrue(geom_fgl_specialization_check(SpecializedTheory.multiplicative(5), 1).passed)
        self.assertTrue(geom_fgl_specialization_check(SpecializedTheory.additive(5), 1).passed)


class TestSeriesIdentities(unittest.TestCase):
    """Geometric series and Todd series"""

    def test_geometric_series(self):
        """sum (-x/(1 - x))^i = 1 - x"""
        self.assertTrue(verify_geometric_series_identity(12).passed)

    def test_perturbed_ratio(self):
        """-x/(1 + x) fails at degree 2"""
        result = verify_geometric_series_identity(6, geometric_ratio(6, perturbed=True))
        self.assertFalse(result.passed)
        self.assertEqual(result.witness.degree, 2)

    def test_todd_coefficients(self):
        """x/(1 - exp(-x)) = 1 + x/2 + x^2/12 - x^4/720"""
        coefficients = ToddData(4).coefficients()
        expected = [Fraction(1), Fraction(1, 2), Fraction(1, 12), Fraction(0), Fraction(-1, 720)]
        self.assertEqual(coefficients, [RATIONALS.convert(value) for value in expected])

    def test_todd_multiplicative(self):
        """Td(E' + E'') = Td(E') Td(E'')"""
        ctx = SpecializedTheory.additive(5).context(3, 1)
        whole = todd_class(ctx)
        split = todd_class(ctx, SplitBundle.of_roots(ctx, [1])).mul(todd_class(ctx, SplitBundle.of_roots(ctx, [2, 3])))
        self.assertEqual(whole, split)

    def test_todd_needs_rationals(self):
        """Todd classes live over QQ"""
        with self.assertRaises(UnsupportedTheory):
            todd_class(ChernContext(multiplicative_law(4), 1, 1))


class TestChernCharacter(unittest.TestCase):
    """ch as a ring map on line bundles"""

    def test_multiplicative_character(self):
        """ch(L1 (x) L2) = ch(L1) ch(L2)"""
        ctx = SpecializedTheory.multiplicative(5).context(2, 2)
        self.assertTrue(chern_character_ring_map_check(ctx).passed)

    def test_additive_character(self):
        """Exponential realization over QQ"""
        ctx = SpecializedTheory.additive(5).context(2, 2)
        self.assertTrue(chern_character_ring_map_check(ctx, chern_character_additive).passed)

    def test_character_of_line(self):
        """ch(L) = 1 - e(L dual) = 1 + x + x^2 with x^3 = 0"""
        ctx = SpecializedTheory.multiplicative(5).context(1, 2)
        self.assertEqual(chern_character_multiplicative(ctx), ctx.element('1 + x1 + x1^2'))


class TestHirzebruchRiemannRoch(unittest.TestCase):
    """chi(P^n, O(d)) = binomial(n + d, n)"""

    def test_examples(self):
        """Small known values"""
        self.assertEqual(hrr_projective_space(1, 1), 2)
        self.assertEqual(hrr_projective_space(3, 2), 10)
        self.assertEqual(hrr_projective_space(0, 7), 1)

    @given(st.integers(0, 3), st.integers(0, 4))
    @settings(max_examples=15, deadline=None)
    def test_binomial(self, n, d):
        """HRR agrees with the binomial count of monomials"""
        self.assertEqual(hrr_projective_space(n, d), comb(n + d, n))

    def test_perturbed_todd(self):
        """A flipped x^2 Todd coefficient makes chi(P^2, O(0)) equal 1/2"""
        with self.assertRaises(NonIntegerResult):
            hrr_projective_space(2, 0, ToddData(2, perturbed=True))


if __name__ == '__main__':
    unittest.main()
