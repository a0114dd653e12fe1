"""
Tests for formal group laws, the Lazard model and specializations
"""

import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from algebra.exceptions import AxiomViolation
from algebra.rings import INTEGERS
from algebra.series import Series, compare
from services.fgl_service import (
    TheoryNormalization, additive_law, fgl_from_series, law_by_name, multiplicative_law,
    perturb_law, specialize_a, universal_fgl
)


def x_series(text, precision=None):
    return Series.parse(text, ('x',), INTEGERS, precision=precision)


class TestNamedLaws(unittest.TestCase):
    """Additive and multiplicative laws"""

    def test_additive_inverse(self):
        """inv(x) = -x exactly"""
        self.assertEqual(additive_law(6).inverse_series, x_series('-x'))

    def test_multiplicative_inverse(self):
        """inv(x) = -x/(1 - x) to the working degree"""
        inverse = multiplicative_law(4).inverse_series
        self.assertTrue(compare(inverse, x_series('-x - x^2 - x^3 - x^4', 4)).passed)

    def test_multiplicative_nseries(self):
        """[3]x = 1 - (1 - x)^3"""
        self.assertEqual(multiplicative_law(6).n_series(3), x_series('3*x - 3*x^2 + x^3'))

    def test_negative_nseries(self):
        """[-1]x is the inverse"""
        law = additive_law(5)
        self.assertEqual(law.n_series(-1), law.inverse_series)

    def test_zero_nseries(self):
        """[0]x = 0"""
        self.assertTrue(multiplicative_law(5).n_series(0).is_zero())

    def test_multiplicative_logarithm(self):
        """log of the multiplicative law is -log(1 - x)"""
        law = multiplicative_law(5)
        self.assertTrue(TheoryNormalization.multiplicative().check(law).passed)
        self.assertTrue(TheoryNormalization.additive().check(additive_law(5)).passed)

    def test_law_by_name(self):
        """Named laws resolve and unknown names are rejected"""
        self.assertEqual(law_by_name('mult', 4).name, 'mult')
        self.assertEqual(law_by_name('univ', 3).ring.name, 'ZZ[b1,b2]')
        with self.assertRaises(ValueError):
            law_by_name('nope', 4)

    @given(st.integers(1, 3), st.integers(1, 3))
    @settings(max_examples=9, deadline=None)
    def test_nseries_composition(self, m, n):
        """[m]([n]x) = [mn]x"""
        law = multiplicative_law(8)
        self.assertEqual(law.multiply(m, law.n_series(n)), law.n_series(m * n))


class TestAxioms(unittest.TestCase):
    """Validation of user supplied laws"""

    def test_axiom_order(self):
        """x + y + x^2 y fails commutativity at degree 3"""
        F = Series.parse('x + y + x^2*y', ('x', 'y'))
        with self.assertRaises(AxiomViolation) as caught:
            fgl_from_series(F, precision=4)
        self.assertEqual(caught.exception.axiom, 'commutativity')
        self.assertEqual(caught.exception.degree, 3)

    def test_unitality_failure(self):
        """x + 2y is not unital"""
        with self.assertRaises(AxiomViolation) as caught:
            fgl_from_series(Series.parse('x + 2*y', ('x', 'y')), precision=3)
        self.assertEqual(caught.exception.axiom, 'unitality')

    def test_valid_series(self):
        """x + y + xy is a law"""
        law = fgl_from_series(Series.parse('x + y + x*y', ('x', 'y')), precision=5)
        self.assertTrue(all(result.passed for result in law.axiom_results()))

    def test_perturbed_law(self):
        """Perturbation negates a nonzero a_ij without validating"""
        law = perturb_law(multiplicative_law(4), 1, 1)
        self.assertEqual(law.name, 'mult*')
        self.assertEqual(law.coefficient(1, 1), INTEGERS.convert(1))


class TestUniversalLaw(unittest.TestCase):
    """Universal law over ZZ[b1, b2, ...]"""

    def test_degree_two(self):
        """F = x + y - 2 b1 x y + ..."""
        model = universal_fgl(2)
        ring = model.ring
        expected = ring.mul(ring.convert(-2), ring.gen('b1'))
        self.assertTrue(ring.equal(model.a(1, 1), expected))

    def test_axioms(self):
        """The universal law satisfies every axiom"""
        model = universal_fgl(4)
        for result in model.law.axiom_results():
            self.assertTrue(result.passed, result.describe())

    def test_homogeneous(self):
        """F has cohomological degree 1"""
        self.assertTrue(universal_fgl(5).F.is_homogeneous(1))

    def test_logarithm(self):
        """ell(F(x, y)) = ell(x) + ell(y)"""
        self.assertTrue(universal_fgl(4).verify_logarithm().passed)

    def test_universal_normalization(self):
        """[P^n] = (n + 1) b_n in the Lazard model"""
        model = universal_fgl(4)
        self.assertTrue(TheoryNormalization.universal(model).check(model.law).passed)

    def test_specializations(self):
        """The classifying maps send a_ij to the target coefficients"""
        model = universal_fgl(5)
        self.assertTrue(specialize_a(model, multiplicative_law(5)).verify().passed)
        self.assertTrue(specialize_a(model, additive_law(5)).verify().passed)

    def test_specialized_law(self):
        """Specializing F coefficientwise gives the target law"""
        model = universal_fgl(4)
        target = multiplicative_law(4)
        hom = specialize_a(model, target)
        self.assertTrue(compare(hom.apply_series(model.F), target.F.truncate(4)).passed)

    def test_flipped_a_image_detected(self):
        """A wrong a_ij image fails with label specialization"""
        model = universal_fgl(4)
        hom = specialize_a(model, multiplicative_law(4))
        hom.a_images[(1, 1)] = INTEGERS.neg(hom.a_images[(1, 1)])
        result = hom.verify()
        self.assertFalse(result.passed)
        self.assertEqual(result.witness.label, 'specialization')


class TestUniversalLawDegreeEight(unittest.TestCase):
    """Universal law at degree 8"""

    @classmethod
    def setUpClass(cls):
        cls.model = universal_fgl(8)
        cls.law = cls.model.law

    def test_integral(self):
        """Every a_ij lies in ZZ[b1, ..., b7]"""
        ring = self.model.ring
        self.assertEqual(ring.base, 'ZZ')
        coefficients = self.law.coefficients()
        self.assertEqual(max(i + j for i, j in coefficients), 8)
        for (i, j), value in coefficients.items():
            self.assertNotIn('/', ring.to_text(value), f"a[{i},{j}]")

    def test_axioms(self):
        for result in self.law.axiom_results():
            self.assertTrue(result.passed, result.describe())

    def test_nseries_additive(self):
        """[m + n](x) = F([m](x), [n](x)) for |m|, |n| <= 4"""
        law = self.law
        for m in range(-4, 5):
            for n in range(-4, 5):
                result = compare(law.apply(law.n_series(m), law.n_series(n)), law.n_series(m + n), f"[{m}+{n}]")
                self.assertTrue(result.passed, result.describe())

    def test_inverse_involution(self):
        """inv(inv(x)) = x"""
        law = self.law
        self.assertTrue(compare(law.invert(law.inverse_series), law.x()).passed)


if __name__ == '__main__':
    unittest.main()
