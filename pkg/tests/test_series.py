"""
Tests for coefficient rings and truncated power series
"""

import unittest
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from algebra.exceptions import (
    DivergentSubstitution, IntegralityFailure, NotAUnit, PrecisionTooLow, RingMismatch,
    SeriesParseError, UngradedRing, VariableMismatch
)
from algebra.rings import INTEGERS, RATIONALS, parse_ring
from algebra.series import (
    ExponentVector, Series, compare, compositional_inverse, graded_component, invert_unit, substitute
)

XY = ('x', 'y')
LAZARD = parse_ring('ZZ[b1,b2,b3]')
PROPERTY_PRECISION = 5


def lazard_coefficient(parts):
    """Sum of scalar * b_k, with k = 0 standing for the constant 1"""
    value = LAZARD.zero
    for scalar, index in parts:
        term = LAZARD.convert(scalar)
        if index:
            term = LAZARD.mul(term, LAZARD.gen(f"b{index}"))
        value = LAZARD.add(value, term)
    return value


COEFFICIENTS = {
    INTEGERS.name: st.integers(-5, 5),
    LAZARD.name: st.lists(st.tuples(st.integers(-3, 3), st.integers(0, 3)), max_size=3).map(lazard_coefficient),
}

rings_strategy = st.sampled_from((INTEGERS, LAZARD))


def series_over(ring, precision=PROPERTY_PRECISION):
    terms = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), COEFFICIENTS[ring.name], max_size=6)
    return terms.map(lambda t: Series(ring, XY, t, precision))


def tail_over(ring):
    """x + c2 x^2 + c3 x^3 + c4 x^4 in one variable"""
    def build(coefficients):
        terms = {(k + 2,): c for k, c in enumerate(coefficients)}
        terms[(1,)] = ring.one
        return Series(ring, ('x',), terms, PROPERTY_PRECISION)

    return st.lists(COEFFICIENTS[ring.name], min_size=3, max_size=3).map(build)


single_series = rings_strategy.flatmap(series_over)
series_pairs = rings_strategy.flatmap(lambda ring: st.tuples(series_over(ring), series_over(ring)))
series_triples = rings_strategy.flatmap(
    lambda ring: st.tuples(series_over(ring), series_over(ring), series_over(ring)))
precisions_strategy = st.one_of(st.none(), st.integers(0, 6))
mixed_precision_pairs = st.tuples(rings_strategy, precisions_strategy, precisions_strategy).flatmap(
    lambda args: st.tuples(series_over(args[0], args[1]), series_over(args[0], args[2])))


class TestRings(unittest.TestCase):
    """Ring names and conversions"""

    def test_parse_ground_rings(self):
        """ZZ and QQ parse to the shared instances"""
        self.assertIs(parse_ring('ZZ'), INTEGERS)
        self.assertIs(parse_ring('QQ'), RATIONALS)

    def test_parse_polynomial_and_quotient(self):
        """Polynomial and quotient ring names round-trip"""
        self.assertEqual(parse_ring('ZZ[b1,b2]').name, 'ZZ[b1,b2]')
        self.assertEqual(parse_ring('ZZ[e]/(e^2)').name, 'ZZ[e]/(e^2)')

    def test_unknown_ring(self):
        """Unreadable ring names raise SeriesParseError"""
        with self.assertRaises(SeriesParseError):
            parse_ring('RR')

    def test_integrality(self):
        """A surviving denominator cannot come back to ZZ"""
        with self.assertRaises(IntegralityFailure):
            INTEGERS.from_rational(Fraction(1, 2))


class TestSeriesBasics(unittest.TestCase):
    """Construction, text, precision and frames"""

    def test_text_round_trip(self):
        """Canonical text parses back to the same series"""
        a = Series.parse('1 + x - 2*x*y + 3*y^2', XY)
        self.assertEqual(Series.parse(a.to_text(), XY, INTEGERS), a)

    def test_json_round_trip(self):
        """JSON keeps ring, frame, caps and precision"""
        a = Series.parse('x - b1*x*y', XY, parse_ring('ZZ[b1]'), precision=4)
        self.assertEqual(Series.from_json(a.to_json()), a)

    def test_product_precision(self):
        """Multiplying by x raises the known degree by one"""
        a = Series.parse('1 + x', ('x',), precision=3)
        product = a.mul(Series.parse('x', ('x',)))
        self.assertEqual(product.precision, 4)
        self.assertEqual(product, Series.parse('x + x^2', ('x',), precision=4))

    def test_caps_make_series_exact(self):
        """Precision at least the sum of the caps means exact"""
        a = Series.parse('x*y', XY, precision=2, caps={'x': 1, 'y': 1})
        self.assertTrue(a.is_exact)

    def test_caps_drop_terms(self):
        """Terms beyond a cap are zero"""
        x = Series.variable(INTEGERS, 'x', ('x',), caps={'x': 2})
        self.assertTrue(x.power(3).is_zero())

    def test_ring_mismatch(self):
        """Series over different rings do not mix"""
        with self.assertRaises(RingMismatch):
            Series.parse('x', ('x',), RATIONALS).add(Series.parse('x', ('x',), INTEGERS))

    def test_variable_mismatch(self):
        """Series in different frames do not mix"""
        with self.assertRaises(VariableMismatch):
            Series.parse('x', ('x',)).add(Series.parse('y', ('y',)))

    def test_coefficient_beyond_precision(self):
        """Unknown coefficients are not silently zero"""
        a = Series.parse('x', ('x',), precision=2)
        with self.assertRaises(PrecisionTooLow):
            a.coefficient((3,))

    def test_exponent_vector_indicator(self):
        """Subset bitmasks become 0/1 exponent vectors"""
        self.assertEqual(ExponentVector.indicator(0b101, 3), (1, 0, 1))
        self.assertEqual(ExponentVector((1, 0, 1)).mask, 0b101)

    def test_coefficient_series(self):
        """Coefficient of y^1 loses one degree of precision"""
        a = Series.parse('x*y + 2*y + x^2', XY, precision=4)
        c = a.coefficient_series('y', 1)
        self.assertEqual(c.variables, ('x',))
        self.assertEqual(c.precision, 3)
        self.assertEqual(c, Series.parse('2 + x', ('x',), precision=3))

    def test_integrate_needs_rationals(self):
        """Integration over ZZ fails on x"""
        with self.assertRaises(IntegralityFailure):
            Series.parse('x', ('x',)).integrate('x')
        integral = Series.parse('x', ('x',), RATIONALS).integrate('x')
        self.assertEqual(integral.coefficient((2,)), RATIONALS.convert(Fraction(1, 2)))


class TestSeriesOperations(unittest.TestCase):
    """Inverses, substitution and comparison"""

    def test_invert_unit(self):
        """1/(1 - x) is the geometric series"""
        inverse = invert_unit(Series.parse('1 - x', ('x',)), 4)
        self.assertEqual(inverse, Series.parse('1 + x + x^2 + x^3 + x^4', ('x',), precision=4))

    def test_invert_unit_capped_is_exact(self):
        """With x^3 = 0 the inverse is an exact polynomial"""
        a = Series.parse('1 - x', ('x',), caps={'x': 2})
        inverse = invert_unit(a)
        self.assertTrue(inverse.is_exact)
        self.assertEqual(inverse, Series.parse('1 + x + x^2', ('x',), caps={'x': 2}))

    def test_invert_exact_uncapped_needs_precision(self):
        """An exact inverse would be infinite"""
        with self.assertRaises(PrecisionTooLow):
            invert_unit(Series.parse('1 - x', ('x',)))

    def test_invert_non_unit(self):
        """2 + x has no inverse over ZZ"""
        with self.assertRaises(NotAUnit):
            invert_unit(Series.parse('2 + x', ('x',)), 3)

    def test_compositional_inverse(self):
        """Reversion of x + x^2"""
        g = compositional_inverse(Series.parse('x + x^2', ('x',)), 4)
        self.assertEqual(g, Series.parse('x - x^2 + 2*x^3 - 5*x^4', ('x',), precision=4))

    def test_substitute_divergent(self):
        """A constant term cannot be substituted into a truncated series"""
        target = Series.parse('x', ('x',), precision=3)
        with self.assertRaises(DivergentSubstitution):
            substitute(target, {'x': Series.parse('1 + x', ('x',))})

    def test_substitute_into_two_variables(self):
        """x + y with x -> x^2 and y -> x"""
        target = Series.parse('x + y', XY)
        x = Series.parse('x', ('x',))
        result = substitute(target, {'x': x.mul(x), 'y': x})
        self.assertEqual(result, Series.parse('x + x^2', ('x',)))

    def test_compare_witness(self):
        """The first differing monomial is reported with both coefficients"""
        result = compare(Series.parse('x + 2*x^2', ('x',)), Series.parse('x + 3*x^2', ('x',)), 'demo')
        self.assertFalse(result.passed)
        self.assertEqual(result.witness.location, 'x^2')
        self.assertEqual(result.witness.degree, 2)
        self.assertEqual((result.witness.lhs, result.witness.rhs), ('2', '3'))

    def test_graded_component(self):
        """Monomials of total degree two"""
        a = Series.parse('1 + x + x*y + y^2', XY)
        self.assertEqual(graded_component(a, 2), Series.parse('x*y + y^2', XY))

    def test_graded_component_quotient_ring(self):
        """Quotient rings carry no grading"""
        ring = parse_ring('ZZ[e]/(e^2)')
        with self.assertRaises(UngradedRing):
            graded_component(Series.parse('x', ('x',), ring), 1)


class TestSeriesProperties(unittest.TestCase):
    """Ring laws, inverses and stable encodings on random series over ZZ and ZZ[b1,b2,b3]"""

    @given(series_pairs)
    @settings(max_examples=1000, deadline=None)
    def test_commutative_product(self, pair):
        """a b = b a"""
        a, b = pair
        self.assertEqual(a.mul(b), b.mul(a))

    @given(series_triples)
    @settings(max_examples=1000, deadline=None)
    def test_associative_product(self, triple):
        """(a b) c = a (b c) within the known degrees"""
        a, b, c = triple
        self.assertTrue(compare(a.mul(b).mul(c), a.mul(b.mul(c))).passed)

    @given(series_triples)
    @settings(max_examples=1000, deadline=None)
    def test_distributive(self, triple):
        """a (b + c) = a b + a c within the known degrees"""
        a, b, c = triple
        self.assertTrue(compare(a.mul(b.add(c)), a.mul(b).add(a.mul(c))).passed)

    @given(mixed_precision_pairs)
    @settings(max_examples=1000, deadline=None)
    def test_product_precision_bound(self, pair):
        """A product is known at least as far as the less precise factor"""
        a, b = pair
        product = a.mul(b)
        known = [p for p in (a.precision, b.precision) if p is not None]
        if not known:
            self.assertIsNone(product.precision)
        elif product.precision is not None:
            self.assertGreaterEqual(product.precision, min(known))

    @given(single_series, st.integers(0, 6))
    @settings(max_examples=1000, deadline=None)
    def test_truncation_monotone(self, a, n):
        """Truncation never raises precision"""
        truncated = a.truncate(n)
        self.assertLessEqual(truncated.precision, min(n, a.precision))
        self.assertTrue(compare(a, truncated).passed)

    @given(single_series, st.sampled_from((1, -1)))
    @settings(max_examples=1000, deadline=None)
    def test_invert_unit(self, a, sign):
        """u * u^-1 = 1 for every unit constant term"""
        terms = a.terms
        terms[(0, 0)] = a.ring.convert(sign)
        u = Series(a.ring, XY, terms, a.precision)
        self.assertTrue(compare(u.mul(invert_unit(u, PROPERTY_PRECISION)), u.one_like()).passed)

    @given(rings_strategy.flatmap(tail_over))
    @settings(max_examples=1000, deadline=None)
    def test_compositional_inverse(self, f):
        """f(g(x)) = x = g(f(x))"""
        g = compositional_inverse(f, PROPERTY_PRECISION)
        x = f.var('x')
        self.assertTrue(compare(substitute(f, {'x': g}), x).passed)
        self.assertTrue(compare(substitute(g, {'x': f}), x).passed)

    @given(single_series)
    @settings(max_examples=1000, deadline=None)
    def test_text_stable(self, a):
        """Parsing canonical text gives the same series"""
        self.assertEqual(Series.parse(a.to_text(), XY, a.ring, precision=PROPERTY_PRECISION), a)

    @given(single_series)
    @settings(max_examples=1000, deadline=None)
    def test_json_stable(self, a):
        """from_json(to_json(a)) = a"""
        self.assertEqual(Series.from_json(a.to_json()), a)


if __name__ == '__main__':
    unittest.main()
