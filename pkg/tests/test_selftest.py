"""
Tests for the self-test suites and their mutations
"""

import unittest

from algebra.exceptions import InvalidRequest
from services.selftest_service import Mutation, run_selftest


class TestMutation(unittest.TestCase):

    def test_parse(self):
        self.assertIsNone(Mutation.parse(None))
        self.assertEqual(Mutation.parse('d:2'), Mutation('d', (2,)))
        self.assertEqual(Mutation.parse('a:1,2'), Mutation('a', (1, 2)))
        self.assertEqual(Mutation.parse('todd').to_text(), 'todd')

    def test_rejects_unknown(self):
        for text in ('d:0', 'a:0,1', 'e:1', 'todd:1'):
            with self.assertRaises(InvalidRequest):
                Mutation.parse(text)

    def test_rejects_rank_beyond_profile(self):
        """d:i needs a bundle of rank at least i"""
        with self.assertRaises(InvalidRequest):
            run_selftest('quick', mutate='d:9', suites=('chern',))

    def test_rejects_coefficient_beyond_profile(self):
        """a:i,j with i + j past max_degree would go unnoticed"""
        with self.assertRaises(InvalidRequest):
            run_selftest('quick', mutate='a:4,4', suites=('fgl',))
        with self.assertRaises(InvalidRequest):
            run_selftest('quick', mutate='a:3,3', suites=('rr',))

    def test_unknown_profile(self):
        with self.assertRaises(InvalidRequest):
            run_selftest('huge')


class TestSuites(unittest.TestCase):

    def test_quick_profile_passes(self):
        """Every suite is clean without a mutation"""
        results = run_selftest('quick', seed=7)
        self.assertEqual([result.name for result in results], ['ring_core', 'fgl', 'zeta', 'chern', 'rr'])
        for result in results:
            self.assertTrue(result.passed, '\n'.join(result.describe()))

    def test_seed_reproducible(self):
        first = run_selftest('quick', seed=3, suites=('ring_core',))
        second = run_selftest('quick', seed=3, suites=('ring_core',))
        self.assertEqual([c.to_dict() for c in first[0].checks], [c.to_dict() for c in second[0].checks])

    def test_relation_mutation(self):
        """A flipped d_1 fails the chern suite"""
        chern, = run_selftest('quick', mutate='d:1', suites=('chern',))
        self.assertFalse(chern.passed)
        self.assertIn('hyperplane_relation', {check.label for check in chern.failures})

    def test_specialization_mutation(self):
        """A flipped a_11 fails the specialization and the pushforward"""
        fgl, rr = run_selftest('quick', mutate='a:1,1', suites=('fgl', 'rr'))
        self.assertFalse(fgl.passed)
        self.assertIn('specialization', {check.label for check in fgl.failures})
        self.assertFalse(rr.passed)

    def test_higher_coefficient_mutation(self):
        """A flipped a_23 fails associativity in both suites"""
        fgl, rr = run_selftest('quick', mutate='a:2,3', suites=('fgl', 'rr'))
        self.assertFalse(fgl.passed)
        self.assertFalse(rr.passed)
        self.assertIn('associativity', {check.label for check in rr.failures})

    def test_full_profile_reaches_degree_eight(self):
        rr, = run_selftest('full', mutate='a:4,4', suites=('rr',))
        self.assertFalse(rr.passed)
        self.assertIn('associativity', {check.label for check in rr.failures})

    def test_todd_mutation(self):
        """A flipped Todd x^2 coefficient fails HRR"""
        rr, = run_selftest('quick', mutate='todd', suites=('rr',))
        self.assertFalse(rr.passed)
        self.assertIn('hrr', {check.label for check in rr.failures})


if __name__ == '__main__':
    unittest.main()
