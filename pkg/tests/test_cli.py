"""
Tests for the command line: output formats, exit codes and usage errors
"""

import json
import os
import tempfile
import unittest

from click.testing import CliRunner

from app import create_app


class CliTestCase(unittest.TestCase):
    """Invokes the root group with stdout and stderr kept apart"""

    def setUp(self):
        try:
            self.runner = CliRunner(mix_stderr=False)
        except TypeError:
            # click 8.2 keeps stderr apart and dropped the flag
            self.runner = CliRunner()
        self.app = create_app()

    def invoke(self, *args, env=None):
        return self.runner.invoke(self.app, list(args), env=env)

    def invoke_json(self, *args):
        result = self.invoke(*args, '--json')
        self.assertEqual(result.exit_code, 0, result.stderr)
        return json.loads(result.stdout)


class TestFglCommands(CliTestCase):

    def test_universal_json(self):
        """Degree two coefficient of the universal law"""
        data = self.invoke_json('fgl', 'universal', '--degree', '2')
        self.assertEqual(data['command'], 'fgl universal')
        self.assertIn({'exps': [1, 1], 'coeff': '-2*b1'}, data['result']['series']['terms'])
        self.assertTrue(data['passed'])

    def test_nseries_text(self):
        result = self.invoke('fgl', 'nseries', '--law', 'mult', '--n', '3')
        self.assertEqual(result.exit_code, 0)
        self.assertTrue(result.stdout.startswith('[3]x ='))

    def test_nseries_needs_n(self):
        result = self.invoke('fgl', 'nseries', '--law', 'mult')
        self.assertEqual(result.exit_code, 2)

    def test_check_reports_violation(self):
        """A non-commutative series fails with its witness on stderr"""
        result = self.invoke('fgl', 'check', '--law', 'x + y + x^2*y', '--degree', '4')
        self.assertEqual(result.exit_code, 1)
        self.assertIn('commutativity', result.stderr)

    def test_inverse_of_invalid_law(self):
        """Commands other than check validate the law first"""
        result = self.invoke('fgl', 'inverse', '--law', 'x + y + x^2*y', '--degree', '4')
        self.assertEqual(result.exit_code, 1)
        self.assertIn('Error:', result.stderr)

    def test_unreadable_law(self):
        result = self.invoke('fgl', 'inverse', '--law', 'x +* y')
        self.assertEqual(result.exit_code, 2)

    def test_zero_degree(self):
        result = self.invoke('fgl', 'universal', '--degree', '0')
        self.assertEqual(result.exit_code, 2)

    def test_missing_law_file(self):
        result = self.invoke('fgl', 'inverse', '--law-file', os.path.join(tempfile.gettempdir(), 'no-such-law.json'))
        self.assertEqual(result.exit_code, 2)

    def test_law_file(self):
        """A law saved as JSON is read back and validated"""
        source = self.invoke_json('fgl', 'nseries', '--law', 'mult', '--n', '1', '--degree', '4')
        law = {'ring': 'ZZ', 'vars': ['x', 'y'], 'precision': None,
               'terms': [{'exps': [1, 0], 'coeff': '1'}, {'exps': [0, 1], 'coeff': '1'},
                         {'exps': [1, 1], 'coeff': '-1'}]}
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'mult.json')
            with open(path, 'w', encoding='utf-8') as handle:
                json.dump(law, handle)
            data = self.invoke_json('fgl', 'nseries', '--law-file', path, '--n', '1', '--degree', '4')
        self.assertEqual(data['result']['series'], source['result']['series'])

    def test_bad_environment_default(self):
        """A malformed COBCALC_DEFAULT_DEGREE is a usage error"""
        result = self.invoke('fgl', 'inverse', '--law', 'mult', env={'COBCALC_DEFAULT_DEGREE': 'abc'})
        self.assertEqual(result.exit_code, 2)


class TestZetaCommands(CliTestCase):

    def test_decompose_json(self):
        """x1 + x2 has components keyed {1}, {2} and {1,2}"""
        data = self.invoke_json('zeta', 'decompose', '--law', 'add', '--mult', '1,1')
        self.assertEqual(sorted(data['result']['components']), ['{1,2}', '{1}', '{2}'])

    def test_zero_multiplicity(self):
        result = self.invoke('zeta', 'decompose', '--law', 'add', '--mult', '0')
        self.assertEqual(result.exit_code, 2)

    def test_negative_multiplicity_opt_in(self):
        refused = self.invoke('zeta', 'decompose', '--law', 'mult', '--mult', '-1')
        self.assertEqual(refused.exit_code, 2)
        accepted = self.invoke('zeta', 'decompose', '--law', 'mult', '--mult', '-1', '--allow-negative')
        self.assertEqual(accepted.exit_code, 0, accepted.stderr)

    def test_verify_splitting(self):
        result = self.invoke('zeta', 'verify', '--law', 'mult', '--mult', '1,2', '--check', 'splitting')
        self.assertEqual(result.exit_code, 0, result.stderr)


class TestChernCommands(CliTestCase):

    def test_pbf_deterministic(self):
        """Identical requests give byte-identical JSON"""
        args = ('chern', 'pbf', '--law', 'mult', '--ranks', '2', '--caps', '1', '--json')
        first, second = self.invoke(*args), self.invoke(*args)
        self.assertEqual(first.exit_code, 0, first.stderr)
        self.assertEqual(first.stdout, second.stdout)

    def test_whitney_needs_both_ranks(self):
        result = self.invoke('chern', 'whitney', '--law', 'mult', '--r1', '1')
        self.assertEqual(result.exit_code, 2)

    def test_matrix(self):
        result = self.invoke('chern', 'matrix', '--law', 'mult', '--ranks', '2', '--caps', '1')
        self.assertEqual(result.exit_code, 0, result.stderr)


class TestRrCommands(CliTestCase):

    def test_hrr_text(self):
        """chi(P^0, O(7)) = 1"""
        result = self.invoke('rr', 'hrr', '--n', '0', '--d', '7')
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.stdout.strip(), '1')

    def test_hrr_json(self):
        data = self.invoke_json('rr', 'hrr', '--n', '3', '--d', '2')
        self.assertEqual(data['result']['chi'], '10')

    def test_cf_push(self):
        result = self.invoke('rr', 'cf-push', '--ranks', '2', '--caps', '1')
        self.assertEqual(result.exit_code, 0, result.stderr)
        self.assertIn('pi_!(t^1) = 1', result.stdout)

    def test_geometric_series_identity(self):
        result = self.invoke('rr', 'identity', 'geometric-series', '--degree', '10')
        self.assertEqual(result.exit_code, 0, result.stderr)


class TestSelftestCommand(CliTestCase):

    def test_unknown_mutation(self):
        result = self.invoke('selftest', '--mutate', 'x:1')
        self.assertEqual(result.exit_code, 2)

    def test_relation_mutation_detected(self):
        """Flipping d_1 fails the hyperplane relation"""
        result = self.invoke('selftest', '--mutate', 'd:1')
        self.assertEqual(result.exit_code, 1)
        self.assertIn('hyperplane_relation', result.stderr)

    def test_mutation_beyond_profile_degree(self):
        """a:4,4 has degree 8, past the quick profile"""
        result = self.invoke('selftest', '--mutate', 'a:4,4')
        self.assertEqual(result.exit_code, 2)


if __name__ == '__main__':
    unittest.main()
