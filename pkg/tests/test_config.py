"""
Tests for environment selection, settings and configuration validation
"""

import os
import unittest
from unittest import mock

from config import (
    DevelopmentConfig, ProductionConfig, TestingConfig, get_calculator_rule, get_config, get_setting,
    is_feature_enabled, validate_config
)


class TestConfigSelection(unittest.TestCase):

    def test_environment_classes(self):
        for env, expected in (('testing', TestingConfig), ('development', DevelopmentConfig),
                              ('production', ProductionConfig), ('unknown', ProductionConfig)):
            with mock.patch.dict(os.environ, {'COBCALC_ENV': env}):
                self.assertIs(get_config(), expected)

    def test_features(self):
        with mock.patch.dict(os.environ, {'COBCALC_ENV': 'testing'}):
            self.assertFalse(is_feature_enabled('parallel_subsets'))
            self.assertTrue(is_feature_enabled('verify_integrality'))
            self.assertFalse(is_feature_enabled('no_such_feature'))

    def test_rules(self):
        self.assertEqual(get_calculator_rule('EXIT_CODES')['usage'], 2)
        self.assertIn('quick', get_calculator_rule('SELFTEST_PROFILES'))
        self.assertIsNone(get_calculator_rule('NO_SUCH_RULE'))

    def test_full_profile_sizes(self):
        full = get_calculator_rule('SELFTEST_PROFILES')['full']
        self.assertEqual(full['universal_degree'], 8)
        self.assertEqual(full['universal_rank'], 3)
        self.assertEqual(full['universal_caps'], 3)
        self.assertEqual(full['max_degree'], 8)


class TestSettings(unittest.TestCase):

    def test_environment_wins(self):
        """COBCALC_DEFAULT_DEGREE overrides the class default at call time"""
        with mock.patch.dict(os.environ, {'COBCALC_ENV': 'testing', 'COBCALC_DEFAULT_DEGREE': '9'}):
            self.assertEqual(get_setting('DEFAULT_DEGREE'), 9)

    def test_class_default(self):
        with mock.patch.dict(os.environ, {'COBCALC_ENV': 'testing', 'COBCALC_THREADS': ''}):
            self.assertEqual(get_setting('THREADS'), TestingConfig.THREADS)

    def test_valid_configuration(self):
        with mock.patch.dict(os.environ, {'COBCALC_ENV': 'testing', 'COBCALC_DEFAULT_DEGREE': '5',
                                          'COBCALC_DEFAULT_CAPS': '2', 'COBCALC_THREADS': '1',
                                          'COBCALC_SEED': '0'}):
            self.assertEqual(validate_config(), [])

    def test_malformed_values(self):
        """Non-integers and out-of-range values are reported"""
        with mock.patch.dict(os.environ, {'COBCALC_ENV': 'testing', 'COBCALC_DEFAULT_DEGREE': 'abc',
                                          'COBCALC_THREADS': '0'}):
            errors = validate_config()
        self.assertTrue(any('DEFAULT_DEGREE' in error for error in errors))
        self.assertTrue(any('THREADS' in error for error in errors))


if __name__ == '__main__':
    unittest.main()
