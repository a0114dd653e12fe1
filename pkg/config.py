"""
Cobordism Calculator - Configuration
Calculator settings for different environments.
"""

import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _env_int(name, default):
    """Integer environment value; malformed values are kept as text for validate_config"""
    raw = os.environ.get(name)
    if raw is None or raw == '':
        return default
    try:
        return int(raw)
    except ValueError:
        return raw


class Config:
    """Base configuration class"""

    # Tracebacks on calculator errors
    DEBUG = False

    # Default precision and nilpotency caps
    DEFAULT_DEGREE = _env_int('COBCALC_DEFAULT_DEGREE', 6)
    DEFAULT_CAPS = _env_int('COBCALC_DEFAULT_CAPS', 3)

    # Reproducibility and parallelism
    DEFAULT_SEED = _env_int('COBCALC_SEED', 0)
    THREADS = _env_int('COBCALC_THREADS', 1)

    # Subsets are bitmasks over {1..r}
    MAX_DIVISORS = 16

    # Logging configuration
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'WARNING')
    LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s %(threadName)s : %(message)s'

    # Application features
    FEATURES = {
        'eager_axiom_checks': True,
        'verify_integrality': True,
        'parallel_subsets': True
    }


class DevelopmentConfig(Config):
    """Development configuration"""

    DEBUG = True

    # More verbose logging
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO')


class TestingConfig(Config):
    """Testing configuration"""

    DEBUG = False

    # Small sizes keep the suite fast
    DEFAULT_DEGREE = _env_int('COBCALC_DEFAULT_DEGREE', 5)
    DEFAULT_CAPS = _env_int('COBCALC_DEFAULT_CAPS', 2)

    FEATURES = {
        'eager_axiom_checks': True,
        'verify_integrality': True,
        'parallel_subsets': False
    }


class ProductionConfig(Config):
    """Production configuration"""

    DEBUG = False
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'WARNING')


# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': ProductionConfig,
    'default': ProductionConfig
}


def get_config():
    """Get configuration based on environment"""
    env = os.environ.get('COBCALC_ENV', 'production')
    return config.get(env, config['default'])



# Environment names of the runtime-overridable settings
ENVIRONMENT_SETTINGS = {
    'DEFAULT_DEGREE': 'COBCALC_DEFAULT_DEGREE',
    'DEFAULT_CAPS': 'COBCALC_DEFAULT_CAPS',
    'DEFAULT_SEED': 'COBCALC_SEED',
    'THREADS': 'COBCALC_THREADS'
}


def get_setting(name):
    """Current value of a setting; the environment wins over the class default"""
    config_class = get_config()
    env_name = ENVIRONMENT_SETTINGS.get(name)
    if env_name:
        return _env_int(env_name, getattr(config_class, name))
    return getattr(config_class, name, None)

# Calculator constants
class CalculatorRules:
    """Fixed tables shared by the services and the CLI"""

    # Named laws selectable with --law
    LAW_DEFINITIONS = {
        'add': {'series': 'x + y', 'ring': 'ZZ', 'description': 'Additive law'},
        'mult': {'series': 'x + y - x*y', 'ring': 'ZZ', 'description': 'Multiplicative law'},
        'univ': {'series': None, 'ring': 'ZZ[b1,...]', 'description': 'Universal law over the Lazard model'}
    }

    # Self-test sizes
    SELFTEST_PROFILES = {
        'quick': {
            'max_degree': 5,
            'max_divisors': 2,
            'max_multiplicity': 2,
            'max_caps': 2,
            'max_rank': 2,
            'universal_degree': 4,
            'universal_rank': 1,
            'universal_caps': 2,
            'nseries_range': 2,
            'single_divisor_max': 3,
            'hrr_max_n': 2,
            'hrr_max_d': 3,
            'cf_max_rank': 2,
            'whitney_max_rank': 2,
            'recursion_depth': 2,
            'geometric_series_precision': 6,
            'random_cases': 10
        },
        'full': {
            'max_degree': 8,
            'max_divisors': 3,
            'max_multiplicity': 3,
            'max_caps': 3,
            'max_rank': 3,
            'universal_degree': 8,
            'universal_rank': 3,
            'universal_caps': 3,
            'nseries_range': 4,
            'single_divisor_max': 5,
            'hrr_max_n': 4,
            'hrr_max_d': 5,
            'cf_max_rank': 4,
            'whitney_max_rank': 4,
            'recursion_depth': 3,
            'geometric_series_precision': 12,
            'random_cases': 50
        }
    }

    # Exit codes
    EXIT_CODES = {
        'success': 0,
        'check_failed': 1,
        'error': 1,
        'usage': 2
    }


# Utility functions for configuration
def is_feature_enabled(feature_name):
    """Check if a feature is enabled"""
    config_class = get_config()
    return config_class.FEATURES.get(feature_name, False)


def get_calculator_rule(rule_name):
    """Get a calculator rule table"""
    return getattr(CalculatorRules, rule_name, None)


def validate_config():
    """Validate configuration settings"""
    errors = []

    config_class = get_config()
    settings = {name: get_setting(name) for name in ENVIRONMENT_SETTINGS}

    for name, value in settings.items():
        if not isinstance(value, int):
            errors.append(f"{name} must be an integer, got '{value}'")

    degree, caps, threads = settings['DEFAULT_DEGREE'], settings['DEFAULT_CAPS'], settings['THREADS']
    if isinstance(degree, int) and degree < 1:
        errors.append(f"DEFAULT_DEGREE must be at least 1, got {degree}")
    if isinstance(caps, int) and caps < 0:
        errors.append(f"DEFAULT_CAPS must be nonnegative, got {caps}")
    if isinstance(threads, int) and threads < 1:
        errors.append(f"THREADS must be at least 1, got {threads}")

    if config_class.LOG_LEVEL.upper() not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
        errors.append(f"Unknown LOG_LEVEL: {config_class.LOG_LEVEL}")

    return errors


if __name__ == '__main__':
    # Configuration validation
    print("🔧 Validating configuration...")

    errors = validate_config()
    if errors:
        print("❌ Configuration errors found:")
        for error in errors:
            print(f"  - {error}")
    else:
        print("✅ Configuration is valid")

    # Display current configuration
    config_class = get_config()
    print(f"\n📋 Current environment: {os.environ.get('COBCALC_ENV', 'production')}")
    print(f"📐 Default degree: {get_setting('DEFAULT_DEGREE')}, default caps: {get_setting('DEFAULT_CAPS')}")
    print(f"🎲 Seed: {get_setting('DEFAULT_SEED')}, threads: {get_setting('THREADS')}")

    # Display enabled features
    print("\n🚀 Enabled features:")
    for feature, enabled in config_class.FEATURES.items():
        status = "✅" if enabled else "❌"
        print(f"  {status} {feature}")
