"""
Cobordism Calculator - Constants
Command-line choices and fixed names shared by routes, validators and services.
"""

import re

# =============================================
# CLI CHOICES
# =============================================

LAW_CHOICES = ('add', 'mult', 'univ')
PROFILE_CHOICES = ('quick', 'full')
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')

ZETA_CHECKS = ('single', 'splitting', 'specialization')
RR_IDENTITIES = ('geometric-series', 'geom-fgl', 'cf-expansion')

# Laws with a closed-form table of point classes
THEORY_LAWS = ('add', 'mult')

# =============================================
# MUTATIONS
# =============================================

MUTATION_PATTERN = re.compile(r'^(?:d:(\d+)|a:(\d+),(\d+)|todd)$')
MUTATION_HELP = "d:<i> flips d_i, a:<i>,<j> flips a_ij of the multiplicative law, todd flips the x^2 Todd coefficient"

# =============================================
# SELF-TEST SUITES
# =============================================

SUITE_ORDER = ('ring_core', 'fgl', 'zeta', 'chern', 'rr')
