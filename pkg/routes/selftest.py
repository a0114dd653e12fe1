"""
Cobordism Calculator - Self-Test Command
"""

import logging

import click

from routes import build_request, output_options
from utils.constants import MUTATION_HELP, PROFILE_CHOICES
from utils.decorators import command_response
from utils.validators import mutation_callback

logger = logging.getLogger(__name__)


@click.command('selftest')
@click.option('--profile', type=click.Choice(PROFILE_CHOICES), default='quick', show_default=True)
@click.option('--seed', type=int, default=None, help='Random seed (default COBCALC_SEED)')
@click.option('--mutate', default=None, callback=mutation_callback, help=MUTATION_HELP)
@output_options
@command_response
def selftest(profile, seed, mutate, as_json, timing, threads):
    """Run the invariant suites of every module"""
    return build_request(('selftest',), as_json, timing, profile=profile, seed=seed, mutate=mutate, threads=threads)
