"""
Cobordism Calculator - Subset Decomposition Commands
"""

import logging

import click

from routes import build_request, law_options, output_options
from utils.constants import ZETA_CHECKS
from utils.decorators import command_response
from utils.validators import multiplicities_callback

zeta_commands = click.Group('zeta', help='Subset decomposition of formal sums')
logger = logging.getLogger(__name__)


@zeta_commands.command('decompose')
@law_options
@click.option('--mult', required=True, callback=multiplicities_callback, help='Multiplicities, e.g. 2,3')
@click.option('--allow-negative', is_flag=True, help='Accept negative multiplicities')
@output_options
@command_response
def decompose(law, law_file, degree, mult, allow_negative, as_json, timing, threads):
    """Components F_I of [n1]x1 +F ... +F [nr]xr"""
    return build_request(('zeta', 'decompose'), as_json, timing,
                         law=law, law_file=law_file, degree=degree, mult=mult,
                         allow_negative=allow_negative, threads=threads)


@zeta_commands.command('verify')
@law_options
@click.option('--mult', required=True, callback=multiplicities_callback, help='Multiplicities, e.g. 2,3')
@click.option('--check', 'check', type=click.Choice(ZETA_CHECKS), default='single', show_default=True)
@output_options
@command_response
def verify(law, law_file, degree, mult, check, as_json, timing, threads):
    """Verify a decomposition identity"""
    return build_request(('zeta', 'verify'), as_json, timing,
                         law=law, law_file=law_file, degree=degree, mult=mult, check=check, threads=threads)
