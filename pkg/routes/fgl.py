"""
Cobordism Calculator - Formal Group Law Commands
Universal law, n-series, inverse and axiom checks.
"""

import logging

import click

from routes import build_request, law_options, output_options
from utils.decorators import command_response

fgl_commands = click.Group('fgl', help='Formal group laws')
logger = logging.getLogger(__name__)


@fgl_commands.command('universal')
@click.option('--degree', type=int, default=None, help='Precision N')
@output_options
@command_response
def universal(degree, as_json, timing, threads):
    """Universal law over the Lazard model"""
    return build_request(('fgl', 'universal'), as_json, timing, degree=degree, threads=threads)


@fgl_commands.command('nseries')
@law_options
@click.option('--n', 'n', type=int, required=True, help='Multiplier n')
@output_options
@command_response
def nseries(law, law_file, degree, n, as_json, timing, threads):
    """Formal multiple [n]x"""
    return build_request(('fgl', 'nseries'), as_json, timing,
                         law=law, law_file=law_file, degree=degree, n=n, threads=threads)


@fgl_commands.command('inverse')
@law_options
@output_options
@command_response
def inverse(law, law_file, degree, as_json, timing, threads):
    """Formal inverse inv(x)"""
    return build_request(('fgl', 'inverse'), as_json, timing,
                         law=law, law_file=law_file, degree=degree, threads=threads)


@fgl_commands.command('check')
@law_options
@output_options
@command_response
def check(law, law_file, degree, as_json, timing, threads):
    """Check the group law axioms, one line per axiom"""
    return build_request(('fgl', 'check'), as_json, timing,
                         law=law, law_file=law_file, degree=degree, threads=threads)
