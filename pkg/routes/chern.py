"""
Cobordism Calculator - Chern Class Commands
Projective bundle coefficients, their matrix and the Whitney formula.
"""

import logging

import click

from routes import build_request, law_options, output_options
from utils.decorators import command_response

chern_commands = click.Group('chern', help='Characteristic classes of split bundles')
logger = logging.getLogger(__name__)


@chern_commands.command('pbf')
@law_options
@click.option('--ranks', type=int, default=1, show_default=True, help='Bundle rank r')
@click.option('--caps', type=int, default=None, help='Nilpotency cap of each root')
@click.option('--count', type=int, default=None, help='Number of coefficients u_i')
@output_options
@command_response
def pbf(law, law_file, degree, ranks, caps, count, as_json, timing, threads):
    """Coefficients u_i, the matrix A and its inverse"""
    return build_request(('chern', 'pbf'), as_json, timing,
                         law=law, law_file=law_file, degree=degree, ranks=ranks, caps=caps,
                         count=count, threads=threads)


@chern_commands.command('matrix')
@law_options
@click.option('--ranks', type=int, default=1, show_default=True, help='Bundle rank r')
@click.option('--caps', type=int, default=None, help='Nilpotency cap of each root')
@output_options
@command_response
def matrix(law, law_file, degree, ranks, caps, as_json, timing, threads):
    """The matrix A and its inverse"""
    return build_request(('chern', 'matrix'), as_json, timing,
                         law=law, law_file=law_file, degree=degree, ranks=ranks, caps=caps, threads=threads)


@chern_commands.command('whitney')
@law_options
@click.option('--r1', type=int, required=True, help='Rank of the first summand')
@click.option('--r2', type=int, required=True, help='Rank of the second summand')
@click.option('--caps', type=int, default=None, help='Nilpotency cap of each root')
@output_options
@command_response
def whitney(law, law_file, degree, r1, r2, caps, as_json, timing, threads):
    """c(E1 + E2) = c(E1) c(E2)"""
    return build_request(('chern', 'whitney'), as_json, timing,
                         law=law, law_file=law_file, degree=degree, r1=r1, r2=r2, caps=caps, threads=threads)
