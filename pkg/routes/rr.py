"""
Cobordism Calculator - Riemann-Roch Commands
Hirzebruch-Riemann-Roch on projective space, Conner-Floyd pushforwards and
the power-series identities behind them.
"""

import logging

import click

from routes import build_request, output_options
from utils.constants import RR_IDENTITIES, THEORY_LAWS
from utils.decorators import command_response

rr_commands = click.Group('rr', help='Specialized theories and Riemann-Roch')
logger = logging.getLogger(__name__)


@rr_commands.command('hrr')
@click.option('--n', 'n', type=int, required=True, help='Dimension of P^n')
@click.option('--d', 'd', type=int, required=True, help='Twist O(d)')
@output_options
@command_response
def hrr(n, d, as_json, timing, threads):
    """chi(P^n, O(d)) through the Todd class"""
    return build_request(('rr', 'hrr'), as_json, timing, n=n, d=d, threads=threads)


@rr_commands.command('cf-push')
@click.option('--law', type=click.Choice(THEORY_LAWS), default='mult', show_default=True)
@click.option('--ranks', type=int, default=1, show_default=True, help='Bundle rank r')
@click.option('--caps', type=int, default=None, help='Nilpotency cap of each root')
@output_options
@command_response
def cf_push(law, ranks, caps, as_json, timing, threads):
    """pi_!(t^i) in the specialized theory, checked against the Conner-Floyd values"""
    return build_request(('rr', 'cf-push'), as_json, timing, law=law, ranks=ranks, caps=caps, threads=threads)


@rr_commands.command('identity')
@click.argument('identity', type=click.Choice(RR_IDENTITIES))
@click.option('--degree', type=int, default=None, help='Precision N')
@click.option('--law', type=click.Choice(THEORY_LAWS), default='mult', show_default=True)
@click.option('--ranks', type=int, default=1, show_default=True, help='Bundle rank r')
@click.option('--caps', type=int, default=None, help='Nilpotency cap of each root')
@output_options
@command_response
def identity(identity, degree, law, ranks, caps, as_json, timing, threads):
    """Verify one of the supporting identities"""
    return build_request(('rr', 'identity'), as_json, timing, identity=identity, degree=degree, law=law,
                         ranks=ranks, caps=caps, threads=threads)
