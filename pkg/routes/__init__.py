"""
Cobordism Calculator - Command Groups
Shared click options and request construction for the command groups.
"""

from typing import Any, Callable, Tuple

import click

from utils.validators import degree_callback


def output_options(f: Callable) -> Callable:
    """--json, --timing and --threads"""
    f = click.option('--threads', type=int, default=None, help='Worker threads (default COBCALC_THREADS)')(f)
    f = click.option('--timing', is_flag=True, help='Report elapsed seconds')(f)
    f = click.option('--json', 'as_json', is_flag=True, help='Canonical JSON output')(f)
    return f


def law_options(f: Callable) -> Callable:
    """--law, --law-file and --degree"""
    f = click.option('--degree', type=int, default=None, callback=degree_callback,
                     help='Precision N (default COBCALC_DEFAULT_DEGREE)')(f)
    f = click.option('--law-file', type=click.Path(dir_okay=False), default=None,
                     help='Law given as series JSON')(f)
    f = click.option('--law', default=None, help="add, mult, univ or a series in x and y")(f)
    return f


def build_request(command: Tuple[str, ...], as_json: bool = False, timing: bool = False, **params: Any):
    """CommandRequest from click keyword arguments"""
    from services.report_service import CommandRequest

    return CommandRequest(
        command=command,
        params=params,
        output='json' if as_json else 'text',
        timing=timing,
    )
