"""
Cobordism Calculator - Decorators
Execution timing, request validation and CLI response handling.
"""

from functools import wraps
import logging
import time
from typing import Callable

import click

from algebra.exceptions import CobcalcError, InvalidRequest
from config import get_config
from utils.helpers import format_seconds

logger = logging.getLogger(__name__)

# =============================================
# TIMING DECORATORS
# =============================================

def log_execution_time(f):
    """
    Log how long a construction or check took

    Successful calls log at INFO, calls that raise log the error class at
    ERROR before re-raising.

    Usage:
        @log_execution_time
        def universal_fgl(degree):
            ...
    """
    @wraps(f)
    def decorated_function(*args, **kwargs):
        start = time.perf_counter()
        try:
            result = f(*args, **kwargs)
        except Exception as e:
            logger.error(f"{f.__name__} raised {type(e).__name__} after {format_seconds(time.perf_counter() - start)}: {e}")
            raise
        logger.info(f"{f.__name__} computed in {format_seconds(time.perf_counter() - start)}")
        return result

    return decorated_function

# =============================================
# REQUEST DECORATORS
# =============================================

def require_params(*required_params: str):
    """
    Decorator to require parameters on a CommandRequest before a handler runs

    Usage:
        @require_params('degree', 'n')
        def handle_nseries(request):
            ...
    """
    def decorator(f: Callable):
        @wraps(f)
        def decorated_function(request, *args, **kwargs):
            missing_params = [name for name in required_params if request.params.get(name) is None]
            if missing_params:
                flags = ', '.join(f"--{name.replace('_', '-')}" for name in missing_params)
                raise InvalidRequest(f"Missing required options: {flags}", flag=missing_params[0])
            return f(request, *args, **kwargs)

        return decorated_function
    return decorator

# =============================================
# CLI RESPONSE DECORATORS
# =============================================

def command_response(f):
    """
    Decorator to standardize command output and exit codes

    The wrapped callback returns a CommandRequest (or a ready Report). The
    report goes to stdout; failed checks exit 1 with their witness on
    stderr, calculator errors exit with their exit code and invalid
    requests become click usage errors (exit 2).

    Usage:
        @fgl_commands.command('universal')
        @command_response
        def universal(degree, as_json):
            return CommandRequest(('fgl', 'universal'), params={'degree': degree})
    """
    @wraps(f)
    def decorated_function(*args, **kwargs):
        from services.report_service import CommandRequest, run

        ctx = click.get_current_context()
        try:
            result = f(*args, **kwargs)
            report = run(result) if isinstance(result, CommandRequest) else result

        except InvalidRequest as e:
            logger.error(f"Invalid request in {f.__name__}: {e}")
            raise click.UsageError(str(e), ctx=ctx)

        except CobcalcError as e:
            logger.error(f"Command {f.__name__} failed: {e}", exc_info=get_config().DEBUG)
            click.echo(f"Error: {e}", err=True)
            ctx.exit(e.exit_code)
            return

        click.echo(report.render())
        for line in report.failure_lines():
            click.echo(line, err=True)
        ctx.exit(report.exit_code)

    return decorated_function
