"""
Cobordism Calculator - Command Line Application
Main entry point with logging configuration and command registration.
"""

import logging
import sys

import click
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Import configuration
from config import get_config, validate_config

# Import command groups
from routes.chern import chern_commands
from routes.fgl import fgl_commands
from routes.rr import rr_commands
from routes.selftest import selftest
from routes.zeta import zeta_commands

from utils.constants import LOG_LEVELS

logger = logging.getLogger(__name__)


def configure_logging(level=None):
    """Log to stderr so stdout carries only the report"""
    config_class = get_config()
    logging.basicConfig(
        level=getattr(logging, (level or config_class.LOG_LEVEL).upper(), logging.WARNING),
        format=config_class.LOG_FORMAT,
        stream=sys.stderr,
        force=True
    )


def create_app():
    """Application factory: the root command group with every subcommand registered"""

    @click.group()
    @click.option('--log-level', type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None,
                  help='Logging level (default LOG_LEVEL)')
    def cli(log_level):
        """Exact formal group law and algebraic cobordism calculator"""
        configure_logging(log_level)
        for error in validate_config():
            logger.warning(f"Configuration: {error}")

    cli.add_command(fgl_commands)
    cli.add_command(zeta_commands)
    cli.add_command(chern_commands)
    cli.add_command(rr_commands)
    cli.add_command(selftest)
    return cli


if __name__ == '__main__':
    create_app()()
