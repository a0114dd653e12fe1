"""
Cobordism Calculator - Validators
Parameter validation for command requests and click option callbacks.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import click

from config import get_config
from utils.constants import MUTATION_PATTERN, PROFILE_CHOICES
from utils.helpers import parse_int_list

logger = logging.getLogger(__name__)

# =============================================
# VALUE VALIDATORS
# =============================================

def is_valid_degree(degree: Any, minimum: int = 1) -> Tuple[bool, List[str]]:
    """
    Validate a precision / degree value

    Returns:
        Tuple of (is_valid, list_of_errors)
    """
    errors = []
    if not isinstance(degree, int) or isinstance(degree, bool):
        errors.append(f"Degree must be an integer, got '{degree}'")
        return False, errors
    if degree < minimum:
        errors.append(f"Degree must be at least {minimum}, got {degree}")
    return len(errors) == 0, errors


def is_valid_multiplicities(values: Optional[List[int]], allow_negative: bool = False) -> Tuple[bool, List[str]]:
    """Multiplicities are nonzero, positive unless allowed otherwise, and at most MAX_DIVISORS many"""
    errors = []
    if not values:
        errors.append("At least one multiplicity is required")
        return False, errors
    max_divisors = get_config().MAX_DIVISORS
    if len(values) > max_divisors:
        errors.append(f"At most {max_divisors} multiplicities are supported, got {len(values)}")
    for n in values:
        if n == 0:
            errors.append("Multiplicity 0 is not allowed")
        elif n < 0 and not allow_negative:
            errors.append(f"Multiplicity {n} is not positive")
    return len(errors) == 0, errors


def is_valid_mutation(text: Optional[str]) -> Tuple[bool, List[str]]:
    if text is None or MUTATION_PATTERN.match(text):
        return True, []
    return False, [f"Unknown mutation '{text}'; expected d:<i>, a:<i>,<j> or todd"]

# =============================================
# REQUEST VALIDATION
# =============================================

_NONNEGATIVE = ('caps', 'n', 'd', 'r1', 'r2', 'seed', 'count')
_POSITIVE = ('ranks', 'threads', 'm')


def validate_request_params(params: Dict[str, Any]) -> List[Tuple[str, str]]:
    """
    Validate the numeric and choice parameters of a command request

    Returns:
        List of (flag, message) pairs; empty when the request is valid
    """
    errors = []

    if params.get('degree') is not None:
        is_valid, degree_errors = is_valid_degree(params['degree'])
        errors.extend(('degree', message) for message in degree_errors)

    for name in _NONNEGATIVE:
        value = params.get(name)
        if value is not None and value < 0:
            errors.append((name, f"--{name} must be nonnegative, got {value}"))

    for name in _POSITIVE:
        value = params.get(name)
        if value is not None and value < 1:
            errors.append((name, f"--{name} must be at least 1, got {value}"))

    if params.get('profile') is not None and params['profile'] not in PROFILE_CHOICES:
        errors.append(('profile', f"Unknown profile '{params['profile']}'"))

    if 'mult' in params and params['mult'] is not None:
        is_valid, mult_errors = is_valid_multiplicities(params['mult'], params.get('allow_negative', False))
        errors.extend(('mult', message) for message in mult_errors)

    is_valid, mutation_errors = is_valid_mutation(params.get('mutate'))
    errors.extend(('mutate', message) for message in mutation_errors)

    if errors:
        logger.debug(f"Request rejected: {errors}")
    return errors

# =============================================
# CLICK CALLBACKS
# =============================================

def multiplicities_callback(ctx, param, value):
    """Parse --mult '1,2,3' into a list of ints"""
    if value is None:
        return None
    try:
        return parse_int_list(value)
    except ValueError as e:
        raise click.BadParameter(str(e), ctx=ctx, param=param)


def degree_callback(ctx, param, value):
    if value is None:
        return None
    is_valid, errors = is_valid_degree(value)
    if not is_valid:
        raise click.BadParameter('; '.join(errors), ctx=ctx, param=param)
    return value


def mutation_callback(ctx, param, value):
    is_valid, errors = is_valid_mutation(value)
    if not is_valid:
        raise click.BadParameter('; '.join(errors), ctx=ctx, param=param)
    return value
