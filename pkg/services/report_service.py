"""
Cobordism Calculator - Report Service
Command requests, their dispatch to the module services, and the reports
printed by the command line.
"""

import logging
import os
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from algebra.exceptions import InvalidRequest, SeriesParseError
from algebra.series import CheckResult, Series
from config import get_calculator_rule, get_setting
from services.chern_service import (
    ChernContext, CoefficientMatrix, ProjectiveBundleContext, coefficient_matrix, invert_matrix,
    pb_fundamental_coefficients, whitney_check
)
from services.fgl_service import (
    FormalGroupLaw, fgl_from_series, law_by_name, specialize_a, universal_fgl
)
from services.rr_service import (
    PushforwardTable, SpecializedTheory, cf_pushforward_check, geom_fgl_specialization_check,
    hrr_projective_space, verify_cf_product_expansion, verify_geometric_series_identity
)
from services.selftest_service import SuiteResult, run_selftest
from services.zeta_service import (
    decompose, specialization_commutes, verify_inductive_splitting, verify_single_divisor_identity
)
from utils.decorators import require_params
from utils.constants import LAW_CHOICES
from utils.helpers import canonical_json, format_seconds, parse_json_safe
from utils.validators import validate_request_params

logger = logging.getLogger(__name__)

_SETTING_FLAGS = {'DEFAULT_DEGREE': ('degree', 1), 'DEFAULT_CAPS': ('caps', 0), 'THREADS': ('threads', 1)}


def default_setting(name: str) -> int:
    """Environment default for an omitted flag; a malformed value is a usage error"""
    flag, minimum = _SETTING_FLAGS[name]
    value = get_setting(name)
    if not isinstance(value, int) or value < minimum:
        raise InvalidRequest(f"COBCALC_{name} is invalid: '{value}'", flag=flag)
    return value

# =============================================
# REQUESTS AND REPORTS
# =============================================

@dataclass
class CommandRequest:
    """One CLI invocation: subcommand path, parameters and output options"""

    command: Tuple[str, ...]
    params: Dict[str, Any] = field(default_factory=dict)
    output: str = 'text'
    timing: bool = False

    @property
    def path(self) -> str:
        return ' '.join(self.command)

    @property
    def threads(self) -> int:
        threads = self.params.get('threads')
        return default_setting('THREADS') if threads is None else threads

    def echo(self) -> Dict[str, Any]:
        return {
            'command': self.path,
            'params': {name: value for name, value in sorted(self.params.items()) if value is not None},
        }


@dataclass
class Report:
    """Result payload, text lines and checks of one command"""

    request: CommandRequest
    payload: Dict[str, Any] = field(default_factory=dict)
    lines: List[str] = field(default_factory=list)
    checks: List[CheckResult] = field(default_factory=list)
    precision: Optional[int] = None
    suites: List[SuiteResult] = field(default_factory=list)
    elapsed: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks) and all(suite.passed for suite in self.suites)

    @property
    def exit_code(self) -> int:
        codes = get_calculator_rule('EXIT_CODES')
        return codes['success'] if self.passed else codes['check_failed']

    def to_dict(self) -> Dict[str, Any]:
        data = self.request.echo()
        data.update({
            'result': self.payload,
            'precision': self.precision,
            'passed': self.passed,
            'checks': [check.to_dict() for check in self.checks],
        })
        if self.suites:
            data['suites'] = [suite.to_dict(self.request.timing) for suite in self.suites]
        if self.request.timing and self.elapsed is not None:
            data['elapsed'] = round(self.elapsed, 3)
        return data

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    def render(self) -> str:
        if self.request.output == 'json':
            return self.to_json()
        lines = list(self.lines)
        for suite in self.suites:
            lines.extend(suite.describe())
        lines.extend(check.describe() for check in self.checks)
        if self.request.timing and self.elapsed is not None:
            lines.append(f"elapsed: {format_seconds(self.elapsed)}")
        return '\n'.join(lines)

    def failure_lines(self) -> List[str]:
        failures = [check for check in self.checks if not check.passed]
        for suite in self.suites:
            failures.extend(suite.failures)
        return [check.describe() for check in failures]

# =============================================
# LAW RESOLUTION
# =============================================

def _read_law_file(path: str, degree: Optional[int], validate: bool) -> FormalGroupLaw:
    if not os.path.exists(path):
        raise InvalidRequest(f"Law file {path} does not exist", flag='law-file')
    with open(path, 'r', encoding='utf-8') as handle:
        payload = parse_json_safe(handle.read())
    if payload is None:
        raise InvalidRequest(f"Law file {path} is not valid JSON", flag='law-file')
    try:
        F = Series.from_json(payload)
    except SeriesParseError as e:
        raise InvalidRequest(f"Law file {path}: {e}", flag='law-file')
    name = os.path.splitext(os.path.basename(path))[0]
    if validate:
        return fgl_from_series(F, precision=degree, name=name)
    return FormalGroupLaw(F, precision=degree, name=name, validate=False)


def _parse_law_text(text: str, degree: int, validate: bool) -> FormalGroupLaw:
    """--law given as series text in x and y"""
    try:
        F = Series.parse(text, ('x', 'y'))
    except SeriesParseError as e:
        raise InvalidRequest(f"--law is neither a named law nor a series in x, y: {e}", flag='law')
    if validate:
        return fgl_from_series(F, precision=degree, name=text)
    return FormalGroupLaw(F, precision=degree, name=text, validate=False)


def resolve_law(request: CommandRequest, validate: bool = True) -> FormalGroupLaw:
    """--law-file wins over --law; the degree defaults to COBCALC_DEFAULT_DEGREE"""
    degree = request.params.get('degree')
    if degree is None:
        degree = default_setting('DEFAULT_DEGREE')
    law_file = request.params.get('law_file')
    if law_file:
        return _read_law_file(law_file, degree, validate)
    law = request.params.get('law') or 'add'
    if law in LAW_CHOICES:
        return law_by_name(law, degree)
    return _parse_law_text(law, degree, validate)


def _caps(request: CommandRequest) -> int:
    caps = request.params.get('caps')
    return default_setting('DEFAULT_CAPS') if caps is None else caps


def _theory(request: CommandRequest, default: str = 'mult') -> SpecializedTheory:
    name = request.params.get('law') or default
    if name == 'add':
        return SpecializedTheory.additive()
    if name == 'mult':
        return SpecializedTheory.multiplicative()
    raise InvalidRequest(f"--law {name} has no closed-form point classes; use add or mult", flag='law')

# =============================================
# FGL HANDLERS
# =============================================

def handle_fgl_universal(request: CommandRequest) -> Report:
    degree = request.params.get('degree') or default_setting('DEFAULT_DEGREE')
    model = universal_fgl(degree)
    payload = {'law': 'univ', 'degree': degree, 'ring': model.ring.name, 'series': model.F.to_json()}
    lines = [f"F(x, y) over {model.ring.name} to degree {degree}:", model.F.to_text()]
    return Report(request, payload, lines, precision=degree)


@require_params('n')
def handle_fgl_nseries(request: CommandRequest) -> Report:
    law = resolve_law(request)
    n = request.params['n']
    series = law.n_series(n)
    payload = {'law': law.name, 'n': n, 'series': series.to_json()}
    return Report(request, payload, [f"[{n}]x = {series.to_text()}"], precision=series.precision)


def handle_fgl_inverse(request: CommandRequest) -> Report:
    law = resolve_law(request)
    inverse = law.inverse_series
    payload = {'law': law.name, 'series': inverse.to_json()}
    return Report(request, payload, [f"inv(x) = {inverse.to_text()}"], precision=inverse.precision)


def handle_fgl_check(request: CommandRequest) -> Report:
    law = resolve_law(request, validate=False)
    checks = law.axiom_results()
    payload = {'law': law.name, 'degree': law.precision}
    return Report(request, payload, [f"law {law.name} to degree {law.precision}"], checks, law.precision)

# =============================================
# ZETA HANDLERS
# =============================================

@require_params('mult')
def handle_zeta_decompose(request: CommandRequest) -> Report:
    law = resolve_law(request)
    decomposition = decompose(law, request.params['mult'], threads=request.threads,
                              allow_negative=bool(request.params.get('allow_negative')))
    checks = [decomposition.check_reassembly()]
    return Report(request, decomposition.to_payload(), decomposition.to_lines(), checks,
                  decomposition.precision)


@require_params('mult', 'check')
def handle_zeta_verify(request: CommandRequest) -> Report:
    law = resolve_law(request)
    mults = request.params['mult']
    kind = request.params['check']
    if kind == 'single':
        checks = [verify_single_divisor_identity(law, m) for m in mults]
    elif kind == 'splitting':
        checks = [verify_inductive_splitting(law, mults)]
    else:
        if law.name == 'univ':
            raise InvalidRequest("Specialization needs a target law: --law add or mult", flag='law')
        model = universal_fgl(law.precision)
        checks = [specialize_a(model, law).verify(), specialization_commutes(model, law, mults)]
    payload = {'law': law.name, 'check': kind, 'multiplicities': list(mults)}
    return Report(request, payload, [f"zeta {kind} for {law.name}"], checks, law.precision)

# =============================================
# CHERN HANDLERS
# =============================================

def _chern_context(request: CommandRequest) -> ChernContext:
    rank = request.params.get('ranks') or 1
    return ChernContext(resolve_law(request), rank, _caps(request))


def handle_chern_pbf(request: CommandRequest) -> Report:
    ctx = _chern_context(request)
    rank = ctx.rank
    count = request.params.get('count')
    u = pb_fundamental_coefficients(ctx, max(count or 0, 2 * rank - 1), threads=request.threads)
    A = coefficient_matrix(ctx, u)
    inverse = invert_matrix(A, ctx)
    checks = [
        ProjectiveBundleContext(ctx).verify_relation(),
        u.structure_check(ctx),
        A.mul(inverse).compare(CoefficientMatrix.identity(ctx, rank), 'matrix_inverse'),
    ]
    payload = {'law': ctx.law.name, 'rank': rank, 'caps': list(ctx.caps), 'u': u.to_payload(),
               'A': A.to_payload(), 'A_inverse': inverse.to_payload()}
    lines = u.to_lines() + A.to_lines('A') + inverse.to_lines('A^-1')
    return Report(request, payload, lines, checks, ctx.law.precision)


def handle_chern_matrix(request: CommandRequest) -> Report:
    ctx = _chern_context(request)
    A = coefficient_matrix(ctx)
    inverse = invert_matrix(A, ctx)
    identity = CoefficientMatrix.identity(ctx, ctx.rank)
    checks = [A.mul(inverse).compare(identity, 'matrix_inverse'),
              inverse.mul(A).compare(identity, 'matrix_inverse')]
    payload = {'law': ctx.law.name, 'A': A.to_payload(), 'A_inverse': inverse.to_payload()}
    return Report(request, payload, A.to_lines('A') + inverse.to_lines('A^-1'), checks, ctx.law.precision)


@require_params('r1', 'r2')
def handle_chern_whitney(request: CommandRequest) -> Report:
    r1, r2 = request.params['r1'], request.params['r2']
    ctx = ChernContext(resolve_law(request), r1 + r2, _caps(request))
    checks = [whitney_check(ctx, r1)]
    payload = {'law': ctx.law.name, 'r1': r1, 'r2': r2, 'caps': list(ctx.caps)}
    return Report(request, payload, [f"whitney {ctx.law.name} r1={r1} r2={r2}"], checks, ctx.law.precision)

# =============================================
# RR HANDLERS
# =============================================

@require_params('n', 'd')
def handle_rr_hrr(request: CommandRequest) -> Report:
    n, d = request.params['n'], request.params['d']
    value = hrr_projective_space(n, d)
    return Report(request, {'n': n, 'd': d, 'chi': str(value)}, [str(value)], precision=None)


def handle_rr_cf_push(request: CommandRequest) -> Report:
    theory = _theory(request)
    rank = request.params.get('ranks') or 1
    ctx = theory.context(rank, _caps(request))
    pb = ProjectiveBundleContext(ctx)
    table = PushforwardTable.build(theory, pb, request.threads)
    checks = [cf_pushforward_check(theory, pb, request.threads)]
    lines = [f"pi_!(t^{i}) = {value.to_text()}" for i, value in enumerate(table.values)]
    return Report(request, {'theory': theory.name, 'rank': rank, 'pushforward': table.to_payload()},
                  lines, checks, None)


@require_params('identity')
def handle_rr_identity(request: CommandRequest) -> Report:
    identity = request.params['identity']
    if identity == 'geometric-series':
        degree = request.params.get('degree') or default_setting('DEFAULT_DEGREE')
        checks = [verify_geometric_series_identity(degree)]
    elif identity == 'geom-fgl':
        checks = [geom_fgl_specialization_check(_theory(request), _caps(request))]
    else:
        theory = SpecializedTheory.multiplicative()
        rank = request.params.get('ranks') or 1
        pb = ProjectiveBundleContext(theory.context(rank, _caps(request)))
        checks = [verify_cf_product_expansion(pb, i) for i in range(rank + 1)]
    return Report(request, {'identity': identity}, [f"identity {identity}"], checks, checks[0].precision)

# =============================================
# SELFTEST
# =============================================

def handle_selftest(request: CommandRequest) -> Report:
    suites = run_selftest(
        profile=request.params.get('profile') or 'quick',
        seed=request.params.get('seed'),
        mutate=request.params.get('mutate'),
        threads=request.threads,
    )
    payload = {'profile': request.params.get('profile') or 'quick',
               'mutation': request.params.get('mutate'),
               'total_checks': sum(len(suite.checks) for suite in suites)}
    return Report(request, payload, [f"selftest {payload['profile']}"], suites=suites)

# =============================================
# DISPATCH
# =============================================

HANDLERS: Dict[Tuple[str, ...], Callable[[CommandRequest], Report]] = {
    ('fgl', 'universal'): handle_fgl_universal,
    ('fgl', 'nseries'): handle_fgl_nseries,
    ('fgl', 'inverse'): handle_fgl_inverse,
    ('fgl', 'check'): handle_fgl_check,
    ('zeta', 'decompose'): handle_zeta_decompose,
    ('zeta', 'verify'): handle_zeta_verify,
    ('chern', 'pbf'): handle_chern_pbf,
    ('chern', 'matrix'): handle_chern_matrix,
    ('chern', 'whitney'): handle_chern_whitney,
    ('rr', 'hrr'): handle_rr_hrr,
    ('rr', 'cf-push'): handle_rr_cf_push,
    ('rr', 'identity'): handle_rr_identity,
    ('selftest',): handle_selftest,
}


def run(request: CommandRequest) -> Report:
    """Validate, dispatch to the named operation and time it"""
    handler = HANDLERS.get(tuple(request.command))
    if handler is None:
        raise InvalidRequest(f"Unknown command: {request.path}")
    errors = validate_request_params(request.params)
    if errors:
        flag, message = errors[0]
        raise InvalidRequest(message, flag=flag)

    logger.info(f"Running {request.path}")
    start = time.time()
    report = handler(request)
    report.elapsed = time.time() - start
    logger.info(f"{request.path} finished in {format_seconds(report.elapsed)}: "
                f"{'passed' if report.passed else 'FAILED'}")
    return report
