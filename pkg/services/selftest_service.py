"""
Cobordism Calculator - Self-Test Service
Runs the invariant suites of every module at profile-dependent sizes, with
an optional deliberate corruption to show that the suites notice it.
"""

import logging
import random
import time
from dataclasses import dataclass, field
from itertools import product
from math import comb
from typing import Any, Dict, List, Optional, Sequence, Tuple

from algebra.exceptions import CobcalcError, InvalidRequest
from algebra.rings import INTEGERS, RATIONALS
from algebra.series import (
    CheckResult, Series, combine_checks, compare, compositional_inverse, graded_component,
    invert_unit, substitute
)
from config import get_calculator_rule, get_setting
from services.chern_service import (
    ChernContext, CoefficientMatrix, ProjectiveBundleContext, SplitBundle, coefficient_matrix,
    coefficient_recursion_check, coefficient_symmetry_check, euler_dual, euler_tensor,
    invert_matrix, pb_fundamental_coefficients, whitney_check
)
from services.fgl_service import (
    X, Y, FormalGroupLaw, TheoryNormalization, law_by_name, perturb_law,
    specialize_a, universal_fgl
)
from services.rr_service import (
    SpecializedTheory, ToddData, cf_pushforward_check, chern_character_additive,
    chern_character_multiplicative, chern_character_ring_map_check, geom_fgl_specialization_check,
    hrr_projective_space, todd_class, verify_cf_product_expansion, verify_geometric_series_identity,
    verify_projection_formula
)
from services.zeta_service import (
    decompose, specialization_commutes, verify_inductive_splitting, verify_single_divisor_identity
)
from utils.constants import MUTATION_PATTERN, SUITE_ORDER

logger = logging.getLogger(__name__)

# =============================================
# MUTATIONS
# =============================================

@dataclass(frozen=True)
class Mutation:
    """One deliberate corruption: flip d_i, flip a_ij of the multiplicative law, or flip Todd x^2"""

    kind: str
    indices: Tuple[int, ...] = ()

    @classmethod
    def parse(cls, text: Optional[str]) -> Optional['Mutation']:
        if text is None:
            return None
        match = MUTATION_PATTERN.match(text)
        if not match:
            raise InvalidRequest(f"Unknown mutation '{text}'", flag='mutate')
        if text == 'todd':
            return cls('todd')
        if match.group(1) is not None:
            i = int(match.group(1))
            if i < 1:
                raise InvalidRequest("d:<i> needs i >= 1", flag='mutate')
            return cls('d', (i,))
        i, j = int(match.group(2)), int(match.group(3))
        if i < 1 or j < 1:
            raise InvalidRequest("a:<i>,<j> needs i, j >= 1", flag='mutate')
        return cls('a', (i, j))

    def to_text(self) -> str:
        if self.kind == 'todd':
            return 'todd'
        return f"{self.kind}:{','.join(str(i) for i in self.indices)}"

# =============================================
# RESULTS
# =============================================

@dataclass
class SuiteResult:
    name: str
    checks: List[CheckResult] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def summary(self) -> CheckResult:
        return combine_checks(self.checks, self.name)

    def to_dict(self, timing: bool = False) -> Dict[str, Any]:
        data = {
            'suite': self.name,
            'passed': self.passed,
            'checks': [check.to_dict() for check in self.checks],
        }
        if timing:
            data['elapsed'] = round(self.elapsed, 3)
        return data

    def describe(self) -> List[str]:
        status = 'ok' if self.passed else 'FAILED'
        lines = [f"[{self.name}] {status}: {len(self.checks)} checks, {len(self.failures)} failed"]
        lines.extend(f"  {check.describe()}" for check in self.failures)
        return lines

# =============================================
# RANDOM DATA
# =============================================

def random_series(rng: random.Random, frame: Series, max_degree: int, terms: int = 5,
                  constant: bool = True, bound: int = 3) -> Series:
    """Random integer combination of monomials of the frame up to max_degree"""
    caps = frame.cap_tuple
    picked = {}
    for _ in range(terms):
        exps = []
        remaining = max_degree
        for cap in caps:
            top = remaining if cap is None else min(cap, remaining)
            e = rng.randint(0, top)
            exps.append(e)
            remaining -= e
        if not constant and not any(exps):
            continue
        picked[tuple(exps)] = rng.randint(-bound, bound)
    return Series(frame.ring, frame.variables, picked, frame.precision, caps)


def random_nilpotent(rng: random.Random, ctx: ChernContext, terms: int = 3) -> Series:
    return random_series(rng, ctx.zero(), ctx.total_cap, terms, constant=False)

# =============================================
# SUITES
# =============================================

def ring_core_suite(profile: Dict[str, Any], rng: random.Random) -> List[CheckResult]:
    """Ring laws, inverses and text/JSON readback on random series"""
    precision = profile['max_degree']
    frame = Series.zero(INTEGERS, ('x', 'y'), precision)
    checks = []
    for case in range(profile['random_cases']):
        a, b, c = (random_series(rng, frame, precision) for _ in range(3))
        checks.append(compare(a.mul(b).mul(c), a.mul(b.mul(c)), 'ring_core.associativity'))
        checks.append(compare(a.mul(b.add(c)), a.mul(b).add(a.mul(c)), 'ring_core.distributivity'))
        checks.append(compare(a.mul(b), b.mul(a), 'ring_core.commutativity'))

        unit = random_series(rng, frame, precision, constant=False).add(frame.one_like())
        checks.append(compare(unit.mul(invert_unit(unit)), frame.one_like(precision), 'ring_core.invert_unit'))

        checks.append(compare(Series.parse(a.to_text(), a.variables, a.ring, precision), a, 'ring_core.text'))
        checks.append(compare(Series.from_json(a.to_json()), a, 'ring_core.json'))

    x = Series.variable(RATIONALS, X, (X,), precision)
    for case in range(profile['random_cases']):
        f = x.add(random_series(rng, x.zero_like(precision), precision, 3, constant=False).mul(x))
        g = compositional_inverse(f)
        checks.append(compare(substitute(f, {X: g}), x, 'ring_core.compositional_inverse'))
    return checks


def _named_laws(profile: Dict[str, Any]) -> List[FormalGroupLaw]:
    return [
        law_by_name('add', profile['max_degree']),
        law_by_name('mult', profile['max_degree']),
        law_by_name('univ', profile['universal_degree']),
    ]


def fgl_suite(profile: Dict[str, Any], mutation: Optional[Mutation]) -> List[CheckResult]:
    """Axioms, n-series, logarithm, normalization and specialization"""
    checks = []
    for law in _named_laws(profile):
        checks.extend(law.axiom_results())
        x = law.x()
        inverse_sum = law.apply(x, law.inverse_series)
        checks.append(compare(inverse_sum, x.zero_like(), f"fgl.{law.name}.inverse"))
        for n in range(2, profile['nseries_range'] + 1):
            for m in range(1, profile['nseries_range'] + 1):
                lhs = law.multiply(n, law.n_series(m))
                checks.append(compare(lhs, law.n_series(n * m).truncate(law.precision),
                                      f"fgl.{law.name}.nseries[{n}*{m}]"))
        checks.append(compare(law.n_series(-1), law.inverse_series, f"fgl.{law.name}.nseries[-1]"))

    model = universal_fgl(profile['max_degree'])
    checks.append(model.verify_logarithm())
    checks.append(TheoryNormalization.universal(model).check(model.law))
    expected = Series.parse('-2*b1*x*y', (X, Y), model.ring)
    checks.append(compare(graded_component(model.F, 2), expected, 'fgl.degree_two'))

    for name in ('add', 'mult'):
        target = law_by_name(name, profile['max_degree'])
        normalization = TheoryNormalization.additive() if name == 'add' else TheoryNormalization.multiplicative()
        checks.append(normalization.check(target))
        hom = specialize_a(model, target)
        if name == 'mult' and mutation is not None and mutation.kind == 'a':
            i, j = mutation.indices
            ring = target.ring
            for key in {(i, j), (j, i)}:
                value = hom.a_images.get(key, ring.zero)
                hom.a_images[key] = ring.one if ring.is_zero(value) else ring.neg(value)
            logger.warning(f"Specialization value a[{i},{j}] of mult flipped")
        checks.append(hom.verify())
    return checks


def zeta_suite(profile: Dict[str, Any], threads: int = 1) -> List[CheckResult]:
    """Reassembly, single-divisor and splitting identities, base independence"""
    checks = []
    laws = _named_laws(profile)
    for law in laws:
        for r in range(1, profile['max_divisors'] + 1):
            for mults in product(range(1, profile['max_multiplicity'] + 1), repeat=r):
                checks.append(decompose(law, mults, threads=threads).check_reassembly())
                if r >= 2:
                    checks.append(verify_inductive_splitting(law, mults))
        for m in range(1, profile['single_divisor_max'] + 1):
            checks.append(verify_single_divisor_identity(law, m))

    model = universal_fgl(profile['universal_degree'])
    for name in ('add', 'mult'):
        target = law_by_name(name, profile['max_degree'])
        homomorphism = specialize_a(model, target)
        for r in range(1, profile['max_divisors'] + 1):
            for mults in product(range(1, profile['max_multiplicity'] + 1), repeat=r):
                checks.append(specialization_commutes(model, target, mults, homomorphism=homomorphism))
    return checks


def _mutated_relation(pb: ProjectiveBundleContext, mutation: Optional[Mutation]) -> ProjectiveBundleContext:
    if mutation is None or mutation.kind != 'd':
        return pb
    i = mutation.indices[0]
    if i > pb.rank:
        return pb
    relation = list(pb.relation)
    relation[i - 1] = relation[i - 1].neg() if not relation[i - 1].is_zero() else pb.base.one()
    logger.warning(f"Hyperplane relation coefficient d_{i} flipped")
    return ProjectiveBundleContext(pb.base, pb.bundle, relation)


def _chern_cases(profile: Dict[str, Any]) -> List[Tuple[FormalGroupLaw, int, int]]:
    cases = []
    for name in ('add', 'mult'):
        law = law_by_name(name, profile['max_degree'])
        for rank in range(1, profile['max_rank'] + 1):
            for caps in range(1, profile['max_caps'] + 1):
                cases.append((law, rank, caps))
    universal = law_by_name('univ', profile['universal_degree'])
    for rank in range(1, profile['universal_rank'] + 1):
        cases.append((universal, rank, profile['universal_caps']))
    return cases


def chern_suite(profile: Dict[str, Any], rng: random.Random, mutation: Optional[Mutation],
                threads: int = 1) -> List[CheckResult]:
    """Hyperplane relation, coefficient structure, matrix inverse, recursion, Whitney"""
    if mutation is not None and mutation.kind == 'd' and mutation.indices[0] > profile['max_rank']:
        raise InvalidRequest(f"d:{mutation.indices[0]} exceeds the largest rank {profile['max_rank']}",
                             flag='mutate')
    checks = []
    for law, rank, caps in _chern_cases(profile):
        ctx = ChernContext(law, rank, caps)
        tag = f"{law.name}/r{rank}/c{caps}"
        pb = _mutated_relation(ProjectiveBundleContext(ctx), mutation)
        checks.append(pb.verify_relation())

        element = random_series(rng, pb.zero(), caps + rank + 1, 4)
        once = pb.reduce(element)
        checks.append(compare(pb.reduce(once), once, 'hyperplane_confluence'))
        checks.append(compare(pb.from_normal_form(pb.normal_form(element)), once, 'normal_form'))

        u = pb_fundamental_coefficients(ctx, 2 * rank - 1 + profile['recursion_depth'], threads=threads)
        checks.append(u.structure_check(ctx))
        A = coefficient_matrix(ctx, u)
        inverse = invert_matrix(A, ctx)
        identity = CoefficientMatrix.identity(ctx, rank)
        checks.append(A.mul(inverse).compare(identity, 'matrix_inverse'))
        checks.append(inverse.mul(A).compare(identity, 'matrix_inverse'))
        checks.append(coefficient_recursion_check(ctx, profile['recursion_depth'], pb))
        if rank >= 2:
            checks.append(coefficient_symmetry_check(ctx))

        a = random_nilpotent(rng, ctx)
        checks.append(compare(euler_tensor(ctx, a, euler_dual(ctx, a)), ctx.zero(), f"euler_dual[{tag}]"))
        logger.debug(f"Chern case {tag} done")

    for name in ('add', 'mult'):
        law = law_by_name(name, profile['max_degree'])
        for rank in range(1, profile['whitney_max_rank'] + 1):
            ctx = ChernContext(law, rank, min(profile['max_caps'], 2))
            for r1 in range(rank + 1):
                checks.append(whitney_check(ctx, r1))
    return checks


def rr_suite(profile: Dict[str, Any], rng: random.Random, mutation: Optional[Mutation],
             threads: int = 1) -> List[CheckResult]:
    """Conner-Floyd pushforward, Chern characters, Todd classes and HRR"""
    checks = [verify_geometric_series_identity(profile['geometric_series_precision'])]

    multiplicative = SpecializedTheory.multiplicative()
    caps = profile['max_caps']
    if mutation is not None and mutation.kind == 'a':
        i, j = mutation.indices
        law = perturb_law(law_by_name('mult', profile['max_degree']), i, j)
        multiplicative = SpecializedTheory(law, multiplicative.normalization)
        checks.extend(law.axiom_results())
        # a root cap below max(i, j) truncates the perturbed monomial away
        reach = ProjectiveBundleContext(multiplicative.context(1, max(i, j, caps)))
        checks.append(cf_pushforward_check(multiplicative, reach, threads))
    for rank in range(1, profile['cf_max_rank'] + 1):
        ctx = multiplicative.context(rank, caps)
        pb = ProjectiveBundleContext(ctx)
        checks.append(cf_pushforward_check(multiplicative, pb, threads))
        if mutation is None or mutation.kind != 'a':
            for i in range(rank + 1):
                checks.append(verify_cf_product_expansion(pb, i))

    additive = SpecializedTheory.additive()
    clean_multiplicative = SpecializedTheory.multiplicative()
    for theory in (additive, clean_multiplicative):
        checks.append(theory.check_normalization())
        checks.append(geom_fgl_specialization_check(theory, caps))
        ctx = theory.context(2, caps)
        pb = ProjectiveBundleContext(ctx)
        a = random_nilpotent(rng, ctx)
        alpha = pb.reduce(random_series(rng, pb.zero(), caps + 3, 4))
        checks.append(verify_projection_formula(theory, pb, ctx.one().add(a), alpha))

    ctx = clean_multiplicative.context(2, caps)
    checks.append(chern_character_ring_map_check(ctx, chern_character_multiplicative))
    rational_ctx = additive.context(3, caps)
    checks.append(chern_character_ring_map_check(rational_ctx, chern_character_additive))

    todd = ToddData(rational_ctx.total_cap, perturbed=mutation is not None and mutation.kind == 'todd')
    first, rest = SplitBundle.of_roots(rational_ctx, [1]), SplitBundle.of_roots(rational_ctx, [2, 3])
    checks.append(compare(todd_class(rational_ctx, first.direct_sum(rest), todd),
                          todd_class(rational_ctx, first, todd).mul(todd_class(rational_ctx, rest, todd)),
                          'todd_multiplicativity'))

    hrr_todd = ToddData(profile['hrr_max_n'], perturbed=mutation is not None and mutation.kind == 'todd')
    for n in range(profile['hrr_max_n'] + 1):
        for d in range(profile['hrr_max_d'] + 1):
            try:
                value = hrr_projective_space(n, d, hrr_todd)
            except CobcalcError as e:
                checks.append(CheckResult.failure('hrr', f"P^{n}, O({d})", str(e), str(comb(n + d, n))))
                continue
            expected = comb(n + d, n)
            if value != expected:
                checks.append(CheckResult.failure('hrr', f"P^{n}, O({d})", str(value), str(expected)))
            else:
                checks.append(CheckResult(True, None, 'hrr'))
    return checks

# =============================================
# RUNNER
# =============================================

def _resolve_profile(name: str) -> Dict[str, Any]:
    profiles = get_calculator_rule('SELFTEST_PROFILES')
    if name not in profiles:
        raise InvalidRequest(f"Unknown profile '{name}'", flag='profile')
    return profiles[name]


def run_selftest(profile: str = 'quick', seed: Optional[int] = None, mutate: Optional[str] = None,
                 threads: int = 1, suites: Sequence[str] = SUITE_ORDER) -> List[SuiteResult]:
    """Run the suites in order; a suite that raises is recorded as failed"""
    sizes = _resolve_profile(profile)
    mutation = Mutation.parse(mutate)
    if mutation is not None and mutation.kind == 'a' and sum(mutation.indices) > sizes['max_degree']:
        raise InvalidRequest(f"a:{mutation.indices[0]},{mutation.indices[1]} lies beyond degree {sizes['max_degree']} "
                             f"of profile {profile}", flag='mutate')
    seed = get_setting('DEFAULT_SEED') if seed is None else seed
    rng = random.Random(seed)
    logger.info(f"Self-test profile {profile}, seed {seed}, mutation {mutation.to_text() if mutation else 'none'}")

    runners = {
        'ring_core': lambda: ring_core_suite(sizes, rng),
        'fgl': lambda: fgl_suite(sizes, mutation),
        'zeta': lambda: zeta_suite(sizes, threads),
        'chern': lambda: chern_suite(sizes, rng, mutation, threads),
        'rr': lambda: rr_suite(sizes, rng, mutation, threads),
    }
    results = []
    for name in suites:
        start = time.time()
        try:
            checks = runners[name]()
        except InvalidRequest:
            raise
        except CobcalcError as e:
            logger.error(f"Suite {name} raised: {e}")
            checks = [CheckResult.failure(name, type(e).__name__, str(e), 'no error')]
        result = SuiteResult(name, checks, time.time() - start)
        logger.info(f"Suite {name}: {len(checks)} checks, {'passed' if result.passed else 'FAILED'}")
        results.append(result)
    return results
