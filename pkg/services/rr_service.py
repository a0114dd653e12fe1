"""
Cobordism Calculator - Riemann-Roch Service
Specialized theories (additive over QQ, multiplicative over ZZ), pushforward
along projective bundles, Chern characters, Todd classes and the
Riemann-Roch checks built from them.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from algebra.exceptions import NonIntegerResult, UnsupportedTheory, WrongLaw
from algebra.rings import INTEGERS, RATIONALS, CoeffRing
from algebra.series import CheckResult, Series, combine_checks, compare, invert_unit, substitute
from config import get_setting
from services.chern_service import (
    ChernContext, ProjectiveBundleContext, SplitBundle, euler_dual, euler_tensor,
    pb_fundamental_coefficients
)
from services.fgl_service import (
    X, Y, FormalGroupLaw, TheoryNormalization, additive_law, law_text, multiplicative_law
)
from utils.decorators import log_execution_time

logger = logging.getLogger(__name__)

BundleSpec = Union[SplitBundle, Sequence[Series], None]

# =============================================
# THEORIES
# =============================================

@dataclass(frozen=True)
class SpecializedTheory:
    """A law together with its table of point classes [P^n]"""

    law: FormalGroupLaw
    normalization: TheoryNormalization

    @property
    def name(self) -> str:
        return self.normalization.name

    @property
    def ring(self) -> CoeffRing:
        return self.law.ring

    @classmethod
    def additive(cls, precision: Optional[int] = None) -> 'SpecializedTheory':
        return cls(additive_law(precision, RATIONALS), TheoryNormalization.additive(RATIONALS))

    @classmethod
    def multiplicative(cls, precision: Optional[int] = None) -> 'SpecializedTheory':
        return cls(multiplicative_law(precision, INTEGERS), TheoryNormalization.multiplicative(INTEGERS))

    @classmethod
    def for_law(cls, law: FormalGroupLaw,
                normalization: Optional[TheoryNormalization] = None) -> 'SpecializedTheory':
        """Attach the closed-form table of a named law, or a supplied one"""
        if normalization is not None:
            return cls(law, normalization)
        if law.name == 'add':
            return cls(law, TheoryNormalization.additive(law.ring))
        if law.name == 'mult':
            return cls(law, TheoryNormalization.multiplicative(law.ring))
        raise UnsupportedTheory(f"No point-class table for law {law.name}; supply a normalization")

    def context(self, roots=1, caps=None) -> ChernContext:
        return ChernContext(self.law, roots, caps)

    def point_context(self) -> ChernContext:
        """Chern context over a point: no roots"""
        return ChernContext(self.law, 0, ())

    def check_normalization(self) -> CheckResult:
        return self.normalization.check(self.law)

# =============================================
# PUSHFORWARD
# =============================================

@dataclass(frozen=True)
class PushforwardTable:
    """pi_!(t^i) for 0 <= i < r over the base of a projective bundle"""

    pb: ProjectiveBundleContext
    values: Tuple[Series, ...]

    @classmethod
    def build(cls, theory: SpecializedTheory, pb: ProjectiveBundleContext, threads: int = 1) -> 'PushforwardTable':
        """pi_!(t^i) = sum_j [P^j] u_(i+j)"""
        base = pb.base
        if base.ring != theory.ring or base.law.name != theory.law.name:
            raise WrongLaw(f"Bundle over law {base.law.name} cannot be pushed forward in theory {theory.name}")
        u = pb_fundamental_coefficients(base, bundle=pb.bundle, threads=threads)
        values = []
        for i in range(pb.rank):
            total = base.zero()
            for j in range(len(u) - i):
                point = theory.normalization.point_class(j)
                if not theory.ring.is_zero(point):
                    total = total.add(u[i + j].scale(point))
            values.append(total)
        return cls(pb, tuple(values))

    def value(self, i: int) -> Series:
        if i < len(self.values):
            return self.values[i]
        return self.apply(self.pb.t_power(i))

    def apply(self, element: Series) -> Series:
        """Linear extension through the normal form"""
        result = self.pb.base.zero()
        for c, value in zip(self.pb.normal_form(element), self.values):
            result = result.add(c.mul(value))
        return result

    def to_payload(self) -> Dict[str, Any]:
        return {f"t^{i}": value.to_json() for i, value in enumerate(self.values)}


def pushforward_projective(theory: SpecializedTheory, pb: ProjectiveBundleContext, element: Series) -> Series:
    return PushforwardTable.build(theory, pb).apply(element)


def unit_pushforward(theory: SpecializedTheory, rank: int, ctx: Optional[ChernContext] = None) -> Series:
    """pi_!(1) for the trivial bundle of the given rank, i.e. [P^(rank-1)]"""
    ctx = ctx or theory.point_context()
    pb = ProjectiveBundleContext(ctx, SplitBundle.trivial(ctx, rank))
    return PushforwardTable.build(theory, pb).value(0)


def verify_projection_formula(theory: SpecializedTheory, pb: ProjectiveBundleContext,
                              a: Series, alpha: Series) -> CheckResult:
    """pi_!(pi^*(a) alpha) = a pi_!(alpha)"""
    table = PushforwardTable.build(theory, pb)
    lhs = table.apply(pb.mul(pb.lift(a), alpha))
    rhs = a.mul(table.apply(alpha))
    return compare(lhs, rhs, 'projection_formula')


def cf_pushforward_check(theory: SpecializedTheory, pb: ProjectiveBundleContext,
                         threads: int = 1) -> CheckResult:
    """pi_!(t^i) = 1 for every i < r"""
    table = PushforwardTable.build(theory, pb, threads)
    one = pb.base.one()
    return combine_checks(
        [compare(value, one, f"cf_pushforward[t^{i}]") for i, value in enumerate(table.values)],
        'cf_pushforward'
    )


def verify_cf_product_expansion(pb: ProjectiveBundleContext, i: int) -> CheckResult:
    """
    t^i = prod over k <= i of ((1 - e(L_k^dual)) F(e(L_k), t) + e(L_k^dual)) for the
    multiplicative law, and the pushforward of the expanded product,
    sum over I of prod_I (1 - e(L^dual)) prod_(I^c) e(L^dual), is 1
    """
    _require_multiplicative(pb.law)
    if not 0 <= i <= pb.rank:
        raise ValueError(f"Expansion index {i} outside 0..{pb.rank}")
    t = pb.t()
    one = pb.one()
    product = one
    for root, dual in zip(pb.bundle.roots[:i], pb.dual_roots[:i]):
        twisted = pb.law.apply(pb.lift(root), t)
        delta = pb.lift(dual)
        product = product.mul(one.sub(delta).mul(twisted).add(delta))
    expansion = compare(pb.reduce(product), pb.t_power(i), 'cf_product_expansion')

    base = pb.base
    duals = pb.dual_roots[:i]
    total = base.zero()
    for size in range(i + 1):
        for chosen in combinations(range(i), size):
            term = base.one()
            for k, dual in enumerate(duals):
                term = term.mul(base.one().sub(dual) if k in chosen else dual)
            total = total.add(term)
    partition = compare(total, base.one(), 'cf_product_expansion')
    return combine_checks([expansion, partition], 'cf_product_expansion')

# =============================================
# SERIES OVER QQ
# =============================================

def exponential_series(precision: int, ring: CoeffRing = RATIONALS) -> Series:
    """exp(x) to x^precision"""
    terms = {(k,): Fraction(1, factorial(k)) for k in range(precision + 1)}
    return Series(ring, (X,), terms, precision)


def geometric_ratio(precision: int, perturbed: bool = False) -> Series:
    """-x/(1-x), or -x/(1+x) when perturbed"""
    x = Series.variable(RATIONALS, X, (X,))
    denominator = x.one_like().add(x) if perturbed else x.one_like().sub(x)
    return x.neg().mul(invert_unit(denominator, precision)).truncate(precision)


def verify_geometric_series_identity(precision: int, ratio: Optional[Series] = None) -> CheckResult:
    """sum over i of ratio^i equals 1 - x; the sum stops once ratio^i vanishes at this precision"""
    if precision < 1:
        raise ValueError(f"precision must be at least 1, got {precision}")
    ratio = geometric_ratio(precision) if ratio is None else ratio.truncate(precision)
    total = ratio.one_like(precision)
    power = ratio.one_like()
    for _ in range(precision):
        power = power.mul(ratio).truncate(precision)
        total = total.add(power)
    x = ratio.var(X)
    expected = x.one_like().sub(x).truncate(precision)
    return compare(total, expected, 'geometric_series')


class ToddData:
    """
    Todd series x/(1 - exp(-x)) over QQ to a fixed precision

    Built as the inverse of sum (-1)^k x^k/(k+1)!. `perturbed` flips the
    sign of the x^2 coefficient.
    """

    def __init__(self, precision: int, perturbed: bool = False):
        if precision < 0:
            raise ValueError(f"precision must be nonnegative, got {precision}")
        self.precision = precision
        self.perturbed = perturbed
        quotient = Series(RATIONALS, (X,),
                          {(k,): Fraction((-1) ** k, factorial(k + 1)) for k in range(precision + 1)},
                          precision)
        series = invert_unit(quotient)
        if perturbed and precision >= 2:
            terms = series.terms
            terms[(2,)] = RATIONALS.neg(series.coefficient((2,)))
            series = Series(RATIONALS, (X,), terms, precision)
            logger.warning("Todd series perturbed: x^2 coefficient flipped")
        self.todd_series = series

    def coefficients(self) -> List[Any]:
        return [self.todd_series.coefficient((k,)) for k in range(self.precision + 1)]

    def factor(self, ctx: ChernContext, root: Series) -> Series:
        """Td of a line bundle with Euler class root"""
        ctx.require_nilpotent(root)
        return substitute(self.todd_series, {X: root})

    def of_line(self, element: Series) -> Series:
        """Todd series evaluated at an element of any frame"""
        return substitute(self.todd_series, {X: element})


def _require_rational(ctx: ChernContext, what: str):
    if ctx.ring.rationalize() != ctx.ring:
        raise UnsupportedTheory(f"{what} needs coefficients in QQ, got {ctx.ring.name}")


def _bundle_roots(ctx: ChernContext, bundle: BundleSpec) -> List[Series]:
    if bundle is None:
        return ctx.roots()
    if isinstance(bundle, SplitBundle):
        return list(bundle.roots)
    return [ctx.check(root) for root in bundle]


def todd_class(ctx: ChernContext, bundle: BundleSpec = None, todd: Optional[ToddData] = None) -> Series:
    """Product of the Todd factors of the roots"""
    _require_rational(ctx, 'todd_class')
    todd = todd or ToddData(ctx.total_cap)
    result = ctx.one()
    for root in _bundle_roots(ctx, bundle):
        result = result.mul(todd.factor(ctx, root))
    return result

# =============================================
# CHERN CHARACTERS
# =============================================

def _require_multiplicative(law: FormalGroupLaw):
    if law.F != Series.parse(law_text('mult'), (X, Y), law.ring):
        raise WrongLaw(f"Law {law.name} is not the multiplicative law x + y - xy")


def chern_character_multiplicative(ctx: ChernContext, bundle: BundleSpec = None) -> Series:
    """ch(E) = sum over roots of 1 - e(L^dual), i.e. rank - c_1(E^dual) on line bundles"""
    _require_multiplicative(ctx.law)
    result = ctx.zero()
    for root in _bundle_roots(ctx, bundle):
        result = result.add(ctx.one().sub(euler_dual(ctx, root)))
    return result


def chern_character_additive(ctx: ChernContext, bundle: BundleSpec = None) -> Series:
    """ch(E) = sum over roots of exp(root)"""
    _require_rational(ctx, 'chern_character_additive')
    exponential = exponential_series(ctx.total_cap, ctx.ring)
    result = ctx.zero()
    for root in _bundle_roots(ctx, bundle):
        ctx.require_nilpotent(root)
        result = result.add(substitute(exponential, {X: root}))
    return result


def chern_character_ring_map_check(ctx: ChernContext, character=chern_character_multiplicative) -> CheckResult:
    """ch(L1 (x) L2) = ch(L1) ch(L2) and ch of a trivial bundle is its rank, on the first two roots"""
    if ctx.rank < 2:
        raise ValueError("The ring-map check needs two roots")
    a, b = ctx.root(1), ctx.root(2)
    tensor = character(ctx, [euler_tensor(ctx, a, b)])
    product = character(ctx, [a]).mul(character(ctx, [b]))
    trivial = character(ctx, SplitBundle.trivial(ctx, 3))
    return combine_checks([
        compare(tensor, product, 'chern_character'),
        compare(trivial, ctx.constant(3), 'chern_character'),
    ], 'chern_character')

# =============================================
# RIEMANN-ROCH
# =============================================

@log_execution_time
def hrr_projective_space(n: int, d: int, todd: Optional[ToddData] = None) -> int:
    """
    chi(P^n, O(d)) as pi_!(ch(O(d)) Td(T P^n)) in the additive theory

    The tangent bundle contributes Td(t)^(n+1) and the pushforward to a
    point extracts the coefficient of t^n.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    theory = SpecializedTheory.additive(n + 1)
    point = theory.point_context()
    pb = ProjectiveBundleContext(point, SplitBundle.trivial(point, n + 1))
    todd = todd or ToddData(n)
    t = pb.t()
    character = substitute(exponential_series(n), {X: t.scale(d)})
    tangent = todd.of_line(t).truncate(n).power(n + 1)
    value = pushforward_projective(theory, pb, character.mul(tangent).truncate(n)).scalar_value()
    fraction = Fraction(int(value.numerator), int(value.denominator))
    if fraction.denominator != 1:
        raise NonIntegerResult(f"chi(P^{n}, O({d})) came out as {fraction}")
    logger.debug(f"chi(P^{n}, O({d})) = {fraction.numerator}")
    return fraction.numerator


def geom_fgl_specialization_check(theory: SpecializedTheory, caps: Optional[int] = None,
                                  pair: Optional[Tuple[Series, Series]] = None) -> CheckResult:
    """
    e(L1 (x) L2) = e1 + e2 - e1 e2 [P1] - e1 e2 e(L1 (x) L2) ([P2] - [P3])

    P1 = P(L1 + O), P2 = P(L1 + L1 L2 + O) and P3 is the P^1-bundle
    P(O(1) + O) over P(L1 + L1 L2); the classes are computed as
    pushforwards of 1 in the theory.
    """
    caps = get_setting('DEFAULT_CAPS') if caps is None else caps
    ctx = theory.context(2, caps)
    e1, e2 = pair if pair is not None else (ctx.root(1), ctx.root(2))
    product = euler_tensor(ctx, e1, e2)
    zero = ctx.zero()

    def pushed_unit(bundle: SplitBundle) -> Series:
        return PushforwardTable.build(theory, ProjectiveBundleContext(ctx, bundle)).value(0)

    p1 = pushed_unit(SplitBundle((e1, zero)))
    p2 = pushed_unit(SplitBundle((e1, product, zero)))
    # fiber pushforward of P(O(1) + O) is the trivial rank-2 value in both closed-form theories
    inner = ProjectiveBundleContext(ctx, SplitBundle((e1, product)))
    fiber = inner.lift(unit_pushforward(theory, 2, ctx))
    p3 = PushforwardTable.build(theory, inner).apply(fiber)

    rhs = e1.add(e2).sub(e1.mul(e2).mul(p1)).sub(e1.mul(e2).mul(product).mul(p2.sub(p3)))
    return compare(product, rhs, 'geom_fgl')
