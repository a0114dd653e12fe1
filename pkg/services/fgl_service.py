"""
Cobordism Calculator - Formal Group Law Service
Universal law over the Lazard model, named laws, formal inverses,
n-series, point-class normalizations and specialization maps.
"""

import logging
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from algebra.exceptions import (
    AxiomViolation, NonNilpotentArgument, PrecisionTooLow, VariableMismatch
)
from algebra.rings import INTEGERS, RATIONALS, CoeffRing, PolynomialRing, lazard_ring
from algebra.series import (
    CheckResult, Series, combine_checks, compare, compositional_inverse,
    invert_unit, substitute
)
from config import get_calculator_rule, get_setting, is_feature_enabled
from utils.decorators import log_execution_time

logger = logging.getLogger(__name__)

X, Y, Z = 'x', 'y', 'z'
AXIOMS = ('unitality', 'commutativity', 'associativity', 'inverse')

# =============================================
# FORMAL GROUP LAWS
# =============================================

class FormalGroupLaw:
    """
    Validated bivariate series F(x, y)

    `precision` is the working order N: F itself may be exact (precision
    None on the series) while derived data such as the inverse and the
    logarithm are computed to order N.
    """

    def __init__(self, F: Series, precision: Optional[int] = None, name: Optional[str] = None,
                 validate: Optional[bool] = None, builder: Optional[Callable[[int], 'FormalGroupLaw']] = None):
        if F.nvars != 2:
            raise VariableMismatch(f"A formal group law needs two variables, got {F.variables}")
        if F.variables != (X, Y):
            F = F.rename({F.variables[0]: X, F.variables[1]: Y})
        if any(cap is not None for cap in F.cap_tuple):
            raise VariableMismatch("A formal group law cannot carry nilpotency caps")
        if precision is None:
            precision = F.precision if F.precision is not None else get_setting('DEFAULT_DEGREE')
        elif F.precision is not None and precision < F.precision:
            F = F.truncate(precision)
        elif F.precision is not None and precision > F.precision:
            logger.warning(f"Law {name} is only known to degree {F.precision}, not {precision}")
            precision = F.precision
        if precision < 1:
            raise PrecisionTooLow(f"A formal group law needs precision at least 1, got {precision}")

        self._F = F
        self._precision = precision
        self.name = name or 'custom'
        self._builder = builder
        self._lock = threading.Lock()
        self._inverse: Optional[Series] = None
        self._logarithm: Optional[Series] = None
        self._n_cache: Dict[int, Series] = {}

        if validate is None:
            validate = is_feature_enabled('eager_axiom_checks')
        if validate:
            for result in self.axiom_results():
                if not result.passed:
                    witness = result.witness
                    raise AxiomViolation(result.label, witness.degree if witness else None,
                                         witness.describe() if witness else '')
            logger.debug(f"Law {self.name} passed all axioms to degree {self._precision}")

    # Properties -----------------------------------------------------------

    @property
    def F(self) -> Series:
        return self._F

    @property
    def ring(self) -> CoeffRing:
        return self._F.ring

    @property
    def precision(self) -> int:
        return self._precision

    @property
    def is_exact(self) -> bool:
        return self._F.is_exact

    def __repr__(self) -> str:
        return f"<FormalGroupLaw {self.name} over {self.ring.name} to degree {self._precision}>"

    def x(self) -> Series:
        return Series.variable(self.ring, X, (X,))

    def coefficient(self, i: int, j: int):
        """a_ij, the coefficient of x^i y^j"""
        return self._F.coefficient((i, j))

    def coefficients(self) -> Dict[Tuple[int, int], Any]:
        table = {}
        for degree in range(2, self._precision + 1):
            for i in range(1, degree):
                table[(i, degree - i)] = self.coefficient(i, degree - i)
        return table

    # Derived data ---------------------------------------------------------

    @property
    def inverse_series(self) -> Series:
        """inv_F(x) with F(x, inv_F(x)) = 0"""
        with self._lock:
            if self._inverse is None:
                self._inverse = self._solve_inverse()
            return self._inverse

    def _solve_inverse(self) -> Series:
        x = self.x()
        ring = self.ring
        iota = x.neg().truncate(self._precision)
        for degree in range(2, self._precision + 1):
            value = substitute(self._F.truncate(degree), {X: x.truncate(degree), Y: iota.truncate(degree)})
            excess = value.coefficient((degree,))
            if not ring.is_zero(excess):
                iota = iota.sub(x.monomial_like((degree,), excess))
            logger.debug(f"Inverse of {self.name} solved through degree {degree}")
        if self.is_exact:
            candidate = Series(ring, (X,), iota.terms)
            if substitute(self._F, {X: x, Y: candidate}).is_zero():
                return candidate
        return iota

    def logarithm(self) -> Series:
        """ell(x) over the rationalized ring, from ell'(x) = 1 / F_y(x, 0)"""
        with self._lock:
            if self._logarithm is None:
                rational = self._F.to_rational()
                slope = rational.derivative(Y).coefficient_series(Y, 0)
                derivative = invert_unit(slope, precision=self._precision - 1)
                self._logarithm = derivative.integrate(X)
            return self._logarithm

    def n_series(self, n: int) -> Series:
        """[n]_F x; negative n goes through the inverse"""
        with self._lock:
            cached = self._n_cache.get(n)
        if cached is not None:
            return cached
        x = self.x()
        if n == 0:
            result = x.zero_like()
        elif n == 1:
            result = x
        elif n > 1:
            result = substitute(self._F, {X: self.n_series(n - 1), Y: x})
        else:
            result = substitute(self.n_series(-n), {X: self.inverse_series})
        with self._lock:
            self._n_cache[n] = result
        logger.debug(f"Cached [{n}]-series of {self.name}")
        return result

    # Operations on arbitrary series ----------------------------------------

    def apply(self, a: Series, b: Series) -> Series:
        return substitute(self._F, {X: a, Y: b})

    def invert(self, a: Series) -> Series:
        return substitute(self.inverse_series, {X: a})

    def multiply(self, n: int, a: Series) -> Series:
        return substitute(self.n_series(n), {X: a})

    def at_precision(self, n: int) -> 'FormalGroupLaw':
        """Same law with derived data to order n"""
        if n == self._precision:
            return self
        if self.is_exact:
            return FormalGroupLaw(self._F, precision=n, name=self.name, validate=False, builder=self._builder)
        if n <= self._F.precision:
            return FormalGroupLaw(self._F.truncate(n), name=self.name, validate=False, builder=self._builder)
        if self._builder is not None:
            logger.info(f"Rebuilding law {self.name} at degree {n}")
            return self._builder(n)
        raise PrecisionTooLow(f"Law {self.name} is only known to degree {self._F.precision}, {n} requested")

    # Axioms ---------------------------------------------------------------

    def axiom_results(self) -> List[CheckResult]:
        """One CheckResult per axiom, in the order unitality, commutativity, associativity, inverse"""
        F = self._F
        x, y = F.var(X), F.var(Y)
        zero = F.zero_like()
        unitality = combine_checks([
            compare(substitute(F, {Y: zero}, frame=F), x, 'unitality'),
            compare(substitute(F, {X: zero}, frame=F), y, 'unitality'),
        ], 'unitality')

        swapped = F.rename({X: Y, Y: X}).embed((X, Y))
        commutativity = compare(F, swapped, 'commutativity')

        frame = (X, Y, Z)
        F_xy = F.embed(frame)
        F_yz = F.rename({X: Y, Y: Z}).embed(frame)
        x3, z3 = F_xy.var(X), F_xy.var(Z)
        left = substitute(F, {X: F_xy, Y: z3})
        right = substitute(F, {X: x3, Y: F_yz})
        associativity = compare(left, right, 'associativity')

        inverse_value = substitute(F, {X: self.x(), Y: self.inverse_series})
        inverse = compare(inverse_value, inverse_value.zero_like(), 'inverse')
        return [unitality, commutativity, associativity, inverse]


def fgl_from_series(F: Series, precision: Optional[int] = None, name: Optional[str] = None) -> FormalGroupLaw:
    """Validate a bivariate series as a formal group law"""
    return FormalGroupLaw(F, precision=precision, name=name, validate=True)


def formal_sum(law: FormalGroupLaw, parts: Sequence[Series], frame: Optional[Series] = None) -> Series:
    """Left fold of F over the parts; the empty sum is 0"""
    if not parts:
        if frame is not None:
            return frame.zero_like()
        return Series.zero(law.ring, ())
    for part in parts:
        constant = part.constant_term() if part.precision is None or part.precision >= 0 else part.ring.zero
        if not part.ring.is_zero(constant):
            raise NonNilpotentArgument(f"{part.to_text()} has a nonzero constant term")
    total = parts[0]
    for part in parts[1:]:
        total = law.apply(total, part)
    return total


def n_series(law: FormalGroupLaw, n: int) -> Series:
    return law.n_series(n)

# =============================================
# NAMED LAWS
# =============================================

def law_text(name: str) -> str:
    """Defining series of a named law"""
    return get_calculator_rule('LAW_DEFINITIONS')[name]['series']


def additive_law(precision: Optional[int] = None, ring: CoeffRing = INTEGERS) -> FormalGroupLaw:
    return FormalGroupLaw(Series.parse(law_text('add'), (X, Y), ring), precision=precision, name='add')


def multiplicative_law(precision: Optional[int] = None, ring: CoeffRing = INTEGERS) -> FormalGroupLaw:
    return FormalGroupLaw(Series.parse(law_text('mult'), (X, Y), ring), precision=precision, name='mult')


def law_by_name(name: str, degree: Optional[int] = None) -> FormalGroupLaw:
    """Resolve add, mult or univ"""
    if name == 'add':
        return additive_law(degree)
    if name == 'mult':
        return multiplicative_law(degree)
    if name == 'univ':
        return universal_fgl(degree or get_setting('DEFAULT_DEGREE')).law
    raise ValueError(f"Unknown law: {name}")


def perturb_law(law: FormalGroupLaw, i: int, j: int) -> FormalGroupLaw:
    """
    Law with a_ij and a_ji changed: negated when nonzero, set to 1 otherwise.
    The result is not validated.
    """
    ring = law.ring
    value = law.coefficient(i, j)
    replacement = ring.one if ring.is_zero(value) else ring.neg(value)
    terms = law.F.terms
    for exps in {(i, j), (j, i)}:
        terms[exps] = replacement
    F = Series(ring, (X, Y), terms, law.F.precision)
    logger.warning(f"Perturbed a[{i},{j}] of {law.name}: {ring.to_text(value)} -> {ring.to_text(replacement)}")
    return FormalGroupLaw(F, precision=law.precision, name=f"{law.name}*", validate=False)

# =============================================
# LAZARD MODEL
# =============================================

class LazardModel:
    """
    Universal law F = exp(ell(x) + ell(y)) over ZZ[b1, ..., b_{N-1}]

    ell(x) = x + sum b_i x^(i+1) and exp is its compositional inverse.
    """

    def __init__(self, degree: int, verify_integrality: bool = True):
        if degree < 1:
            raise ValueError(f"degree must be at least 1, got {degree}")
        self.degree = degree
        self.ring: PolynomialRing = lazard_ring(max(degree - 1, 1))
        working = self.ring.rationalize() if verify_integrality else self.ring

        terms = {(1,): 1}
        for i in range(1, degree):
            terms[(i + 1,)] = working.gen(f"b{i}")
        log = Series(working, (X,), terms, degree)
        exp = compositional_inverse(log, degree)
        log_x = log.embed((X, Y))
        log_y = log.rename({X: Y}).embed((X, Y))
        F = substitute(exp, {X: log_x.add(log_y)})
        if verify_integrality:
            F = F.from_rational(self.ring)
            exp = exp.from_rational(self.ring)
            log = log.from_rational(self.ring)
            logger.debug(f"Universal law to degree {degree} has integral coefficients")

        self.log = log
        self.exp = exp
        self.law = FormalGroupLaw(F, name='univ', builder=lambda n: universal_fgl(n).law)

    @property
    def F(self) -> Series:
        return self.law.F

    def a(self, i: int, j: int):
        return self.law.coefficient(i, j)

    def verify_logarithm(self) -> CheckResult:
        """ell(F(x, y)) = ell(x) + ell(y)"""
        F = self.law.F
        lhs = substitute(self.log, {X: F})
        rhs = self.log.embed((X, Y)).add(self.log.rename({X: Y}).embed((X, Y)))
        return compare(lhs, rhs, 'logarithm')


@lru_cache(maxsize=None)
def _cached_model(degree: int, verify_integrality: bool) -> LazardModel:
    return LazardModel(degree, verify_integrality)


@log_execution_time
def universal_fgl(degree: int) -> LazardModel:
    if degree < 1:
        raise ValueError(f"degree must be at least 1, got {degree}")
    return _cached_model(degree, is_feature_enabled('verify_integrality'))

# =============================================
# NORMALIZATIONS
# =============================================

@dataclass(frozen=True)
class TheoryNormalization:
    """Table n -> [P^n] of point classes"""

    name: str
    ring: CoeffRing
    rule: Callable[[int], Any]
    bound: Optional[int] = None

    def point_class(self, n: int):
        if n < 0:
            raise ValueError(f"No projective space of dimension {n}")
        if self.bound is not None and n > self.bound:
            raise PrecisionTooLow(f"[P^{n}] is unknown in the {self.name} normalization")
        return self.ring.convert(self.rule(n))

    def values(self, count: int) -> List[Any]:
        return [self.point_class(n) for n in range(count)]

    def logarithm(self, precision: int, ring: Optional[CoeffRing] = None) -> Series:
        """sum [P^n] x^(n+1) / (n+1) over the rationalized ring"""
        ring = ring or self.ring
        rational = ring.rationalize()
        terms = {}
        for n in range(precision):
            value = rational.exact_quotient(ring.to_rational(ring.convert(self.point_class(n))), n + 1)
            terms[(n + 1,)] = value
        return Series(rational, (X,), terms, precision)

    def check(self, law: FormalGroupLaw) -> CheckResult:
        expected = self.logarithm(law.precision, law.ring)
        return compare(law.logarithm(), expected, 'normalization')

    @classmethod
    def additive(cls, ring: CoeffRing = INTEGERS) -> 'TheoryNormalization':
        return cls('add', ring, lambda n: 1 if n == 0 else 0)

    @classmethod
    def multiplicative(cls, ring: CoeffRing = INTEGERS) -> 'TheoryNormalization':
        return cls('mult', ring, lambda n: 1)

    @classmethod
    def universal(cls, model: LazardModel) -> 'TheoryNormalization':
        ring = model.ring

        def rule(n: int):
            if n == 0:
                return ring.one
            return ring.mul(ring.convert(n + 1), ring.gen(f"b{n}"))

        return cls('univ', ring, rule, bound=model.degree - 1)

# =============================================
# SPECIALIZATION
# =============================================

class RingHomomorphism:
    """
    Map from the Lazard model ZZ[b] to a target law's ring

    b_i goes to the x^(i+1) coefficient of the target logarithm, so the
    map may pass through the rationals; results are brought back to the
    target ring with an integrality check.
    """

    def __init__(self, model: LazardModel, target: FormalGroupLaw,
                 b_images: Dict[str, Any], a_images: Dict[Tuple[int, int], Any]):
        self.model = model
        self.target = target
        self.source = model.ring
        self.target_ring = target.ring
        self.b_images = b_images
        self.a_images = a_images

    def apply(self, element):
        rational = self.target_ring.rationalize()
        value = self.source.evaluate(self.source.convert(element), self.b_images, rational)
        return self.target_ring.from_rational(value)

    def apply_series(self, series: Series) -> Series:
        return series.map_coefficients(self.apply, self.target_ring)

    def verify(self) -> CheckResult:
        """apply(a_ij) equals the target's a_ij for every coefficient of the model"""
        ring = self.target_ring
        checks = 0
        for (i, j), a in self.model.law.coefficients().items():
            image = self.apply(a)
            expected = self.a_images[(i, j)]
            checks += 1
            if not ring.equal(image, expected):
                return CheckResult.failure('specialization', f"a[{i},{j}]", ring.to_text(image),
                                           ring.to_text(expected), degree=i + j,
                                           precision=self.model.degree)
        return CheckResult(True, self.model.degree, 'specialization', checks=checks)


def specialize_a(model: LazardModel, target: FormalGroupLaw) -> RingHomomorphism:
    """Classifying map of the target law, restricted to degree model.degree"""
    if target.precision < model.degree:
        if not target.is_exact:
            raise PrecisionTooLow(
                f"Target law {target.name} is known to degree {target.precision}, model needs {model.degree}"
            )
        target = target.at_precision(model.degree)
    logarithm = target.logarithm()
    rational = target.ring.rationalize()
    b_images = {}
    for i in range(1, model.ring.poly_ring.ngens + 1):
        exps = (i + 1,)
        if logarithm.precision is not None and i + 1 > logarithm.precision:
            b_images[f"b{i}"] = rational.zero
        else:
            b_images[f"b{i}"] = logarithm.coefficient(exps)
    a_images = {key: target.coefficient(*key) for key in model.law.coefficients()}
    logger.debug(f"Specialization to {target.name}: {len(b_images)} generator images")
    return RingHomomorphism(model, target, b_images, a_images)
