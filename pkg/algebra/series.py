"""
Cobordism Calculator - Power Series
Sparse multivariate power series over exact coefficient rings, truncated
in total degree and optionally capped per variable (x^(cap+1) = 0).
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import Rational, Symbol
from sympy.polys import Poly
from sympy.parsing.sympy_parser import parse_expr
from sympy.polys.monomials import monomial_deg, monomial_div, monomial_mul
from sympy.polys.orderings import grlex

from algebra.exceptions import (
    BadLowestTerm, DivergentSubstitution, NotAUnit, PrecisionTooLow, RingMismatch,
    SeriesError, SeriesParseError, UngradedRing, VariableMismatch
)
from algebra.rings import (
    INTEGERS, PARSE_TRANSFORMATIONS, RATIONALS, CoeffRing, PolynomialRing,
    join_terms, monomial_text, natural_key, parse_ring, term_body
)

logger = logging.getLogger(__name__)

Exps = Tuple[int, ...]
Caps = Tuple[Optional[int], ...]

# =============================================
# EXPONENT VECTORS
# =============================================

class ExponentVector(tuple):
    """Per-variable nonnegative exponents of a monomial"""

    def __new__(cls, exps: Iterable[int]):
        values = tuple(int(e) for e in exps)
        if any(e < 0 for e in values):
            raise ValueError(f"Negative exponent in {values}")
        return super().__new__(cls, values)

    @classmethod
    def indicator(cls, mask: int, length: int) -> 'ExponentVector':
        """x^I for the subset I encoded by mask (bit 0 = first variable)"""
        return cls((mask >> i) & 1 for i in range(length))

    @property
    def degree(self) -> int:
        return monomial_deg(self)

    @property
    def support(self) -> frozenset:
        return frozenset(i for i, e in enumerate(self) if e)

    @property
    def mask(self) -> int:
        return sum(1 << i for i, e in enumerate(self) if e)

    def times(self, other: Sequence[int]) -> 'ExponentVector':
        return ExponentVector(monomial_mul(self, tuple(other)))

    def quotient(self, other: Sequence[int]) -> Optional['ExponentVector']:
        result = monomial_div(self, tuple(other))
        return None if result is None else ExponentVector(result)

# =============================================
# PRECISION HELPERS
# =============================================

def min_precision(*values: Optional[int]) -> Optional[int]:
    """Minimum of precisions where None means exact"""
    finite = [v for v in values if v is not None]
    return min(finite) if finite else None


def _normalize_caps(variables: Tuple[str, ...], caps) -> Caps:
    if caps is None:
        return (None,) * len(variables)
    if isinstance(caps, Mapping):
        unknown = set(caps) - set(variables)
        if unknown:
            raise VariableMismatch(f"Caps given for unknown variables {sorted(unknown)}")
        values = tuple(caps.get(v) for v in variables)
    else:
        values = tuple(caps)
        if len(values) != len(variables):
            raise VariableMismatch(f"Expected {len(variables)} caps, got {len(values)}")
    for value in values:
        if value is not None and value < 0:
            raise ValueError(f"Caps must be nonnegative, got {value}")
    return values


def _normalize_precision(precision: Optional[int], caps: Caps) -> Optional[int]:
    if precision is None:
        return None
    precision = max(int(precision), -1)
    if all(c is not None for c in caps) and precision >= sum(caps):
        return None
    return precision


def _within_caps(exps: Exps, caps: Caps) -> bool:
    for e, cap in zip(exps, caps):
        if cap is not None and e > cap:
            return False
    return True

# =============================================
# SERIES
# =============================================

class Series:
    """
    Truncated multivariate power series

    Terms of total degree above `precision` are unknown; precision None means
    the series is exact. Stored terms are nonzero and respect precision and
    caps. Instances are immutable.
    """

    __slots__ = ('_ring', '_variables', '_caps', '_precision', '_terms')

    def __init__(self, ring: CoeffRing, variables: Sequence[str],
                 terms: Optional[Mapping[Sequence[int], Any]] = None,
                 precision: Optional[int] = None, caps=None):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise VariableMismatch(f"Repeated variable in {variables}")
        self._ring = ring
        self._variables = variables
        self._caps = _normalize_caps(variables, caps)
        self._precision = _normalize_precision(precision, self._caps)
        self._terms: Dict[Exps, Any] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(variables):
                raise VariableMismatch(f"Exponent vector {exps} does not match {variables}")
            if not self._admits(exps):
                continue
            coeff = ring.convert(coeff)
            if not ring.is_zero(coeff):
                self._terms[exps] = coeff

    @classmethod
    def _raw(cls, ring: CoeffRing, variables: Tuple[str, ...], caps: Caps,
             precision: Optional[int], terms: Dict[Exps, Any]) -> 'Series':
        series = object.__new__(cls)
        series._ring = ring
        series._variables = variables
        series._caps = caps
        series._precision = _normalize_precision(precision, caps)
        series._terms = terms
        return series

    def _like(self, terms: Mapping[Exps, Any], precision: Optional[int]) -> 'Series':
        """Same frame, trusted exponents; drops zeros and terms beyond precision"""
        ring = self._ring
        precision = _normalize_precision(precision, self._caps)
        kept = {
            exps: coeff for exps, coeff in terms.items()
            if not ring.is_zero(coeff) and (precision is None or sum(exps) <= precision)
        }
        return Series._raw(ring, self._variables, self._caps, precision, kept)

    def _admits(self, exps: Exps) -> bool:
        if self._precision is not None and sum(exps) > self._precision:
            return False
        return _within_caps(exps, self._caps)

    # Constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, ring: CoeffRing, variables: Sequence[str], precision: Optional[int] = None,
             caps=None) -> 'Series':
        return cls(ring, variables, {}, precision, caps)

    @classmethod
    def constant(cls, ring: CoeffRing, value, variables: Sequence[str],
                 precision: Optional[int] = None, caps=None) -> 'Series':
        return cls(ring, variables, {(0,) * len(tuple(variables)): value}, precision, caps)

    @classmethod
    def one(cls, ring: CoeffRing, variables: Sequence[str], precision: Optional[int] = None,
            caps=None) -> 'Series':
        return cls.constant(ring, 1, variables, precision, caps)

    @classmethod
    def variable(cls, ring: CoeffRing, name: str, variables: Sequence[str],
                 precision: Optional[int] = None, caps=None) -> 'Series':
        variables = tuple(variables)
        if name not in variables:
            raise VariableMismatch(f"{name} is not one of {variables}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(ring, variables, {exps: 1}, precision, caps)

    @classmethod
    def monomial(cls, ring: CoeffRing, exps: Sequence[int], variables: Sequence[str],
                 coeff=1, precision: Optional[int] = None, caps=None) -> 'Series':
        return cls(ring, variables, {tuple(exps): coeff}, precision, caps)

    def zero_like(self, precision: Optional[int] = None) -> 'Series':
        return Series._raw(self._ring, self._variables, self._caps, precision, {})

    def one_like(self, precision: Optional[int] = None) -> 'Series':
        return self.constant_like(self._ring.one, precision)

    def constant_like(self, value, precision: Optional[int] = None) -> 'Series':
        return Series(self._ring, self._variables, {(0,) * len(self._variables): value},
                      precision, self._caps)

    def var(self, name: str) -> 'Series':
        return Series.variable(self._ring, name, self._variables, None, self._caps)

    def monomial_like(self, exps: Sequence[int], coeff=1, precision: Optional[int] = None) -> 'Series':
        return Series(self._ring, self._variables, {tuple(exps): coeff}, precision, self._caps)

    # Properties -----------------------------------------------------------

    @property
    def ring(self) -> CoeffRing:
        return self._ring

    @property
    def variables(self) -> Tuple[str, ...]:
        return self._variables

    @property
    def nvars(self) -> int:
        return len(self._variables)

    @property
    def precision(self) -> Optional[int]:
        return self._precision

    @property
    def is_exact(self) -> bool:
        return self._precision is None

    @property
    def caps(self) -> Dict[str, int]:
        return {v: c for v, c in zip(self._variables, self._caps) if c is not None}

    @property
    def cap_tuple(self) -> Caps:
        return self._caps

    @property
    def terms(self) -> Dict[Exps, Any]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def items(self) -> List[Tuple[ExponentVector, Any]]:
        """Terms in canonical graded-lex order"""
        return [(ExponentVector(exps), self._terms[exps])
                for exps in sorted(self._terms, key=grlex)]

    def is_zero(self) -> bool:
        return not self._terms

    def low_degree(self) -> Optional[int]:
        if not self._terms:
            return None
        return min(sum(exps) for exps in self._terms)

    def _order(self):
        if self._terms:
            return min(sum(exps) for exps in self._terms)
        return math.inf if self._precision is None else self._precision + 1

    def coefficient(self, exps: Sequence[int]):
        exps = tuple(exps)
        if self._precision is not None and sum(exps) > self._precision:
            raise PrecisionTooLow(
                f"coefficient of {monomial_text(self._variables, exps)} lies beyond precision {self._precision}"
            )
        return self._terms.get(exps, self._ring.zero)

    def constant_term(self):
        return self.coefficient((0,) * len(self._variables))

    def scalar_value(self):
        """Value of a series in zero variables"""
        if self._variables:
            raise VariableMismatch("scalar_value needs a series without variables")
        return self._terms.get((), self._ring.zero)

    # Frames ---------------------------------------------------------------

    def same_frame(self, other: 'Series') -> bool:
        return (self._variables == other._variables and self._caps == other._caps
                and self._ring == other._ring)

    def check_compatible(self, other: 'Series'):
        if self._variables != other._variables:
            raise VariableMismatch(f"Variables differ: {self._variables} vs {other._variables}")
        if self._caps != other._caps:
            raise VariableMismatch(f"Caps differ: {self.caps} vs {other.caps}")
        if self._ring != other._ring:
            raise RingMismatch(f"Rings differ: {self._ring.name} vs {other._ring.name}")

    # Arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> 'Series':
        if isinstance(other, Series):
            return other
        return self.constant_like(other)

    def add(self, other: 'Series') -> 'Series':
        self.check_compatible(other)
        ring = self._ring
        terms = dict(self._terms)
        for exps, coeff in other._terms.items():
            previous = terms.get(exps)
            terms[exps] = coeff if previous is None else ring.add(previous, coeff)
        return self._like(terms, min_precision(self._precision, other._precision))

    def neg(self) -> 'Series':
        ring = self._ring
        return self._like({exps: ring.neg(c) for exps, c in self._terms.items()}, self._precision)

    def sub(self, other: 'Series') -> 'Series':
        return self.add(other.neg())

    def scale(self, value) -> 'Series':
        ring = self._ring
        factor = ring.convert(value)
        return self._like({exps: ring.mul(c, factor) for exps, c in self._terms.items()},
                          self._precision)

    def _product_precision(self, other: 'Series') -> Optional[int]:
        candidates = []
        if self._precision is not None:
            candidates.append(self._precision + other._order())
        if other._precision is not None:
            candidates.append(other._precision + self._order())
        if not candidates:
            return None
        bound = min(candidates)
        return None if bound == math.inf else int(bound)

    def mul(self, other: 'Series') -> 'Series':
        self.check_compatible(other)
        precision = self._product_precision(other)
        if not self._terms or not other._terms:
            return self._like({}, precision)
        ring = self._ring
        caps = self._caps
        capped = any(c is not None for c in caps)
        buckets: Dict[int, List[Tuple[Exps, Any]]] = {}
        for exps, coeff in other._terms.items():
            buckets.setdefault(sum(exps), []).append((exps, coeff))
        degrees = sorted(buckets)
        result: Dict[Exps, Any] = {}
        for exps_a, coeff_a in self._terms.items():
            degree_a = sum(exps_a)
            for degree_b in degrees:
                if precision is not None and degree_a + degree_b > precision:
                    break
                for exps_b, coeff_b in buckets[degree_b]:
                    exps = monomial_mul(exps_a, exps_b)
                    if capped and not _within_caps(exps, caps):
                        continue
                    product = ring.mul(coeff_a, coeff_b)
                    previous = result.get(exps)
                    result[exps] = product if previous is None else ring.add(previous, product)
        return self._like(result, precision)

    def power(self, k: int) -> 'Series':
        if k < 0:
            return invert_unit(self).power(-k)
        result = self.one_like()
        base = self
        while k:
            if k & 1:
                result = result.mul(base)
            k >>= 1
            if k:
                base = base.mul(base)
        return result

    def __add__(self, other):
        return self.add(self._coerce(other))

    def __radd__(self, other):
        return self._coerce(other).add(self)

    def __sub__(self, other):
        return self.sub(self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other).sub(self)

    def __neg__(self):
        return self.neg()

    def __mul__(self, other):
        if isinstance(other, Series):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        return self.power(k)

    # Truncation and monomials ---------------------------------------------

    def truncate(self, n: int) -> 'Series':
        return self._like(self._terms, min_precision(self._precision, n))

    def mul_monomial(self, exps: Sequence[int]) -> 'Series':
        exps = tuple(exps)
        shift = sum(exps)
        moved = {}
        for own, coeff in self._terms.items():
            combined = monomial_mul(own, exps)
            if _within_caps(combined, self._caps):
                moved[combined] = coeff
        precision = None if self._precision is None else self._precision + shift
        return self._like(moved, precision)

    def divide_monomial(self, exps: Sequence[int]) -> 'Series':
        exps = tuple(exps)
        moved = {}
        for own, coeff in self._terms.items():
            quotient = monomial_div(own, exps)
            if quotient is None:
                raise SeriesError(
                    f"{monomial_text(self._variables, own)} is not divisible by "
                    f"{monomial_text(self._variables, exps)}"
                )
            moved[quotient] = coeff
        precision = None if self._precision is None else self._precision - sum(exps)
        return self._like(moved, precision)

    # Calculus -------------------------------------------------------------

    def _index(self, name: str) -> int:
        try:
            return self._variables.index(name)
        except ValueError:
            raise VariableMismatch(f"{name} is not one of {self._variables}")

    def derivative(self, name: str) -> 'Series':
        index = self._index(name)
        ring = self._ring
        terms = {}
        for exps, coeff in self._terms.items():
            e = exps[index]
            if e:
                lowered = exps[:index] + (e - 1,) + exps[index + 1:]
                terms[lowered] = ring.mul(coeff, ring.convert(e))
        precision = None if self._precision is None else self._precision - 1
        return self._like(terms, precision)

    def integrate(self, name: str) -> 'Series':
        """Antiderivative with zero constant of integration; needs divisions by integers"""
        index = self._index(name)
        ring = self._ring
        terms = {}
        for exps, coeff in self._terms.items():
            e = exps[index]
            raised = exps[:index] + (e + 1,) + exps[index + 1:]
            if _within_caps(raised, self._caps):
                terms[raised] = ring.exact_quotient(coeff, e + 1)
        precision = None if self._precision is None else self._precision + 1
        return self._like(terms, precision)

    def coefficient_series(self, name: str, m: int) -> 'Series':
        """Coefficient of name^m as a series in the remaining variables"""
        index = self._index(name)
        variables = self._variables[:index] + self._variables[index + 1:]
        caps = self._caps[:index] + self._caps[index + 1:]
        terms = {
            exps[:index] + exps[index + 1:]: coeff
            for exps, coeff in self._terms.items() if exps[index] == m
        }
        precision = None if self._precision is None else self._precision - m
        return Series._raw(self._ring, variables, caps, precision, terms)

    # Frame changes --------------------------------------------------------

    def rename(self, mapping: Mapping[str, str]) -> 'Series':
        variables = tuple(mapping.get(v, v) for v in self._variables)
        if len(set(variables)) != len(variables):
            raise VariableMismatch(f"Renaming {mapping} merges variables")
        return Series._raw(self._ring, variables, self._caps, self._precision, dict(self._terms))

    def embed(self, variables: Sequence[str], caps=None) -> 'Series':
        """Move into a larger frame; caps default to the current ones"""
        variables = tuple(variables)
        missing = set(self._variables) - set(variables)
        if missing:
            raise VariableMismatch(f"Target frame lacks {sorted(missing)}")
        given = _normalize_caps(variables, caps) if caps is not None else None
        own = dict(zip(self._variables, self._caps))
        new_caps = tuple(
            (given[i] if given is not None else own.get(v)) for i, v in enumerate(variables)
        )
        positions = [variables.index(v) for v in self._variables]
        terms = {}
        for exps, coeff in self._terms.items():
            placed = [0] * len(variables)
            for position, e in zip(positions, exps):
                placed[position] = e
            terms[tuple(placed)] = coeff
        return Series(self._ring, variables, terms, self._precision, new_caps)

    def restrict(self, variables: Sequence[str]) -> 'Series':
        """Drop variables that no term uses"""
        variables = tuple(variables)
        indices = [self._index(v) for v in variables]
        dropped = [i for i in range(len(self._variables)) if i not in indices]
        terms = {}
        for exps, coeff in self._terms.items():
            if any(exps[i] for i in dropped):
                raise VariableMismatch(
                    f"{monomial_text(self._variables, exps)} uses a variable outside {variables}"
                )
            terms[tuple(exps[i] for i in indices)] = coeff
        caps = tuple(self._caps[i] for i in indices)
        return Series(self._ring, variables, terms, self._precision, caps)

    def map_coefficients(self, function: Callable[[Any], Any], ring: CoeffRing) -> 'Series':
        terms = {exps: function(coeff) for exps, coeff in self._terms.items()}
        return Series(ring, self._variables, terms, self._precision, self._caps)

    def to_rational(self) -> 'Series':
        return self.map_coefficients(self._ring.to_rational, self._ring.rationalize())

    def from_rational(self, ring: CoeffRing) -> 'Series':
        """Bring a series over ring.rationalize() back to ring; IntegralityFailure on denominators"""
        return self.map_coefficients(ring.from_rational, ring)

    # Grading --------------------------------------------------------------

    def is_homogeneous(self, degree: int) -> bool:
        """Monomial degree minus coefficient degree equals `degree` for every term"""
        if not self._ring.is_graded:
            raise UngradedRing(f"{self._ring.name} carries no grading")
        for exps, coeff in self._terms.items():
            weights = self._ring.weighted_degrees(coeff)
            if any(sum(exps) - w != degree for w in weights):
                return False
        return True

    # Text and JSON --------------------------------------------------------

    def to_text(self) -> str:
        parts = []
        for exps, coeff in self.items():
            negative, magnitude, _ = self._ring.split_sign(coeff)
            parts.append((negative, term_body(magnitude, monomial_text(self._variables, exps))))
        return join_terms(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Series({self.to_text()!r}, ring={self._ring.name}, precision={self._precision})"

    def to_json(self) -> Dict[str, Any]:
        return {
            'ring': self._ring.name,
            'vars': list(self._variables),
            'precision': self._precision,
            'caps': self.caps,
            'terms': [
                {'exps': list(exps), 'coeff': self._ring.to_text(coeff)}
                for exps, coeff in self.items()
            ],
        }

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> 'Series':
        try:
            ring = parse_ring(payload['ring'])
            variables = tuple(payload['vars'])
            terms = {}
            for term in payload['terms']:
                exps = tuple(int(e) for e in term['exps'])
                coeff = ring.parse(str(term['coeff']))
                previous = terms.get(exps)
                terms[exps] = coeff if previous is None else ring.add(previous, coeff)
            return cls(ring, variables, terms, payload.get('precision'), payload.get('caps') or None)
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, SeriesParseError):
                raise
            raise SeriesParseError(f"Malformed series JSON: {e}")

    @classmethod
    def parse(cls, text: str, variables: Sequence[str], ring: Optional[CoeffRing] = None,
              precision: Optional[int] = None, caps=None) -> 'Series':
        """Read canonical text such as '1 - 2*b1*x*y + 3*x^2'"""
        variables = tuple(variables)
        symbols = {name: Symbol(name) for name in variables}
        if ring is not None:
            symbols.update({name: Symbol(name) for name in ring.generators()})
        try:
            expr = parse_expr(text, local_dict=symbols, transformations=PARSE_TRANSFORMATIONS)
        except Exception as e:
            raise SeriesParseError(f"Cannot parse series '{text}': {e}")
        extra = sorted({str(s) for s in expr.free_symbols} - set(variables), key=natural_key)
        if ring is None:
            ring = infer_ring(expr, extra)
        if not variables:
            return cls.constant(ring, ring.from_sympy(expr), (), precision, caps)
        try:
            poly = Poly(expr, *[symbols[v] for v in variables])
        except Exception as e:
            raise SeriesParseError(f"'{text}' is not a polynomial in {variables}: {e}")
        terms = {}
        for monom, coeff in poly.terms():
            terms[tuple(monom)] = ring.from_sympy(coeff)
        return cls(ring, variables, terms, precision, caps)

    # Equality -------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return (self.same_frame(other) and self._precision == other._precision
                and self._terms == other._terms)

    __hash__ = None


def infer_ring(expr, extra_symbols: Sequence[str]) -> CoeffRing:
    """Smallest standard ring holding the coefficients of a parsed expression"""
    fractional = any(not number.is_Integer for number in expr.atoms(Rational))
    base = 'QQ' if fractional else 'ZZ'
    if extra_symbols:
        return PolynomialRing(tuple(extra_symbols), base)
    return RATIONALS if fractional else INTEGERS

# =============================================
# OPERATIONS
# =============================================

def add(a: Series, b: Series) -> Series:
    return a.add(b)


def mul(a: Series, b: Series) -> Series:
    return a.mul(b)


def _powers_vanish(series: Series) -> bool:
    """Every monomial involves a capped variable, so high powers are zero"""
    caps = series.cap_tuple
    return all(
        any(e and cap is not None for e, cap in zip(exps, caps))
        for exps in series.terms
    )


def invert_unit(a: Series, precision: Optional[int] = None) -> Series:
    """
    Multiplicative inverse of a series with unit constant term

    Writes a = c(1 - n) with n of positive order and sums c^-1 * sum n^k.
    An exact input needs every monomial of n to be nilpotent, otherwise a
    precision must be given.
    """
    ring = a.ring
    constant = a.constant_term()
    if not ring.is_unit(constant):
        raise NotAUnit(f"constant term {ring.to_text(constant)} is not a unit in {ring.name}")
    c_inv = ring.invert(constant)
    target = min_precision(a.precision, precision)
    normalized = a.scale(c_inv)
    if target is not None:
        normalized = normalized.truncate(target)
    nilpotent = normalized.one_like().sub(normalized)
    if target is None and not nilpotent.is_zero() and not _powers_vanish(nilpotent):
        raise PrecisionTooLow("inverting an exact series in uncapped variables needs a precision")
    total = a.one_like(target)
    power = a.one_like()
    steps = 0
    while True:
        power = power.mul(nilpotent)
        if target is not None:
            power = power.truncate(target)
        if power.is_zero():
            break
        total = total.add(power)
        steps += 1
    logger.debug(f"invert_unit summed {steps} geometric terms at precision {target}")
    return total.scale(c_inv)


def _tail_bound(target: Series, images: Mapping[str, Series]) -> Optional[int]:
    """Precision of the image of the unknown tail of a truncated target"""
    if target.precision is None:
        return None
    lows = []
    for name, cap in zip(target.variables, target.cap_tuple):
        image = images[name]
        low = image.low_degree()
        if low is None:
            low = math.inf if image.precision is None else image.precision + 1
        if low == 0 and cap is None:
            raise DivergentSubstitution(
                f"{name} is replaced by a series with nonzero constant term "
                f"inside a series truncated at degree {target.precision}"
            )
        lows.append((low, cap))
    remaining = target.precision + 1
    total = 0
    for low, cap in sorted(lows, key=lambda pair: pair[0]):
        take = remaining if cap is None else min(cap, remaining)
        if take:
            total += take * low
        remaining -= take
        if not remaining:
            break
    if remaining or total == math.inf:
        return None
    return int(total) - 1


def substitute(target: Series, assignment: Mapping[str, Series],
               frame: Optional[Series] = None) -> Series:
    """
    Compose target with the given images

    The result lives in the frame of the images (or `frame`). Variables of
    target without an image must exist in that frame and map to themselves.
    """
    unknown = set(assignment) - set(target.variables)
    if unknown:
        raise VariableMismatch(f"Cannot substitute for {sorted(unknown)}: not variables of the target")
    images = list(assignment.values())
    reference = frame if frame is not None else (images[0] if images else None)
    if reference is None:
        return target
    for image in images:
        reference.check_compatible(image)
    if reference.ring != target.ring:
        raise RingMismatch(f"Rings differ: {target.ring.name} vs {reference.ring.name}")

    image_of: Dict[str, Series] = {}
    for name in target.variables:
        if name in assignment:
            image_of[name] = assignment[name]
        elif name in reference.variables:
            image_of[name] = reference.var(name)
        else:
            raise VariableMismatch(f"No image for variable {name}")

    bound = _tail_bound(target, image_of)
    if bound is not None:
        image_of = {name: image.truncate(bound) for name, image in image_of.items()}

    powers: Dict[str, List[Series]] = {name: [reference.one_like(), image]
                                       for name, image in image_of.items()}

    def power_of(name: str, e: int) -> Series:
        table = powers[name]
        while len(table) <= e:
            following = table[-1].mul(table[1])
            if bound is not None:
                following = following.truncate(bound)
            table.append(following)
        return table[e]

    result = reference.zero_like(bound)
    for exps, coeff in target.terms.items():
        product = None
        for name, e in zip(target.variables, exps):
            if not e:
                continue
            factor = power_of(name, e)
            product = factor if product is None else product.mul(factor)
            if bound is not None:
                product = product.truncate(bound)
        if product is None:
            product = reference.one_like()
        result = result.add(product.scale(coeff))
    return result


def compositional_inverse(a: Series, precision: Optional[int] = None) -> Series:
    """Series g with g(a(x)) = x = a(g(x)), solved one degree at a time"""
    if a.nvars != 1:
        raise VariableMismatch("compositional_inverse needs a series in one variable")
    ring = a.ring
    name = a.variables[0]
    target = min_precision(a.precision, precision)
    if target is not None and target < 1:
        raise PrecisionTooLow("compositional_inverse needs precision at least 1")
    if not ring.is_zero(a.coefficient((0,))) or not ring.equal(a.coefficient((1,)), ring.one):
        raise BadLowestTerm(f"{a.to_text()} does not start with {name}")
    x = a.var(name)
    if target is None:
        cap = a.cap_tuple[0]
        if cap is not None:
            target = cap
        elif a.terms == x.terms:
            return x
        else:
            raise PrecisionTooLow("inverting an exact non-linear series needs a precision")
    g = x.truncate(target)
    for degree in range(2, target + 1):
        composed = substitute(a.truncate(degree), {name: g.truncate(degree)})
        excess = composed.coefficient((degree,))
        if not ring.is_zero(excess):
            g = g.sub(a.monomial_like((degree,), excess))
    logger.debug(f"compositional_inverse solved {target} degrees")
    return g.truncate(target)


def graded_component(a: Series, degree: int) -> Series:
    """Part of total monomial degree `degree`, as an exact series"""
    if not a.ring.is_graded:
        raise UngradedRing(f"{a.ring.name} carries no grading")
    if a.precision is not None and degree > a.precision:
        raise PrecisionTooLow(f"degree {degree} lies beyond precision {a.precision}")
    terms = {exps: coeff for exps, coeff in a.terms.items() if sum(exps) == degree}
    return Series(a.ring, a.variables, terms, None, a.cap_tuple)

# =============================================
# COMPARISON
# =============================================

@dataclass(frozen=True)
class Witness:
    """First place where two sides of a check disagree"""

    label: str
    location: str
    degree: Optional[int]
    lhs: str
    rhs: str

    def describe(self) -> str:
        where = f"{self.location} (degree {self.degree})" if self.degree is not None else self.location
        return f"{self.label}: first difference at {where}: {self.lhs} != {self.rhs}"

    def to_dict(self) -> Dict[str, Any]:
        return {'label': self.label, 'location': self.location, 'degree': self.degree,
                'lhs': self.lhs, 'rhs': self.rhs}


@dataclass(frozen=True)
class CheckResult:
    """Outcome of an identity check, valid up to `precision` (None = exactly)"""

    passed: bool
    precision: Optional[int]
    label: str = ''
    witness: Optional[Witness] = None
    checks: int = 1

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> Dict[str, Any]:
        return {
            'label': self.label,
            'passed': self.passed,
            'precision': self.precision,
            'checks': self.checks,
            'witness': self.witness.to_dict() if self.witness else None,
        }

    def describe(self) -> str:
        if self.passed:
            scope = 'exactly' if self.precision is None else f"up to degree {self.precision}"
            return f"{self.label}: ok ({self.checks} checks, {scope})"
        return f"FAILED {self.witness.describe() if self.witness else self.label}"

    @classmethod
    def failure(cls, label: str, location: str, lhs: str, rhs: str,
                degree: Optional[int] = None, precision: Optional[int] = None) -> 'CheckResult':
        return cls(False, precision, label, Witness(label, location, degree, lhs, rhs))


def combine_checks(results: Iterable[CheckResult], label: str) -> CheckResult:
    """First failure wins; otherwise passed at the minimum precision"""
    results = list(results)
    total = sum(r.checks for r in results)
    for result in results:
        if not result.passed:
            return replace(result, checks=total)
    return CheckResult(True, min_precision(*(r.precision for r in results)), label, None, total)


def compare(lhs: Series, rhs: Series, label: str = 'compare') -> CheckResult:
    """Equality within the smaller precision, with the first differing monomial as witness"""
    lhs.check_compatible(rhs)
    difference = lhs.sub(rhs)
    precision = difference.precision
    items = difference.items()
    if not items:
        return CheckResult(True, precision, label)
    exps, _ = items[0]
    ring = lhs.ring
    lhs_coeff = lhs.terms.get(tuple(exps), ring.zero)
    rhs_coeff = rhs.terms.get(tuple(exps), ring.zero)
    return CheckResult.failure(
        label,
        monomial_text(lhs.variables, exps) or '1',
        ring.to_text(lhs_coeff),
        ring.to_text(rhs_coeff),
        degree=exps.degree,
        precision=precision,
    )
