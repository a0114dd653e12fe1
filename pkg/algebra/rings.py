"""
Cobordism Calculator - Coefficient Rings
Exact commutative coefficient rings for power series: the integers, the
rationals, graded polynomial rings over either, and quotients of those by
monomial nilpotency relations.
"""

import logging
import re
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Set, Tuple

from sympy import Basic
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.domains import QQ, ZZ
from sympy.polys.orderings import grlex
from sympy.polys.polyerrors import CoercionFailed
from sympy.polys.rings import PolyElement, PolyRing

from algebra.exceptions import IntegralityFailure, NotAUnit, SeriesParseError, UngradedRing

logger = logging.getLogger(__name__)

_RING_PATTERN = re.compile(r'^(ZZ|QQ)(?:\[([^\]]+)\])?(?:/\(([^)]+)\))?$')
_RELATION_PATTERN = re.compile(r'^([A-Za-z_]\w*)(?:\^(\d+))?$')
_GRADED_GENERATOR = re.compile(r'^b(\d+)$')

PARSE_TRANSFORMATIONS = standard_transformations + (convert_xor,)

# =============================================
# TEXT HELPERS
# =============================================

def ground_text(value) -> str:
    """Decimal or fraction string of an integer or rational"""
    q = QQ.convert(value)
    numerator, denominator = int(QQ.numer(q)), int(QQ.denom(q))
    if denominator == 1:
        return str(numerator)
    return f"{numerator}/{denominator}"


def monomial_text(names: Sequence[str], exps: Sequence[int]) -> str:
    """Render x^2*y style monomials; the empty monomial renders as ''"""
    return '*'.join(name if e == 1 else f"{name}^{e}" for name, e in zip(names, exps) if e)


def term_body(magnitude: str, monomial: str) -> str:
    if not monomial:
        return magnitude
    if magnitude == '1':
        return monomial
    return f"{magnitude}*{monomial}"


def join_terms(parts: List[Tuple[bool, str]]) -> str:
    """Join (negative, body) pairs into '1 - 2*x + y' form"""
    if not parts:
        return '0'
    chunks = []
    for index, (negative, body) in enumerate(parts):
        if index == 0:
            chunks.append(f"-{body}" if negative else body)
        else:
            chunks.append(f" - {body}" if negative else f" + {body}")
    return ''.join(chunks)


def natural_key(name: str):
    """Sort b2 before b10"""
    return [int(chunk) if chunk.isdigit() else chunk for chunk in re.split(r'(\d+)', name)]


def generator_degree(name: str) -> int:
    """b_i sits in degree i; every other generator in degree 1"""
    match = _GRADED_GENERATOR.match(name)
    return int(match.group(1)) if match else 1


def _to_ground(domain, value):
    """Convert ints, Fractions, sympy numbers and domain elements into domain"""
    if isinstance(value, Fraction):
        value = QQ(value.numerator, value.denominator)
    elif isinstance(value, Basic):
        if not value.is_Rational:
            raise SeriesParseError(f"{value} is not an exact rational number")
        value = QQ.from_sympy(value)
    try:
        q = QQ.convert(value)
    except CoercionFailed as e:
        raise SeriesParseError(f"Cannot read {value!r} as a number: {e}")
    if domain == ZZ:
        if QQ.denom(q) != 1:
            raise IntegralityFailure(f"{ground_text(q)} is not an integer")
        return ZZ(int(QQ.numer(q)))
    return q

# =============================================
# BASE CLASS
# =============================================

class CoeffRing:
    """
    Exact commutative coefficient ring

    Elements are plain sympy objects (domain elements or PolyElements);
    all arithmetic goes through the ring so quotient relations are applied.
    """

    kind = 'abstract'
    is_graded = True

    @property
    def name(self) -> str:
        raise NotImplementedError

    def key(self):
        return self.name

    def __eq__(self, other) -> bool:
        return isinstance(other, CoeffRing) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"

    # Construction ---------------------------------------------------------

    @property
    def zero(self):
        return self.convert(0)

    @property
    def one(self):
        return self.convert(1)

    def convert(self, value):
        raise NotImplementedError

    def generators(self) -> Tuple[str, ...]:
        return ()

    # Arithmetic -----------------------------------------------------------

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def power(self, a, k: int):
        if k < 0:
            return self.power(self.invert(a), -k)
        result = self.one
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result

    def is_zero(self, a) -> bool:
        return not a

    def equal(self, a, b) -> bool:
        return self.is_zero(self.sub(a, b))

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def invert(self, a):
        raise NotImplementedError

    def constant_part(self, a):
        """Image of a after killing every positive-degree or nilpotent generator"""
        return a

    def degree(self, a) -> Optional[int]:
        return None if self.is_zero(a) else 0

    def weighted_degrees(self, a) -> Set[int]:
        return set() if self.is_zero(a) else {0}

    # Rational structure ---------------------------------------------------

    def rationalize(self) -> 'CoeffRing':
        raise NotImplementedError

    def to_rational(self, a):
        raise NotImplementedError

    def from_rational(self, a):
        raise NotImplementedError

    def exact_quotient(self, a, k: int):
        raise NotImplementedError

    # Text -----------------------------------------------------------------

    def to_text(self, a) -> str:
        negative, body, _ = self.split_sign(a)
        return join_terms([(negative, body)]) if not self.is_zero(a) else '0'

    def split_sign(self, a) -> Tuple[bool, str, bool]:
        """Return (negative, magnitude text, compound) for use inside a series term"""
        raise NotImplementedError

    def from_sympy(self, expr):
        raise NotImplementedError

    def parse(self, text: str):
        try:
            expr = parse_expr(text, transformations=PARSE_TRANSFORMATIONS)
        except Exception as e:
            raise SeriesParseError(f"Cannot parse ring element '{text}': {e}")
        return self.from_sympy(expr)

    def evaluate(self, a, images: Mapping[str, Any], target: 'CoeffRing'):
        """Apply the ring map fixing the ground ring and sending generators to images"""
        return target.convert(a)


class _GroundRing(CoeffRing):
    """Shared behaviour of ZZ and QQ"""

    domain = ZZ

    def convert(self, value):
        if isinstance(value, PolyElement):
            if not value.is_ground:
                raise SeriesParseError(f"{value} is not a constant")
            value = value.LC if value else 0
        return _to_ground(self.domain, value)

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def split_sign(self, a) -> Tuple[bool, str, bool]:
        return a < 0, ground_text(-a if a < 0 else a), False

    def to_text(self, a) -> str:
        return ground_text(a)

    def from_sympy(self, expr):
        if not expr.is_Rational:
            raise SeriesParseError(f"'{expr}' is not a constant of {self.name}")
        return self.convert(expr)


class IntegerRing(_GroundRing):
    """The integers"""

    kind = 'integers'
    domain = ZZ

    @property
    def name(self) -> str:
        return 'ZZ'

    def is_unit(self, a) -> bool:
        return a == 1 or a == -1

    def invert(self, a):
        if not self.is_unit(a):
            raise NotAUnit(f"{ground_text(a)} is not a unit in ZZ")
        return a

    def rationalize(self) -> CoeffRing:
        return RATIONALS

    def to_rational(self, a):
        return QQ.convert(a)

    def from_rational(self, a):
        return _to_ground(ZZ, a)

    def exact_quotient(self, a, k: int):
        if a % k:
            raise IntegralityFailure(f"{ground_text(a)} is not divisible by {k}")
        return a // k


class RationalField(_GroundRing):
    """The rationals"""

    kind = 'rationals'
    domain = QQ

    @property
    def name(self) -> str:
        return 'QQ'

    def is_unit(self, a) -> bool:
        return a != 0

    def invert(self, a):
        if a == 0:
            raise NotAUnit("0 is not a unit in QQ")
        return QQ.one / a

    def rationalize(self) -> CoeffRing:
        return self

    def to_rational(self, a):
        return a

    def from_rational(self, a):
        return QQ.convert(a)

    def exact_quotient(self, a, k: int):
        return a / QQ(k)


INTEGERS = IntegerRing()
RATIONALS = RationalField()

# =============================================
# POLYNOMIAL RINGS
# =============================================

class PolynomialRing(CoeffRing):
    """
    Graded polynomial ring over ZZ or QQ

    Generators named b<i> have degree i, anything else degree 1. The
    Lazard model ZZ[b1, ..., bM] is the main instance.
    """

    kind = 'polynomial'

    def __init__(self, generators: Sequence[str], base: str = 'ZZ',
                 degrees: Optional[Sequence[int]] = None):
        if not generators:
            raise ValueError("A polynomial ring needs at least one generator")
        if base not in ('ZZ', 'QQ'):
            raise ValueError(f"Unknown base ring: {base}")
        self._generators = tuple(generators)
        self.base = base
        self.domain = ZZ if base == 'ZZ' else QQ
        self.degrees = tuple(degrees) if degrees else tuple(generator_degree(g) for g in generators)
        self._ring = PolyRing(list(self._generators), self.domain, grlex)

    @property
    def name(self) -> str:
        return f"{self.base}[{','.join(self._generators)}]"

    def key(self):
        return (self.name, self.degrees)

    def generators(self) -> Tuple[str, ...]:
        return self._generators

    @property
    def poly_ring(self) -> PolyRing:
        return self._ring

    def gen(self, name: str):
        return self._ring.gens[self._generators.index(name)]

    def convert(self, value):
        if isinstance(value, PolyElement):
            if value.ring == self._ring:
                return value
            if value.ring.symbols == self._ring.symbols and self.domain == QQ:
                return value.set_ring(self._ring)
            if value.ring.symbols == self._ring.symbols:
                return self.from_rational(value)
            raise SeriesParseError(f"{value} does not belong to {self.name}")
        return self._ring.ground_new(_to_ground(self.domain, value))

    @property
    def zero(self):
        return self._ring.zero

    @property
    def one(self):
        return self._ring.one

    def power(self, a, k: int):
        if k < 0:
            return super().power(a, k)
        return a ** k

    def _constant(self, a):
        return a.get(self._ring.zero_monom, self.domain.zero)

    def is_unit(self, a) -> bool:
        if not a.is_ground:
            return False
        c = self._constant(a)
        return c != 0 if self.domain == QQ else c in (1, -1)

    def invert(self, a):
        if not self.is_unit(a):
            raise NotAUnit(f"{self.to_text(a)} is not a unit in {self.name}")
        c = self._constant(a)
        return self._ring.ground_new(QQ.one / c if self.domain == QQ else c)

    def constant_part(self, a):
        return self._ring.ground_new(self._constant(a))

    def _weight(self, monom) -> int:
        return sum(d * e for d, e in zip(self.degrees, monom))

    def degree(self, a) -> Optional[int]:
        if not a:
            return None
        return max(self._weight(monom) for monom in a.keys())

    def weighted_degrees(self, a) -> Set[int]:
        return {self._weight(monom) for monom in a.keys()}

    def rationalize(self) -> 'PolynomialRing':
        if self.base == 'QQ':
            return self
        return PolynomialRing(self._generators, 'QQ', self.degrees)

    def to_rational(self, a):
        if self.base == 'QQ':
            return a
        return a.set_ring(self.rationalize().poly_ring)

    def from_rational(self, a):
        if self.base == 'QQ':
            return a.set_ring(self._ring) if isinstance(a, PolyElement) else self.convert(a)
        if not isinstance(a, PolyElement):
            return self.convert(a)
        integral = {}
        for monom, coeff in a.items():
            q = QQ.convert(coeff)
            if QQ.denom(q) != 1:
                raise IntegralityFailure(
                    f"coefficient {ground_text(q)} of {monomial_text(self._generators, monom) or '1'} "
                    f"is not an integer"
                )
            integral[monom] = int(QQ.numer(q))
        return self._ring.from_dict(integral)

    def exact_quotient(self, a, k: int):
        if self.base == 'QQ':
            return a.quo_ground(QQ(k))
        quotient = {}
        for monom, coeff in a.items():
            if coeff % k:
                raise IntegralityFailure(f"{self.to_text(a)} is not divisible by {k}")
            quotient[monom] = int(coeff // k)
        return self._ring.from_dict(quotient)

    def sorted_terms(self, a) -> List[Tuple[Tuple[int, ...], Any]]:
        return sorted(a.items(), key=lambda item: grlex(item[0]))

    def _term_parts(self, a) -> List[Tuple[bool, str]]:
        parts = []
        for monom, coeff in self.sorted_terms(a):
            negative = coeff < 0
            magnitude = ground_text(-coeff if negative else coeff)
            parts.append((negative, term_body(magnitude, monomial_text(self._generators, monom))))
        return parts

    def to_text(self, a) -> str:
        return join_terms(self._term_parts(a))

    def split_sign(self, a) -> Tuple[bool, str, bool]:
        parts = self._term_parts(a)
        if len(parts) == 1:
            negative, body = parts[0]
            return negative, body, False
        return False, f"({join_terms(parts)})", True

    def from_sympy(self, expr):
        unknown = {str(s) for s in expr.free_symbols} - set(self._generators)
        if unknown:
            raise SeriesParseError(f"Unknown symbols {sorted(unknown)} for {self.name}")
        try:
            return self._ring.from_expr(expr)
        except (ValueError, CoercionFailed, TypeError) as e:
            raise SeriesParseError(f"'{expr}' is not an element of {self.name}: {e}")

    def evaluate(self, a, images: Mapping[str, Any], target: CoeffRing):
        result = target.zero
        powers: Dict[Tuple[str, int], Any] = {}
        for monom, coeff in a.items():
            term = target.convert(coeff)
            for generator, e in zip(self._generators, monom):
                if not e:
                    continue
                cached = powers.get((generator, e))
                if cached is None:
                    cached = powers[(generator, e)] = target.power(images[generator], e)
                term = target.mul(term, cached)
            result = target.add(result, term)
        return result

# =============================================
# QUOTIENT RINGS
# =============================================

class QuotientRing(CoeffRing):
    """
    Polynomial ring modulo monomial relations g^(cap+1) = 0

    Capped generators are nilpotent, so units are exactly the elements
    whose constant part is a unit of the polynomial ring.
    """

    kind = 'quotient'
    is_graded = False

    def __init__(self, base: PolynomialRing, caps: Mapping[str, int]):
        unknown = set(caps) - set(base.generators())
        if unknown:
            raise ValueError(f"Relations mention unknown generators: {sorted(unknown)}")
        for generator, cap in caps.items():
            if cap < 0:
                raise ValueError(f"Negative cap for {generator}")
        self.base_ring = base
        self.caps = tuple(caps.get(g) for g in base.generators())

    @property
    def name(self) -> str:
        relations = [
            f"{g}^{cap + 1}" if cap + 1 != 1 else g
            for g, cap in zip(self.base_ring.generators(), self.caps) if cap is not None
        ]
        return f"{self.base_ring.name}/({','.join(relations)})"

    def key(self):
        return (self.name, self.base_ring.key())

    def generators(self) -> Tuple[str, ...]:
        return self.base_ring.generators()

    def gen(self, name: str):
        return self.reduce(self.base_ring.gen(name))

    def _allowed(self, monom) -> bool:
        return all(cap is None or e <= cap for e, cap in zip(monom, self.caps))

    def reduce(self, a):
        if all(self._allowed(monom) for monom in a.keys()):
            return a
        return self.base_ring.poly_ring.from_dict(
            {monom: coeff for monom, coeff in a.items() if self._allowed(monom)}
        )

    def convert(self, value):
        return self.reduce(self.base_ring.convert(value))

    @property
    def zero(self):
        return self.base_ring.zero

    @property
    def one(self):
        return self.base_ring.one

    def mul(self, a, b):
        return self.reduce(a * b)

    def constant_part(self, a):
        ring = self.base_ring.poly_ring
        return ring.from_dict({
            monom: coeff for monom, coeff in a.items()
            if all(cap is None or e == 0 for e, cap in zip(monom, self.caps))
        })

    def is_unit(self, a) -> bool:
        return self.base_ring.is_unit(self.constant_part(a))

    def invert(self, a):
        c = self.constant_part(a)
        if not self.base_ring.is_unit(c):
            raise NotAUnit(f"{self.to_text(a)} is not a unit in {self.name}")
        c_inv = self.base_ring.invert(c)
        nilpotent = self.sub(self.one, self.mul(c_inv, a))
        total, power = self.one, self.one
        while True:
            power = self.mul(power, nilpotent)
            if self.is_zero(power):
                break
            total = self.add(total, power)
        return self.mul(c_inv, total)

    def degree(self, a) -> Optional[int]:
        raise UngradedRing(f"{self.name} carries no grading")

    def weighted_degrees(self, a) -> Set[int]:
        raise UngradedRing(f"{self.name} carries no grading")

    def rationalize(self) -> 'QuotientRing':
        caps = {g: cap for g, cap in zip(self.generators(), self.caps) if cap is not None}
        return QuotientRing(self.base_ring.rationalize(), caps)

    def to_rational(self, a):
        return self.base_ring.to_rational(a)

    def from_rational(self, a):
        return self.reduce(self.base_ring.from_rational(a))

    def exact_quotient(self, a, k: int):
        return self.base_ring.exact_quotient(a, k)

    def to_text(self, a) -> str:
        return self.base_ring.to_text(a)

    def split_sign(self, a) -> Tuple[bool, str, bool]:
        return self.base_ring.split_sign(a)

    def from_sympy(self, expr):
        return self.reduce(self.base_ring.from_sympy(expr))

    def evaluate(self, a, images: Mapping[str, Any], target: CoeffRing):
        return self.base_ring.evaluate(a, images, target)

# =============================================
# RING CONSTRUCTION
# =============================================

def polynomial_ring(generators: Sequence[str], base: str = 'ZZ') -> PolynomialRing:
    return PolynomialRing(tuple(generators), base)


def lazard_ring(count: int, base: str = 'ZZ') -> PolynomialRing:
    """ZZ[b1, ..., b_count] with deg b_i = i"""
    if count < 1:
        raise ValueError("The Lazard model needs at least one generator")
    return PolynomialRing([f"b{i}" for i in range(1, count + 1)], base)


def parse_ring(text: str) -> CoeffRing:
    """
    Read a ring name

    Accepted forms: ZZ, QQ, ZZ[b1,b2], QQ[b1], ZZ[e]/(e^2), ZZ[e,f]/(e^2,f^3)
    """
    match = _RING_PATTERN.match(text.replace(' ', ''))
    if not match:
        raise SeriesParseError(f"Unknown ring: {text}")
    base, generators, relations = match.groups()
    if not generators:
        if relations:
            raise SeriesParseError(f"Relations need generators: {text}")
        return INTEGERS if base == 'ZZ' else RATIONALS
    ring = polynomial_ring([g for g in generators.split(',') if g], base)
    if not relations:
        return ring
    caps = {}
    for relation in relations.split(','):
        rel_match = _RELATION_PATTERN.match(relation)
        if not rel_match:
            raise SeriesParseError(f"Only monomial relations g^k are supported, got '{relation}'")
        generator, exponent = rel_match.group(1), int(rel_match.group(2) or 1)
        if exponent < 1:
            raise SeriesParseError(f"Relation exponent must be positive in '{relation}'")
        caps[generator] = exponent - 1
    return QuotientRing(ring, caps)
