"""
Cobordism Calculator - Chern Service
Chern-root calculus: Euler classes under tensor and dual, Chern classes,
projective bundles with their hyperplane relation, the coefficients u_i
of the fundamental class and the coefficient matrix A(E).
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from algebra.exceptions import NonNilpotent, NotInvertible, PrecisionTooLow, StructureViolation, VariableMismatch
from algebra.series import (
    CheckResult, Series, combine_checks, compare, invert_unit, substitute
)
from config import get_setting
from services.fgl_service import X, Y, FormalGroupLaw
from utils.decorators import log_execution_time
from utils.helpers import map_in_threads

logger = logging.getLogger(__name__)

HYPERPLANE = 't'

# =============================================
# CONTEXTS
# =============================================

class ChernContext:
    """
    Chern roots x1..xr with caps x_k^(m_k + 1) = 0 over a law's ring

    Elements are exact series in the root frame whenever the law is known
    to a high enough degree; the law is upgraded on construction when it
    can be rebuilt.
    """

    def __init__(self, law: FormalGroupLaw, roots: Union[int, Sequence[str]] = 1,
                 caps: Union[None, int, Sequence[int]] = None):
        names = tuple(f"x{i}" for i in range(1, roots + 1)) if isinstance(roots, int) else tuple(roots)
        if HYPERPLANE in names:
            raise VariableMismatch(f"'{HYPERPLANE}' is reserved for the hyperplane class")
        if caps is None:
            caps = get_setting('DEFAULT_CAPS')
        caps = (caps,) * len(names) if isinstance(caps, int) else tuple(caps)
        if len(caps) != len(names):
            raise VariableMismatch(f"{len(names)} roots need {len(names)} caps, got {len(caps)}")
        self.names = names
        self.caps = caps
        self.law = self._upgrade(law, sum(caps) + max(len(names), 1))
        self.ring = self.law.ring
        self._frame = Series.zero(self.ring, names, caps=caps)

    def _upgrade(self, law: FormalGroupLaw, needed: int) -> FormalGroupLaw:
        if law.precision >= needed:
            return law
        try:
            return law.at_precision(needed)
        except PrecisionTooLow:
            logger.warning(f"Law {law.name} stops at degree {law.precision}; "
                           f"context results are truncated (degree {needed} wanted)")
            return law

    def law_for_rank(self, rank: int) -> FormalGroupLaw:
        """Law precise enough for the coefficients of a rank-`rank` projective bundle"""
        return self._upgrade(self.law, sum(self.caps) + rank)

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def total_cap(self) -> int:
        return sum(self.caps)

    def __repr__(self) -> str:
        caps = ', '.join(f"{n}^{c + 1}=0" for n, c in zip(self.names, self.caps))
        return f"<ChernContext {self.law.name} [{caps}]>"

    # Elements -------------------------------------------------------------

    def zero(self) -> Series:
        return self._frame

    def one(self) -> Series:
        return self._frame.one_like()

    def constant(self, value) -> Series:
        return self._frame.constant_like(value)

    def root(self, k: int) -> Series:
        """k-th root, 1-based"""
        return self._frame.var(self.names[k - 1])

    def roots(self) -> List[Series]:
        return [self._frame.var(name) for name in self.names]

    def element(self, text: str) -> Series:
        return Series.parse(text, self.names, self.ring, caps=self.caps)

    def check(self, a: Series) -> Series:
        self._frame.check_compatible(a)
        return a

    def is_nilpotent(self, a: Series) -> bool:
        constant = a.constant_term()
        return self.ring.is_zero(self.ring.constant_part(constant))

    def is_unit(self, a: Series) -> bool:
        return self.ring.is_unit(a.constant_term())

    def require_nilpotent(self, a: Series, what: str = 'element'):
        self.check(a)
        if not self.is_nilpotent(a):
            raise NonNilpotent(f"{what} {a.to_text()} has a nonzero constant part")

# =============================================
# EULER CLASSES
# =============================================

def euler_tensor(ctx: ChernContext, a: Series, b: Series) -> Series:
    """e(L1 (x) L2) = F(e(L1), e(L2))"""
    ctx.require_nilpotent(a)
    ctx.require_nilpotent(b)
    return ctx.law.apply(a, b)


def euler_dual(ctx: ChernContext, a: Series) -> Series:
    """e(L^dual) = inv_F(e(L))"""
    ctx.require_nilpotent(a)
    return ctx.law.invert(a)

# =============================================
# SPLIT BUNDLES
# =============================================

@dataclass(frozen=True)
class SplitBundle:
    """Direct sum of line bundles, given by their Euler classes"""

    roots: Tuple[Series, ...]

    @property
    def rank(self) -> int:
        return len(self.roots)

    @classmethod
    def of_roots(cls, ctx: ChernContext, indices: Optional[Iterable[int]] = None) -> 'SplitBundle':
        indices = range(1, ctx.rank + 1) if indices is None else indices
        return cls(tuple(ctx.root(k) for k in indices))

    @classmethod
    def trivial(cls, ctx: ChernContext, rank: int) -> 'SplitBundle':
        return cls(tuple(ctx.zero() for _ in range(rank)))

    @classmethod
    def from_elements(cls, ctx: ChernContext, elements: Iterable[Series]) -> 'SplitBundle':
        elements = tuple(elements)
        for element in elements:
            ctx.require_nilpotent(element, 'Euler class')
        return cls(elements)

    def dual(self, ctx: ChernContext) -> 'SplitBundle':
        return SplitBundle(tuple(euler_dual(ctx, root) for root in self.roots))

    def direct_sum(self, other: 'SplitBundle') -> 'SplitBundle':
        return SplitBundle(self.roots + other.roots)

    def permuted(self, order: Sequence[int]) -> 'SplitBundle':
        return SplitBundle(tuple(self.roots[i] for i in order))

# =============================================
# CHERN CLASSES
# =============================================

RootSpec = Union[None, SplitBundle, Sequence[Union[int, Series]]]


def _root_elements(ctx: ChernContext, roots: RootSpec) -> List[Series]:
    if roots is None:
        return ctx.roots()
    if isinstance(roots, SplitBundle):
        return list(roots.roots)
    return [ctx.root(r) if isinstance(r, int) else ctx.check(r) for r in roots]


def elementary_symmetric(ctx: ChernContext, elements: Sequence[Series]) -> List[Series]:
    """[s_0, ..., s_n] of the given elements"""
    values = [ctx.one()]
    for element in elements:
        values.append(ctx.zero())
        for k in range(len(values) - 1, 0, -1):
            values[k] = values[k].add(values[k - 1].mul(element))
    return values


def chern_classes(ctx: ChernContext, roots: RootSpec = None) -> List[Series]:
    """c_0 = 1, c_i = s_i(roots)"""
    return elementary_symmetric(ctx, _root_elements(ctx, roots))


def total_chern_class(ctx: ChernContext, roots: RootSpec = None) -> Series:
    total = ctx.zero()
    for c in chern_classes(ctx, roots):
        total = total.add(c)
    return total


def euler_class(ctx: ChernContext, roots: RootSpec = None) -> Series:
    """Top Chern class"""
    return chern_classes(ctx, roots)[-1]


def whitney_check(ctx: ChernContext, r1: int) -> CheckResult:
    """c(E' + E'') = c(E') c(E'') and c_top(E) = product of the roots"""
    roots = ctx.roots()
    if not 0 <= r1 <= len(roots):
        raise ValueError(f"Split point {r1} outside 0..{len(roots)}")
    first, second = roots[:r1], roots[r1:]
    whitney = compare(total_chern_class(ctx, roots),
                      total_chern_class(ctx, first).mul(total_chern_class(ctx, second)), 'whitney')
    product = ctx.one()
    for root in roots:
        product = product.mul(root)
    top = compare(euler_class(ctx, roots), product, 'euler_class')
    return combine_checks([whitney, top], 'whitney')

# =============================================
# PROJECTIVE BUNDLES
# =============================================

class ProjectiveBundleContext:
    """
    P(E) over a Chern context: base roots plus the hyperplane class t

    t satisfies t^r = sum d_i t^(r-i) with d_i = (-1)^(i+1) s_i(duals),
    i.e. the product of (e(L_k^dual) - t) vanishes.
    """

    def __init__(self, base: ChernContext, bundle: Optional[SplitBundle] = None,
                 relation: Optional[Sequence[Series]] = None, hyperplane: str = HYPERPLANE):
        bundle = bundle if bundle is not None else SplitBundle.of_roots(base)
        if bundle.rank < 1:
            raise ValueError("A projective bundle needs rank at least 1")
        if hyperplane in base.names:
            raise VariableMismatch(f"Hyperplane name {hyperplane} clashes with a root")
        self.base = base
        self.bundle = bundle
        self.hyperplane = hyperplane
        self.variables = base.names + (hyperplane,)
        self.dual_roots = bundle.dual(base).roots
        if relation is None:
            symmetric = elementary_symmetric(base, self.dual_roots)
            relation = [symmetric[i] if i % 2 else symmetric[i].neg() for i in range(1, bundle.rank + 1)]
        relation = tuple(base.check(d) for d in relation)
        if len(relation) != bundle.rank:
            raise ValueError(f"Rank {bundle.rank} needs {bundle.rank} relation coefficients, got {len(relation)}")
        self.relation = relation
        self._frame = Series.zero(base.ring, self.variables, caps=base.caps + (None,))

    @classmethod
    def for_bundle(cls, base: ChernContext, bundle: SplitBundle,
                   relation: Optional[Sequence[Series]] = None) -> 'ProjectiveBundleContext':
        return cls(base, bundle, relation)

    @property
    def rank(self) -> int:
        return self.bundle.rank

    @property
    def law(self) -> FormalGroupLaw:
        return self.base.law

    def __repr__(self) -> str:
        return f"<ProjectiveBundleContext rank {self.rank} over {self.base!r}>"

    # Elements -------------------------------------------------------------

    def zero(self) -> Series:
        return self._frame

    def one(self) -> Series:
        return self._frame.one_like()

    def t(self) -> Series:
        return self._frame.var(self.hyperplane)

    def lift(self, a: Series) -> Series:
        """Pullback of a base element"""
        self.base.check(a)
        return a.embed(self.variables)

    def element(self, text: str) -> Series:
        return self.reduce(Series.parse(text, self.variables, self.base.ring, caps=self._frame.cap_tuple))

    def t_power(self, i: int) -> Series:
        return self.reduce(self._frame.monomial_like(self._t_exps(i)))

    def _t_exps(self, e: int) -> Tuple[int, ...]:
        return (0,) * len(self.base.names) + (e,)

    def _top_t_degree(self, a: Series) -> int:
        return max((exps[-1] for exps in a.terms), default=0)

    def reduce(self, a: Series) -> Series:
        """Rewrite every t^e with e >= r through the relation"""
        self._frame.check_compatible(a)
        r = self.rank
        top = self._top_t_degree(a)
        while top >= r:
            coefficient = self.lift(a.coefficient_series(self.hyperplane, top))
            a = a.sub(coefficient.mul_monomial(self._t_exps(top)))
            for i, d in enumerate(self.relation, start=1):
                a = a.add(coefficient.mul(self.lift(d)).mul_monomial(self._t_exps(top - i)))
            top = self._top_t_degree(a)
        return a

    def mul(self, a: Series, b: Series) -> Series:
        return self.reduce(a.mul(b))

    def normal_form(self, a: Series) -> List[Series]:
        """[c_0, ..., c_(r-1)] with a = sum c_i t^i"""
        reduced = self.reduce(a)
        return [reduced.coefficient_series(self.hyperplane, i) for i in range(self.rank)]

    def from_normal_form(self, coefficients: Sequence[Series]) -> Series:
        if len(coefficients) > self.rank:
            raise ValueError(f"At most {self.rank} coefficients in normal form")
        result = self.zero()
        for i, c in enumerate(coefficients):
            result = result.add(self.lift(c).mul_monomial(self._t_exps(i)))
        return result

    def verify_relation(self) -> CheckResult:
        """Product of (e(L_k^dual) - t) reduces to zero"""
        product = self.one()
        for dual in self.dual_roots:
            product = product.mul(self.lift(dual).sub(self.t()))
        reduced = self.reduce(product)
        return compare(reduced, reduced.zero_like(), 'hyperplane_relation')


def hyperplane_relation(ctx: ChernContext) -> ProjectiveBundleContext:
    """P(E) for the bundle of all context roots"""
    if ctx.rank < 1:
        raise ValueError("The hyperplane relation needs at least one root")
    return ProjectiveBundleContext(ctx)

# =============================================
# COEFFICIENTS
# =============================================

@dataclass(frozen=True)
class CoefficientVector:
    """u_0, u_1, ... of the fundamental class of P(E); entries past the end are zero"""

    entries: Tuple[Series, ...]
    rank: int

    def __getitem__(self, i: int) -> Series:
        if i < 0:
            raise IndexError(i)
        if i < len(self.entries):
            return self.entries[i]
        return self.entries[0].zero_like()

    def __len__(self) -> int:
        return len(self.entries)

    def structure_check(self, ctx: ChernContext) -> CheckResult:
        """u_(r-1) is a unit and every other u_i is nilpotent"""
        ring = ctx.ring
        for i, u in enumerate(self.entries):
            constant = u.constant_term()
            if i == self.rank - 1:
                if not ctx.is_unit(u):
                    return CheckResult.failure('coefficient_structure', f"u{i}", ring.to_text(constant),
                                               'a unit', degree=0, precision=u.precision)
            elif not ctx.is_nilpotent(u):
                return CheckResult.failure('coefficient_structure', f"u{i}", ring.to_text(constant),
                                           '0', degree=0, precision=u.precision)
        precisions = [u.precision for u in self.entries]
        finite = [p for p in precisions if p is not None]
        return CheckResult(True, min(finite) if finite else None, 'coefficient_structure',
                           checks=len(self.entries))

    def to_payload(self) -> Dict[str, Any]:
        return {f"u{i}": u.to_json() for i, u in enumerate(self.entries)}

    def to_lines(self) -> List[str]:
        return [f"u{i} = {u.to_text()}" for i, u in enumerate(self.entries)]


def _nilpotency_length(ctx: ChernContext, root: Series) -> int:
    """Smallest L with root^L = 0, bounded by the total cap plus one"""
    ctx.require_nilpotent(root, 'Euler class')
    power = ctx.one()
    for length in range(1, ctx.total_cap + 2):
        power = power.mul(root)
        if power.is_zero() and power.is_exact:
            return length
    return ctx.total_cap + 1


def _hyperplane_series(law: FormalGroupLaw) -> Series:
    """G(t, x) = (F(t, x) - t - x) / t"""
    F = law.F.rename({X: HYPERPLANE, Y: 'x'})
    G = F.sub(F.var(HYPERPLANE)).sub(F.var('x'))
    return G.divide_monomial((1, 0))


@log_execution_time
def pb_fundamental_coefficients(ctx: ChernContext, count: Optional[int] = None,
                                bundle: Optional[SplitBundle] = None, threads: int = 1) -> CoefficientVector:
    """
    u_i of the fundamental class of P(E), i < count (all nonzero ones by default)

    Sums over multi-indices (i_1..i_r) the products of
    (-1)^(i_k - 1) H(t, x_k)^(i_k) x_k^(i_k - 1), H = 1/(1 + G); the t^m
    coefficient of a product with N = sum i_k - 1 contributes to u_(N - m).
    """
    bundle = bundle if bundle is not None else SplitBundle.of_roots(ctx)
    rank = bundle.rank
    if rank < 1:
        raise ValueError("pb_fundamental_coefficients needs a bundle of rank at least 1")
    law = ctx.law_for_rank(rank)
    lengths = [_nilpotency_length(ctx, root) for root in bundle.roots]
    top = sum(lengths) - 1
    if count is None:
        count = top + 1
    if count < rank:
        raise ValueError(f"count must be at least the rank {rank}, got {count}")

    variables = ctx.names + (HYPERPLANE,)
    aux = Series.zero(ctx.ring, variables, caps=ctx.caps + (top,))
    t = aux.var(HYPERPLANE)
    G = _hyperplane_series(law)

    factors: List[List[Series]] = []
    for root, length in zip(bundle.roots, lengths):
        lifted = root.embed(variables, caps=aux.cap_tuple)
        H = invert_unit(substitute(G, {HYPERPLANE: t, 'x': lifted}).add(aux.one_like()))
        entries = []
        H_power = H
        root_power = aux.one_like()
        for i in range(1, length + 1):
            term = H_power.mul(root_power)
            entries.append(term if i % 2 else term.neg())
            H_power = H_power.mul(H)
            root_power = root_power.mul(lifted)
        factors.append(entries)

    def contributions(first_index: int) -> List[Series]:
        partial = [ctx.zero() for _ in range(count)]
        stack = [(1, factors[0][first_index - 1], first_index)]
        while stack:
            k, product, index_sum = stack.pop()
            if k < rank:
                for i, factor in enumerate(factors[k], start=1):
                    stack.append((k + 1, product.mul(factor), index_sum + i))
                continue
            N = index_sum - 1
            for target in range(count):
                m = N - target
                if 0 <= m <= top:
                    partial[target] = partial[target].add(product.coefficient_series(HYPERPLANE, m))
        return partial

    firsts = list(range(1, lengths[0] + 1))
    pieces = map_in_threads(contributions, firsts, threads)
    entries = [ctx.zero() for _ in range(count)]
    for partial in pieces:
        entries = [u.add(p) for u, p in zip(entries, partial)]
    logger.debug(f"Coefficients of P(E), rank {rank}: {count} entries from {len(firsts)} branches")
    return CoefficientVector(tuple(entries), rank)


def coefficient_symmetry_check(ctx: ChernContext, count: Optional[int] = None) -> CheckResult:
    """u_i does not change when the roots are reversed"""
    forward = pb_fundamental_coefficients(ctx, count)
    backward = pb_fundamental_coefficients(ctx, len(forward),
                                           SplitBundle.of_roots(ctx).permuted(range(ctx.rank - 1, -1, -1)))
    return combine_checks(
        [compare(forward[i], backward[i], f"coefficient_symmetry[u{i}]") for i in range(len(forward))],
        'coefficient_symmetry'
    )

# =============================================
# COEFFICIENT MATRIX
# =============================================

@dataclass(frozen=True)
class CoefficientMatrix:
    """Square matrix over a Chern context; rows[j][i]"""

    rows: Tuple[Tuple[Series, ...], ...]

    @property
    def size(self) -> int:
        return len(self.rows)

    def entry(self, j: int, i: int) -> Series:
        return self.rows[j][i]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Series]]) -> 'CoefficientMatrix':
        return cls(tuple(tuple(row) for row in rows))

    @classmethod
    def identity(cls, ctx: ChernContext, size: int) -> 'CoefficientMatrix':
        return cls.from_rows([[ctx.one() if i == j else ctx.zero() for i in range(size)] for j in range(size)])

    @classmethod
    def anti_identity(cls, ctx: ChernContext, size: int) -> 'CoefficientMatrix':
        return cls.from_rows([[ctx.one() if i + j == size - 1 else ctx.zero() for i in range(size)]
                              for j in range(size)])

    def mul(self, other: 'CoefficientMatrix') -> 'CoefficientMatrix':
        n = self.size
        rows = []
        for j in range(n):
            row = []
            for i in range(n):
                total = self.rows[j][0].zero_like()
                for k in range(n):
                    total = total.add(self.rows[j][k].mul(other.rows[k][i]))
                row.append(total)
            rows.append(row)
        return CoefficientMatrix.from_rows(rows)

    def compare(self, other: 'CoefficientMatrix', label: str) -> CheckResult:
        results = []
        for j in range(self.size):
            for i in range(self.size):
                results.append(compare(self.rows[j][i], other.rows[j][i], f"{label}[{j},{i}]"))
        return combine_checks(results, label)

    def to_payload(self) -> List[List[Dict[str, Any]]]:
        return [[entry.to_json() for entry in row] for row in self.rows]

    def to_lines(self, name: str) -> List[str]:
        return [f"{name}[{j},{i}] = {self.rows[j][i].to_text()}"
                for j in range(self.size) for i in range(self.size)]


def coefficient_matrix(ctx: ChernContext, vector: Optional[CoefficientVector] = None,
                       bundle: Optional[SplitBundle] = None) -> CoefficientMatrix:
    """A_(j,i) = u_(i+j) for 0 <= i, j < r, with its anti-diagonal structure asserted"""
    bundle = bundle if bundle is not None else SplitBundle.of_roots(ctx)
    r = bundle.rank
    if vector is None:
        vector = pb_fundamental_coefficients(ctx, 2 * r - 1, bundle)
    rows = [[vector[i + j] for i in range(r)] for j in range(r)]
    for j in range(r):
        for i in range(r):
            entry = rows[j][i]
            if i + j == r - 1:
                if not ctx.is_unit(entry):
                    raise StructureViolation(f"A[{j},{i}] = {entry.to_text()} is not a unit")
            elif not ctx.is_nilpotent(entry):
                raise StructureViolation(f"A[{j},{i}] = {entry.to_text()} is not nilpotent")
    return CoefficientMatrix.from_rows(rows)


def invert_matrix(A: CoefficientMatrix, ctx: Optional[ChernContext] = None) -> CoefficientMatrix:
    """Gauss-Jordan elimination pivoting on entries with a unit constant term"""
    n = A.size
    ring = A.rows[0][0].ring
    one = A.rows[0][0].one_like()
    zero = one.zero_like()
    work = [list(row) + [one if i == j else zero for i in range(n)] for j, row in enumerate(A.rows)]

    def is_unit(entry: Series) -> bool:
        if ctx is not None:
            return ctx.is_unit(entry)
        return ring.is_unit(entry.constant_term())

    for column in range(n):
        pivot = next((row for row in range(column, n) if is_unit(work[row][column])), None)
        if pivot is None:
            raise NotInvertible(f"No unit pivot in column {column}")
        work[column], work[pivot] = work[pivot], work[column]
        scale = invert_unit(work[column][column])
        work[column] = [entry.mul(scale) for entry in work[column]]
        for row in range(n):
            if row == column:
                continue
            factor = work[row][column]
            if factor.is_zero():
                continue
            work[row] = [entry.sub(factor.mul(pivot_entry))
                         for entry, pivot_entry in zip(work[row], work[column])]
    return CoefficientMatrix.from_rows([row[n:] for row in work])


def coefficient_recursion_check(ctx: ChernContext, depth: int,
                                pb: Optional[ProjectiveBundleContext] = None) -> CheckResult:
    """u_(r+i) = sum_j d_(r-j) u_(j+i) for 0 <= i < depth"""
    pb = pb if pb is not None else hyperplane_relation(ctx)
    r = pb.rank
    u = pb_fundamental_coefficients(ctx, r + depth, pb.bundle)
    results = []
    for i in range(depth):
        rhs = ctx.zero()
        for j in range(r):
            rhs = rhs.add(pb.relation[r - j - 1].mul(u[j + i]))
        results.append(compare(u[r + i], rhs, f"coefficient_recursion[{i}]"))
    return combine_checks(results, 'coefficient_recursion')
