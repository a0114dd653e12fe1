"""
Cobordism Calculator - Zeta Service
Subset decomposition of formal sums [n1]x1 +F ... +F [nr]xr into
sum over I of x^I * F_I, and the identities built on it.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from algebra.exceptions import NonPositiveMultiplicity, NotEnoughDivisors, TooManyDivisors
from algebra.series import (
    CheckResult, ExponentVector, Series, combine_checks, compare, substitute
)
from config import get_config, is_feature_enabled
from services.fgl_service import FormalGroupLaw, LazardModel, formal_sum, specialize_a
from utils.decorators import log_execution_time
from utils.helpers import format_subset, map_in_threads, subset_mask, subset_members

logger = logging.getLogger(__name__)

Subset = Union[int, Iterable[int]]

# =============================================
# DECOMPOSITION
# =============================================

@dataclass(frozen=True)
class SubsetDecomposition:
    """
    Components F_I of a formal sum, keyed by bitmask (bit 0 = divisor 1)

    Components live in the full variable frame but only use the variables
    of their subset; F_I is known to degree precision - |I|.
    """

    law: FormalGroupLaw
    multiplicities: Tuple[int, ...]
    variables: Tuple[str, ...]
    precision: Optional[int]
    total: Series
    components: Dict[int, Series] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.multiplicities)

    def masks(self) -> List[int]:
        return list(range(1, 1 << self.rank))

    def component(self, subset: Subset) -> Series:
        mask = subset if isinstance(subset, int) else subset_mask(subset)
        if mask == 0:
            return self.total.zero_like()
        return self.components[mask]

    def component_in_own_variables(self, subset: Subset) -> Series:
        mask = subset if isinstance(subset, int) else subset_mask(subset)
        own = tuple(self.variables[i - 1] for i in subset_members(mask))
        return self.component(mask).restrict(own)

    def reassemble(self) -> Series:
        """sum over I of x^I * F_I"""
        result = self.total.zero_like()
        for mask in self.masks():
            indicator = ExponentVector.indicator(mask, self.rank)
            result = result.add(self.components[mask].mul_monomial(indicator))
        return result

    def check_reassembly(self) -> CheckResult:
        return compare(self.reassemble(), self.total, 'reassembly')

    def to_payload(self) -> Dict[str, Any]:
        return {
            'law': self.law.name,
            'multiplicities': list(self.multiplicities),
            'variables': list(self.variables),
            'precision': self.precision,
            'components': {
                format_subset(mask): self.component_in_own_variables(mask).to_json()
                for mask in self.masks()
            },
        }

    def to_lines(self) -> List[str]:
        lines = [f"multiplicities: {', '.join(str(n) for n in self.multiplicities)}"]
        for mask in self.masks():
            lines.append(f"F{format_subset(mask)} = {self.component_in_own_variables(mask).to_text()}")
        return lines


def _validate_multiplicities(multiplicities: Sequence[int], allow_negative: bool):
    if not multiplicities:
        raise NotEnoughDivisors("A decomposition needs at least one divisor")
    max_divisors = get_config().MAX_DIVISORS
    if len(multiplicities) > max_divisors:
        raise TooManyDivisors(f"{len(multiplicities)} divisors given, at most {max_divisors} supported")
    for n in multiplicities:
        if n == 0 or (n < 0 and not allow_negative):
            raise NonPositiveMultiplicity(f"Multiplicity {n} is not positive")


def _extract(total: Series, mask: int, rank: int) -> Series:
    """Monomials of total whose support is exactly mask, divided by x^I"""
    indicator = ExponentVector.indicator(mask, rank)
    picked = {
        exps: coeff for exps, coeff in total.terms.items()
        if ExponentVector(exps).mask == mask
    }
    return Series(total.ring, total.variables, picked, total.precision).divide_monomial(indicator)


@log_execution_time
def decompose(law: FormalGroupLaw, multiplicities: Sequence[int], precision: Optional[int] = None,
              variables: Optional[Sequence[str]] = None, allow_negative: bool = False,
              threads: int = 1) -> SubsetDecomposition:
    """Unique decomposition of [n1]x1 +F ... +F [nr]xr by variable support"""
    multiplicities = tuple(int(n) for n in multiplicities)
    _validate_multiplicities(multiplicities, allow_negative)
    rank = len(multiplicities)
    precision = law.precision if precision is None else precision
    if precision != law.precision:
        law = law.at_precision(precision)
    variables = tuple(variables) if variables else tuple(f"x{i}" for i in range(1, rank + 1))
    if len(variables) != rank:
        raise ValueError(f"{rank} divisors need {rank} variable names, got {len(variables)}")

    frame = Series.zero(law.ring, variables)
    parts = [
        substitute(law.n_series(n), {'x': frame.var(name)}).truncate(precision)
        for n, name in zip(multiplicities, variables)
    ]
    total = formal_sum(law, parts, frame).truncate(precision)

    masks = list(range(1, 1 << rank))
    workers = threads if is_feature_enabled('parallel_subsets') else 1
    extracted = map_in_threads(lambda mask: _extract(total, mask, rank), masks, workers)
    components = dict(zip(masks, extracted))
    logger.debug(f"Decomposed {law.name} sum with multiplicities {multiplicities} into {len(masks)} components")
    return SubsetDecomposition(law, multiplicities, variables, precision, total, components)

# =============================================
# IDENTITIES
# =============================================

def verify_single_divisor_identity(law: FormalGroupLaw, m: int,
                                   precision: Optional[int] = None) -> CheckResult:
    """x * F_{1}(x) = [m]x"""
    decomposition = decompose(law, [m], precision, variables=('x',))
    lhs = decomposition.component(1).mul_monomial((1,))
    rhs = substitute(decomposition.law.n_series(m), {'x': lhs.var('x')}).truncate(decomposition.precision)
    return compare(lhs, rhs, 'single_divisor')


def verify_inductive_splitting(law: FormalGroupLaw, multiplicities: Sequence[int],
                               precision: Optional[int] = None) -> CheckResult:
    """
    Components avoiding divisor 1 match the decomposition of the remaining
    divisors, and F([n1]x1, S') is rebuilt from all components.
    """
    if len(multiplicities) < 2:
        raise NotEnoughDivisors("The splitting check needs at least two divisors")
    full = decompose(law, multiplicities, precision)
    rest_variables = full.variables[1:]
    rest = decompose(full.law, multiplicities[1:], full.precision, variables=rest_variables)

    results = []
    for mask in rest.masks():
        shifted = mask << 1
        restricted = full.component(shifted).restrict(rest_variables)
        results.append(compare(restricted, rest.component(mask),
                               f"inductive_splitting{format_subset(shifted)}"))

    first = substitute(full.law.n_series(multiplicities[0]), {'x': full.total.var(full.variables[0])})
    tail = rest.total.embed(full.variables)
    recombined = full.law.apply(first, tail).truncate(full.precision)
    results.append(compare(full.reassemble(), recombined, 'inductive_splitting'))
    return combine_checks(results, 'inductive_splitting')


def specialization_commutes(model: LazardModel, target: FormalGroupLaw, multiplicities: Sequence[int],
                            precision: Optional[int] = None, homomorphism=None) -> CheckResult:
    """Decompose-then-specialize equals specialize-then-decompose, subset by subset"""
    precision = model.degree if precision is None else min(precision, model.degree)
    hom = homomorphism or specialize_a(model, target)
    universal = decompose(model.law, multiplicities, precision)
    direct = decompose(target, multiplicities, precision)
    results = []
    for mask in universal.masks():
        specialized = hom.apply_series(universal.component(mask))
        results.append(compare(specialized, direct.component(mask),
                               f"specialization_commutes{format_subset(mask)}"))
    return combine_checks(results, 'specialization_commutes')
