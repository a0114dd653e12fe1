"""
Cobordism Calculator - Helper Functions
Formatting, subset bookkeeping and small utilities shared by the services.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TypeVar
import json
import logging

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

# =============================================
# FORMATTING HELPERS
# =============================================

def format_subset(mask: int) -> str:
    """Bitmask to '{1,3}' (bit 0 is divisor 1)"""
    return '{' + ','.join(str(i) for i in subset_members(mask)) + '}'

def format_seconds(seconds: float) -> str:
    return f"{seconds:.3f}s"

# =============================================
# SUBSET HELPERS
# =============================================

def subset_members(mask: int) -> List[int]:
    """1-based members of the subset encoded by mask"""
    members = []
    index = 1
    while mask:
        if mask & 1:
            members.append(index)
        mask >>= 1
        index += 1
    return members

def subset_mask(members: Iterable[int]) -> int:
    mask = 0
    for member in members:
        if member < 1:
            raise ValueError(f"Subset members are 1-based, got {member}")
        mask |= 1 << (member - 1)
    return mask

# =============================================
# PARSING HELPERS
# =============================================

def parse_int_list(text: str) -> List[int]:
    """Parse '2,3' into [2, 3]"""
    if text is None or not text.strip():
        return []
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise ValueError(f"Expected comma-separated integers, got '{text}'")

def parse_json_safe(json_str: str) -> Optional[Dict]:
    """Safely parse JSON string"""
    try:
        return json.loads(json_str) if json_str else None
    except (json.JSONDecodeError, TypeError):
        return None

def canonical_json(payload: Any) -> str:
    """Deterministic JSON: sorted keys, fixed indentation"""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)

# =============================================
# CONCURRENCY HELPERS
# =============================================

def map_in_threads(function: Callable[[T], R], items: Sequence[T], threads: int = 1) -> List[R]:
    """
    Map in input order, optionally on a thread pool

    Results are returned in the order of items whatever the pool does.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [function(item) for item in items]
    logger.debug(f"Mapping {len(items)} items over {threads} threads")
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(function, items))
