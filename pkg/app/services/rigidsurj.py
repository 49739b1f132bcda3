"""Rigid surjections: finite ones [n] -> [m] and eventually affine ones ω -> ω.

A surjection between initial segments of ω is rigid when the first
occurrences of 0, 1, 2, ... appear at increasing positions.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from app.exceptions import DomainError
from app.services.seqcore import EPSeq, entry

logger = logging.getLogger(__name__)


def is_rigid(values: Sequence[int]) -> bool:
    """True iff ``values`` is onto an initial segment of ω with first occurrences in order."""
    top = -1
    for v in values:
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            return False
        if v > top + 1:
            return False
        top = max(top, v)
    return True


@dataclass(frozen=True)
class FiniteRigidSurjection:
    values: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'values', tuple(self.values))
        if not self.values:
            raise DomainError("rigid surjection needs a nonempty domain")
        if not is_rigid(self.values):
            raise DomainError(f"values {list(self.values)} are not a rigid surjection")

    @property
    def domain(self) -> int:
        return len(self.values)

    @property
    def codomain(self) -> int:
        return max(self.values) + 1

    def __call__(self, i: int) -> int:
        return self.values[i]

    @classmethod
    def identity(cls, n: int) -> 'FiniteRigidSurjection':
        return cls(tuple(range(n)))


@dataclass(frozen=True)
class OrderedPartition:
    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        object.__setattr__(self, 'blocks', blocks)
        if any(not b for b in blocks):
            raise DomainError("partition blocks must be nonempty")
        minima = [b[0] for b in blocks]
        if any(a >= b for a, b in zip(minima, minima[1:])):
            raise DomainError("partition blocks must be ordered by strictly increasing minima")
        covered = sorted(i for b in blocks for i in b)
        if covered != list(range(len(covered))):
            raise DomainError("partition blocks must be disjoint and cover [n]")


@dataclass(frozen=True)
class EARigidSurjection:
    """p(n) = prefix[n] for n < len(prefix), p(n) = n - tail_offset beyond."""
    prefix: Tuple[int, ...]
    tail_offset: int

    def __post_init__(self):
        object.__setattr__(self, 'prefix', tuple(self.prefix))
        size, c = len(self.prefix), self.tail_offset
        if size - c < 0:
            raise DomainError(f"tail n - {c} is negative at n = {size}")
        if self.prefix and not is_rigid(self.prefix):
            raise DomainError(f"prefix {list(self.prefix)} is not rigid")
        top = max(self.prefix, default=-1)
        if top < size - c - 1:
            raise DomainError(f"values {top + 1}..{size - c - 1} are never hit: not a surjection")

    @classmethod
    def of(cls, prefix: Sequence[int] = (), tail_offset: int = 0) -> 'EARigidSurjection':
        prefix = list(prefix)
        cls(tuple(prefix), tail_offset)
        while prefix and prefix[-1] == len(prefix) - 1 - tail_offset:
            prefix.pop()
        return cls(tuple(prefix), tail_offset)

    @classmethod
    def identity(cls) -> 'EARigidSurjection':
        return cls((), 0)

    def __call__(self, n: int) -> int:
        return evaluate(self, n)

    def first_preimage(self, k: int) -> int:
        """min p^{-1}(k); increasing in k."""
        for i, v in enumerate(self.prefix):
            if v == k:
                return i
        return k + self.tail_offset


def evaluate(p: EARigidSurjection, n: int) -> int:
    if n < 0:
        raise DomainError(f"negative index {n}")
    if n < len(p.prefix):
        return p.prefix[n]
    return n - p.tail_offset


def compose(r: EARigidSurjection, p: EARigidSurjection) -> EARigidSurjection:
    """n -> r(p(n))."""
    start = max(len(p.prefix), len(r.prefix) + p.tail_offset)
    prefix = [evaluate(r, evaluate(p, n)) for n in range(start)]
    return EARigidSurjection.of(prefix, p.tail_offset + r.tail_offset)


def apply(x: EPSeq, p: EARigidSurjection) -> EPSeq:
    """x∘p; a U-point stays a U-point."""
    start = max(len(p.prefix), len(x.transient) + p.tail_offset)
    values = [entry(x, evaluate(p, n)) for n in range(start + len(x.period))]
    return type(x).of(values[:start], values[start:])


def compose_finite(r: FiniteRigidSurjection, p: FiniteRigidSurjection) -> FiniteRigidSurjection:
    if r.domain != p.codomain:
        raise DomainError(f"cannot compose [{p.domain}]->[{p.codomain}] with [{r.domain}]->[{r.codomain}]")
    return FiniteRigidSurjection(tuple(r.values[v] for v in p.values))


def extend_finite(f: FiniteRigidSurjection) -> EARigidSurjection:
    """Continue f past its domain with fresh values: p(j) = j - n + m."""
    return EARigidSurjection.of(f.values, f.domain - f.codomain)


@lru_cache(maxsize=None)
def stirling2(n: int, m: int) -> int:
    if n == m:
        return 1
    if m == 0 or m > n:
        return 0
    return m * stirling2(n - 1, m) + stirling2(n - 1, m - 1)


def iter_rigid(n: int, m: int) -> Iterator[FiniteRigidSurjection]:
    if m < 1 or m > n:
        raise DomainError(f"no rigid surjection [{n}] -> [{m}]: need 1 <= m <= n")
    values = [0] * n

    def fill(i: int, top: int) -> Iterator[FiniteRigidSurjection]:
        if i == n:
            if top == m - 1:
                yield FiniteRigidSurjection(tuple(values))
            return
        # positions left must still reach value m - 1
        if (m - 1 - top) > n - i:
            return
        for v in range(min(top + 1, m - 1) + 1):
            values[i] = v
            yield from fill(i + 1, max(top, v))

    values[0] = 0
    yield from fill(1, 0)


def enumerate_rigid(n: int, m: int) -> List[FiniteRigidSurjection]:
    """All rigid surjections [n] -> [m] in lexicographic order; S(n, m) of them."""
    result = list(iter_rigid(n, m))
    logger.debug(f"enumerated {len(result)} rigid surjections [{n}] -> [{m}]")
    return result


def to_ordered_partition(f: FiniteRigidSurjection) -> OrderedPartition:
    blocks: List[List[int]] = [[] for _ in range(f.codomain)]
    for i, v in enumerate(f.values):
        blocks[v].append(i)
    return OrderedPartition(tuple(tuple(b) for b in blocks))


def from_ordered_partition(part: OrderedPartition) -> FiniteRigidSurjection:
    size = sum(len(b) for b in part.blocks)
    values = [0] * size
    for v, block in enumerate(part.blocks):
        for i in block:
            values[i] = v
    return FiniteRigidSurjection(tuple(values))


def is_coarsening(coarse: OrderedPartition, fine: OrderedPartition) -> bool:
    """Every block of ``fine`` lies inside a block of ``coarse``."""
    owner: Dict[int, int] = {}
    for j, block in enumerate(coarse.blocks):
        for i in block:
            owner[i] = j
    for block in fine.blocks:
        owners = {owner.get(i) for i in block}
        if len(owners) != 1 or None in owners:
            return False
    return True


def factorize(q: FiniteRigidSurjection, p: FiniteRigidSurjection) -> Optional[FiniteRigidSurjection]:
    """The unique r with q = r∘p, or None when q's partition does not coarsen p's."""
    if q.domain != p.domain:
        raise DomainError(f"factorize needs a common domain, got [{q.domain}] and [{p.domain}]")
    firsts = [p.values.index(k) for k in range(p.codomain)]
    candidate = tuple(q.values[i] for i in firsts)
    if not is_rigid(candidate):
        return None
    r = FiniteRigidSurjection(candidate)
    if compose_finite(r, p) != q:
        return None
    return r


def finite_to_json(f: FiniteRigidSurjection) -> dict:
    return {'values': list(f.values)}


def finite_from_json(data: dict) -> FiniteRigidSurjection:
    if not isinstance(data, dict) or not isinstance(data.get('values'), list):
        raise DomainError("rigid surjection JSON needs a 'values' list")
    return FiniteRigidSurjection(tuple(data['values']))


def ea_to_json(p: EARigidSurjection) -> dict:
    return {'prefix': list(p.prefix), 'tail_offset': p.tail_offset}


def ea_from_json(data: dict) -> EARigidSurjection:
    if not isinstance(data, dict) or not isinstance(data.get('prefix'), list):
        raise DomainError("eventually affine surjection JSON needs 'prefix' and 'tail_offset'")
    offset = data.get('tail_offset', 0)
    if not isinstance(offset, int) or isinstance(offset, bool):
        raise DomainError("'tail_offset' must be an integer")
    return EARigidSurjection.of(data['prefix'], offset)
