#!/usr/bin/env python3
"""
Set partitions of [n]

Enumeration by class (all, non-crossing, without singletons, crossing),
crossing tests, the block-index map alpha, the number of outermost blocks,
the closure and concatenation operators and the Kreweras complement.

Blocks are always kept in canonical order (by smallest element, each block
sorted ascending) and streams are emitted in lexicographic order of the
alpha vector.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from utils.config import CONFIG
from utils.errors import BadInputError, CapExceededError, CheckFailedError

logger = logging.getLogger(__name__)

CLASSES = ('ALL', 'NC', 'NOSING', 'NOSING_NC', 'NOSING_CROSS', 'CROSS')


@dataclass(frozen=True)
class SetPartition:
    n: int
    blocks: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: Optional[int] = None) -> 'SetPartition':
        """Canonicalize and validate a list of blocks"""
        canon = [tuple(sorted(b)) for b in blocks]
        canon = sorted((b for b in canon if b), key=lambda b: b[0])
        elements = [i for b in canon for i in b]
        if n is None:
            n = len(elements)
        if sorted(elements) != list(range(1, n + 1)):
            raise BadInputError(f"blocks {canon} do not partition [1..{n}]")
        return cls(n, tuple(canon))

    @classmethod
    def from_json(cls, data: Sequence[Sequence[int]]) -> 'SetPartition':
        return cls.from_blocks(data)

    @classmethod
    def null(cls) -> 'SetPartition':
        return cls(0, ())

    @property
    def m(self) -> int:
        return len(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def to_json(self) -> List[List[int]]:
        return [list(b) for b in self.blocks]

    def __str__(self) -> str:
        if not self.blocks:
            return "{}"
        return "".join("{" + ",".join(str(i) for i in b) + "}" for b in self.blocks)


@dataclass(frozen=True)
class PartitionType:
    """mu[k] is the number of blocks of size k, for k = 0..n (mu[0] is always 0)"""

    mu: Tuple[int, ...]

    @property
    def r(self) -> Tuple[int, ...]:
        return self.mu

    @property
    def n(self) -> int:
        return sum(k * c for k, c in enumerate(self.mu))

    @property
    def m(self) -> int:
        return sum(self.mu)

    @classmethod
    def from_counts(cls, counts: Dict[int, int], n: Optional[int] = None) -> 'PartitionType':
        if n is None:
            n = sum(k * c for k, c in counts.items())
        mu = [0] * (n + 1)
        for k, c in counts.items():
            if k < 1 or k > n or c < 0:
                raise BadInputError(f"invalid partition type entry mu[{k}]={c} for n={n}")
            mu[k] = c
        result = cls(tuple(mu))
        if result.n != n:
            raise BadInputError(f"type {counts} does not sum to n={n}")
        return result

    def counts(self) -> Dict[int, int]:
        return {k: c for k, c in enumerate(self.mu) if c}


def alpha(p: SetPartition) -> Tuple[int, ...]:
    """alpha(i) is the 1-based index of the block containing i"""
    labels = [0] * p.n
    for index, block in enumerate(p.blocks, start=1):
        for i in block:
            labels[i - 1] = index
    return tuple(labels)


def from_alpha(labels: Sequence[int]) -> SetPartition:
    blocks: Dict[int, List[int]] = {}
    for i, label in enumerate(labels, start=1):
        blocks.setdefault(label, []).append(i)
    return SetPartition.from_blocks(blocks.values(), n=len(labels))


def is_crossing(p: SetPartition) -> bool:
    """True iff some i<j<k<l have i,k in one block and j,l in another"""
    labels = alpha(p)
    last = {}
    for i, label in enumerate(labels):
        last[label] = i
    stack: List[int] = []
    seen = set()
    for i, label in enumerate(labels):
        if label not in seen:
            seen.add(label)
            if last[label] > i:
                stack.append(label)
            continue
        if not stack or stack[-1] != label:
            return True
        if last[label] == i:
            stack.pop()
    return False


def has_singleton(p: SetPartition) -> bool:
    return any(len(b) == 1 for b in p.blocks)


def partition_type(p: SetPartition) -> PartitionType:
    mu = [0] * (p.n + 1)
    for block in p.blocks:
        mu[len(block)] += 1
    return PartitionType(tuple(mu))


def _require_nc(p: SetPartition, operation: str):
    if is_crossing(p):
        raise BadInputError(f"{operation} is only defined for non-crossing partitions, got {p}")


def iota(p: SetPartition) -> int:
    """Number of outermost blocks (not nested under the span of another block)"""
    _require_nc(p, "iota")
    outer = 0
    for b in p.blocks:
        nested = any(c[0] < b[0] and b[-1] < c[-1] for c in p.blocks if c is not b)
        if not nested:
            outer += 1
    return outer


def closure(p: SetPartition) -> SetPartition:
    """Shift every block by one and merge the new element 1 into the block that held n"""
    _require_nc(p, "closure")
    if p.n == 0:
        return SetPartition(1, ((1,),))
    blocks = []
    for b in p.blocks:
        shifted = [i + 1 for i in b]
        if p.n in b:
            shifted = [1] + shifted
        blocks.append(shifted)
    return SetPartition.from_blocks(blocks, n=p.n + 1)


def oplus(p: SetPartition, q: SetPartition) -> SetPartition:
    blocks = [list(b) for b in p.blocks] + [[p.n + i for i in b] for b in q.blocks]
    return SetPartition.from_blocks(blocks, n=p.n + q.n)


def kreweras(p: SetPartition) -> SetPartition:
    """
    Kreweras complement of a non-crossing partition.

    Node k sits between k and k+1 (cyclically). The complement is the cycle
    structure of sigma^{-1} o gamma, with sigma the cyclic successor within
    each block and gamma the long cycle i -> i+1 mod n.
    """
    _require_nc(p, "kreweras")
    n = p.n
    if n == 0:
        return SetPartition.null()
    predecessor = {}
    for block in p.blocks:
        for index, i in enumerate(block):
            predecessor[block[(index + 1) % len(block)]] = i
    perm = {i: predecessor[i % n + 1] for i in range(1, n + 1)}

    blocks = []
    visited = set()
    for start in range(1, n + 1):
        if start in visited:
            continue
        cycle = []
        i = start
        while i not in visited:
            visited.add(i)
            cycle.append(i)
            i = perm[i]
        blocks.append(cycle)
    return SetPartition.from_blocks(blocks, n=n)


def kreweras_bruteforce(p: SetPartition) -> SetPartition:
    """
    Coarsest partition of the interleaved nodes whose chords cross no chord of p.

    Original element i is placed at position 2i-1 and node i at 2i.
    """
    _require_nc(p, "kreweras")
    n = p.n
    if n > 8:
        raise CapExceededError("kreweras_bruteforce n", n, 8)
    if n == 0:
        return SetPartition.null()
    originals = [[2 * i - 1 for i in b] for b in p.blocks]
    for m in range(1, n + 1):
        for candidate in _nc_recursive(n, m):
            nodes = [[2 * i for i in b] for b in candidate.blocks]
            union = SetPartition.from_blocks(originals + nodes, n=2 * n)
            if not is_crossing(union):
                return candidate
    raise CheckFailedError(f"no compatible node partition found for {p}")


def _restricted_growth(n: int, m: Optional[int]) -> Iterator[Tuple[int, ...]]:
    """Alpha vectors of all partitions of [n] (with m blocks if given), lexicographic"""
    if n == 0:
        if m in (None, 0):
            yield ()
        return
    labels = [0] * n

    def extend(i: int, used: int):
        if i == n:
            if m is None or used == m:
                yield tuple(labels)
            return
        remaining = n - i
        for label in range(1, used + 2):
            new_used = max(used, label)
            if m is not None and (new_used > m or new_used + remaining - 1 < m):
                continue
            labels[i] = label
            yield from extend(i + 1, new_used)

    yield from extend(0, 0)


def _all_partitions(n: int, m: Optional[int]) -> Iterator[SetPartition]:
    for labels in _restricted_growth(n, m):
        yield from_alpha(labels)


@lru_cache(maxsize=None)
def _nc_recursive(n: int, m: int) -> Tuple[SetPartition, ...]:
    """Non-crossing partitions with m blocks built by the closure/concatenation recursion"""
    if n == 0:
        return (SetPartition.null(),) if m == 0 else ()
    if m == 0 or m > n:
        return ()
    # element n is either a singleton appended to N(n-1, m-1), or shares its
    # block with the first element of a closed tail.
    found = set(oplus(p, SetPartition(1, ((1,),))) for p in _nc_recursive(n - 1, m - 1))
    for n2 in range(1, n):
        n1 = n - 1 - n2
        for m2 in range(1, n2 + 1):
            m1 = m - m2
            if m1 < 0 or m1 > n1:
                continue
            heads = _nc_recursive(n1, m1)
            if not heads:
                continue
            tails = [closure(q) for q in _nc_recursive(n2, m2)]
            for head in heads:
                for tail in tails:
                    found.add(oplus(head, tail))
    return tuple(sorted(found, key=alpha))


def _matches(p: SetPartition, cls: str) -> bool:
    if cls == 'ALL':
        return True
    crossing = is_crossing(p)
    if cls == 'NC':
        return not crossing
    if cls == 'CROSS':
        return crossing
    if has_singleton(p):
        return False
    if cls == 'NOSING':
        return True
    if cls == 'NOSING_NC':
        return not crossing
    return crossing


def enumerate_partitions(n: int, m: Optional[int] = None, cls: str = 'ALL',
                         method: str = 'recursion') -> Iterator[SetPartition]:
    """
    Stream the partitions of [n] (with m blocks if given) in a class.

    Non-crossing classes use the closure/concatenation recursion by default;
    method='filter' filters the stream of all partitions instead, and
    method='check' computes both and raises CheckFailedError on disagreement.
    """
    cls = cls.upper()
    if cls not in CLASSES:
        raise BadInputError(f"unknown partition class {cls}, expected one of {CLASSES}")
    if n < 0 or (m is not None and not 0 <= m <= n):
        raise BadInputError(f"invalid (n, m) = ({n}, {m})")
    if method not in ('recursion', 'filter', 'check'):
        raise BadInputError(f"unknown enumeration method {method}")
    uses_filter = cls not in ('NC', 'NOSING_NC') or method != 'recursion'
    if uses_filter and n > CONFIG['enum_cap']:
        raise CapExceededError("enumerate n", n, CONFIG['enum_cap'])
    return _enumerate(n, m, cls, method)


def _enumerate(n: int, m: Optional[int], cls: str, method: str) -> Iterator[SetPartition]:
    if cls in ('NC', 'NOSING_NC') and method != 'filter':
        if m is None:
            ms = [0] if n == 0 else range(1, n + 1)
            members = sorted((p for k in ms for p in _nc_recursive(n, k)), key=alpha)
        else:
            members = list(_nc_recursive(n, m))
        if cls == 'NOSING_NC':
            members = [p for p in members if not has_singleton(p)]
        if method == 'check':
            filtered = [p for p in _all_partitions(n, m) if _matches(p, cls)]
            if filtered != members:
                raise CheckFailedError(
                    f"non-crossing recursion and filter disagree at n={n}, m={m}: "
                    f"{len(members)} vs {len(filtered)}")
            logger.debug(f"NC cross-check passed for n={n}, m={m}: {len(members)} partitions")
        yield from members
        return

    for p in _all_partitions(n, m):
        if _matches(p, cls):
            yield p


def count_partitions(n: int, m: Optional[int] = None, cls: str = 'ALL') -> int:
    return sum(1 for _ in enumerate_partitions(n, m, cls))


def nc_of_type(n: int, mu: PartitionType) -> List[SetPartition]:
    if mu.n != n:
        raise BadInputError(f"type {mu.counts()} is not a partition of {n}")
    return [p for p in enumerate_partitions(n, mu.m, 'NC') if partition_type(p) == mu]


def integer_partitions(n: int, m: Optional[int] = None) -> Iterator[PartitionType]:
    """Partition types mu of n (optionally with m parts), largest parts first"""

    def parts(remaining: int, largest: int) -> Iterator[List[int]]:
        if remaining == 0:
            yield []
            return
        for k in range(min(remaining, largest), 0, -1):
            for rest in parts(remaining - k, k):
                yield [k] + rest

    for sizes in parts(n, n):
        if m is not None and len(sizes) != m:
            continue
        counts: Dict[int, int] = {}
        for k in sizes:
            counts[k] = counts.get(k, 0) + 1
        yield PartitionType.from_counts(counts, n)
