#!/usr/bin/env python3
"""
Isserlis/Wick oracle for Wishart partition moments

A Gaussian word is a product of fixed matrices and rank-one factors
X_l X_l' (one Gaussian vector per label l). Expectations are sums over
same-label perfect matchings of the Gaussian slots; every matched pair
inserts the covariance P. Following the chain through the matched pairs
splits it into one open path (the matrix part) and closed loops (traces).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import factorial
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from utils.config import CONFIG
from utils.errors import BadInputError, CapExceededError
from utils.partitions import SetPartition, alpha, enumerate_partitions, partition_type
from utils.tracepoly import TraceMonomial, TracePolynomial

logger = logging.getLogger(__name__)

MOMENT_CLASSES = {
    'Q_ALL': 'NOSING',
    'Q_PLUS': 'NOSING_NC',
    'Q_MINUS': 'NOSING_CROSS',
    'NC': 'NC',
    'P_ALL': 'ALL',
}

Pairing = Tuple[Tuple[int, int], ...]
Step = Tuple[int, bool]


@dataclass(frozen=True)
class Fixed:
    """The matrix P^power (power 0 is the identity)"""
    power: int = 0


@dataclass(frozen=True, eq=False)
class Matrix:
    """A concrete matrix, for numeric words"""
    value: np.ndarray


@dataclass(frozen=True)
class Occ:
    """One rank-one factor X_label X_label'"""
    label: int


Item = Union[Fixed, Matrix, Occ]


@dataclass(frozen=True, eq=False)
class GaussianWord:
    items: Tuple[Item, ...]

    def __post_init__(self):
        for item in self.items:
            if isinstance(item, Occ) and item.label < 1:
                raise BadInputError(f"labels must be positive, got {item.label}")

    @property
    def labels(self) -> Tuple[int, ...]:
        return tuple(item.label for item in self.items if isinstance(item, Occ))

    @property
    def is_numeric(self) -> bool:
        return any(isinstance(item, Matrix) for item in self.items)

    def slot_labels(self) -> Tuple[int, ...]:
        """Label of each Gaussian slot: occurrence j owns ket slot 2j and bra slot 2j+1"""
        return tuple(label for label in self.labels for _ in range(2))

    def symbolic_segments(self) -> Tuple[int, ...]:
        """P-powers of the k+1 stretches between consecutive occurrences"""
        segments = [0]
        for item in self.items:
            if isinstance(item, Occ):
                segments.append(0)
            elif isinstance(item, Fixed):
                segments[-1] += item.power
            else:
                raise BadInputError("numeric word has no symbolic segments")
        return tuple(segments)

    def numeric_segments(self, P: np.ndarray) -> List[np.ndarray]:
        dim = P.shape[0]
        segments = [np.eye(dim)]
        for item in self.items:
            if isinstance(item, Occ):
                segments.append(np.eye(dim))
            elif isinstance(item, Fixed):
                segments[-1] = segments[-1] @ np.linalg.matrix_power(P, item.power)
            else:
                if item.value.shape != P.shape:
                    raise BadInputError(f"dimension mismatch {item.value.shape} vs {P.shape}")
                segments[-1] = segments[-1] @ item.value
        return segments


def _segment_end(segment: int, forward: bool, k: int) -> Optional[int]:
    if forward:
        return 2 * segment if segment < k else None
    return 2 * segment - 1 if segment > 0 else None


def _enter(slot: int) -> Step:
    # a ket slot closes the segment before its occurrence, a bra slot opens the next one
    if slot % 2 == 0:
        return slot // 2, False
    return (slot + 1) // 2, True


def _loops(k: int, partner: Sequence[int]) -> Tuple[List[Step], List[List[Step]]]:
    seen = [False] * (k + 1)
    path: List[Step] = []
    segment, forward = 0, True
    while True:
        seen[segment] = True
        path.append((segment, forward))
        end = _segment_end(segment, forward, k)
        if end is None:
            break
        segment, forward = _enter(partner[end])

    cycles: List[List[Step]] = []
    for start in range(1, k):
        if seen[start]:
            continue
        cycle: List[Step] = []
        segment, forward = start, True
        while not seen[segment]:
            seen[segment] = True
            cycle.append((segment, forward))
            segment, forward = _enter(partner[_segment_end(segment, forward, k)])
        cycles.append(cycle)
    return path, cycles


def _partner_array(pairing: Pairing, slots: int) -> List[int]:
    partner = [-1] * slots
    for a, b in pairing:
        partner[a] = b
        partner[b] = a
    if -1 in partner:
        raise BadInputError(f"pairing {pairing} is not perfect on {slots} slots")
    return partner


def perfect_matchings(slots: Sequence[int]) -> Iterator[Pairing]:
    """All perfect matchings, smallest unmatched slot paired first"""
    if not slots:
        yield ()
        return
    first, rest = slots[0], slots[1:]
    for index, other in enumerate(rest):
        remaining = rest[:index] + rest[index + 1:]
        for tail in perfect_matchings(remaining):
            yield ((first, other),) + tail


def pairings(word: GaussianWord) -> Iterator[Pairing]:
    """Same-label perfect matchings of the word's Gaussian slots"""
    slot_labels = word.slot_labels()
    by_label: Dict[int, List[int]] = {}
    for slot, label in enumerate(slot_labels):
        by_label.setdefault(label, []).append(slot)
    groups = [list(perfect_matchings(by_label[label])) for label in sorted(by_label)]
    for choice in product(*groups):
        yield tuple(sorted(pair for group in choice for pair in group))


def contract(word: GaussianWord, pairing: Pairing, P: Optional[np.ndarray] = None):
    """
    Contract one pairing. Symbolic words give a TraceMonomial with
    coefficient 1; numeric words (or a numeric P) give a matrix, where a
    backward pass through a stretch of the chain contributes its transpose.
    """
    slot_labels = word.slot_labels()
    for a, b in pairing:
        if slot_labels[a] != slot_labels[b]:
            raise BadInputError(f"slots {a} and {b} carry different labels")
    k = len(word.labels)
    path, cycles = _loops(k, _partner_array(pairing, 2 * k))

    if P is None and not word.is_numeric:
        segments = word.symbolic_segments()
        w = sum(segments[s] for s, _ in path) + len(path) - 1
        traces: Dict[int, int] = {}
        for cycle in cycles:
            power = sum(segments[s] for s, _ in cycle) + len(cycle)
            traces[power] = traces.get(power, 0) + 1
        return TraceMonomial(Fraction(1), tuple(sorted(traces.items())), w)

    if P is None:
        raise BadInputError("numeric contraction needs a numeric covariance P")
    P = np.asarray(P, dtype=float)
    segments = word.numeric_segments(P)

    def oriented(step: Step) -> np.ndarray:
        s, forward = step
        return segments[s] if forward else segments[s].T

    result = oriented(path[0])
    for step in path[1:]:
        result = result @ P @ oriented(step)
    for cycle in cycles:
        loop = oriented(cycle[0]) @ P
        for step in cycle[1:]:
            loop = loop @ oriented(step) @ P
        result = result * np.trace(loop)
    return result


def _canonical_labels(labels: Sequence[int]) -> Tuple[int, ...]:
    mapping: Dict[int, int] = {}
    for label in labels:
        mapping.setdefault(label, len(mapping) + 1)
    return tuple(mapping[label] for label in labels)


@lru_cache(maxsize=None)
def _word_expectation(segments: Tuple[int, ...], labels: Tuple[int, ...]) -> TracePolynomial:
    items: List[Item] = [Fixed(segments[0])]
    for label, power in zip(labels, segments[1:]):
        items += [Occ(label), Fixed(power)]
    word = GaussianWord(tuple(items))
    total: Dict[Tuple, Fraction] = {}
    for pairing in pairings(word):
        term = contract(word, pairing)
        key = (term.v, term.w)
        total[key] = total.get(key, 0) + 1
    return TracePolynomial(total)


def word_expectation(word: GaussianWord, P: Optional[np.ndarray] = None):
    """E of a Gaussian word: a TracePolynomial, or a matrix for numeric words"""
    if P is None and not word.is_numeric:
        return _word_expectation(word.symbolic_segments(), _canonical_labels(word.labels))
    dim = np.asarray(P).shape[0]
    result = np.zeros((dim, dim))
    for pairing in pairings(word):
        result = result + contract(word, pairing, P)
    return result


def _check_cap(n: int, centered: bool, cap: Optional[int]):
    cap = CONFIG['wick_cap'] if cap is None else cap
    limit = cap // 2 if centered else cap // 2 + 1
    if n > limit:
        raise CapExceededError("wick n" + (" (centered)" if centered else ""), n, limit)


def _inclusion_exclusion(labels: Sequence[int], centered: bool) -> Iterator[Tuple[int, Tuple[int, ...], Tuple[int, ...]]]:
    """Yield (sign, segment powers, labels) for each kept subset of occurrences"""
    n = len(labels)
    subsets = [tuple(range(n))]
    if centered:
        subsets = [s for size in range(n + 1) for s in combinations(range(n), size)]
    for kept in subsets:
        sign = (-1) ** (n - len(kept))
        segments = [0]
        kept_set = set(kept)
        for i in range(n):
            if i in kept_set:
                segments.append(0)
            else:
                segments[-1] += 1
        yield sign, tuple(segments), tuple(labels[i] for i in kept)


def moment_partition(p: SetPartition, centered: bool, cap: Optional[int] = None) -> TracePolynomial:
    """E of the product of X_{alpha(i)} (centered: X_{alpha(i)} - P) over i = 1..n"""
    _check_cap(p.n, centered, cap)
    total = TracePolynomial.zero()
    for sign, segments, labels in _inclusion_exclusion(alpha(p), centered):
        total = total + sign * _word_expectation(segments, _canonical_labels(labels))
    return total


def moment_class(n: int, m: Optional[int], cls: str, centered: bool, cap: Optional[int] = None) -> TracePolynomial:
    """Sum of partition moments over a class of partitions of [n] with m blocks"""
    cls = cls.upper()
    if cls not in MOMENT_CLASSES:
        raise BadInputError(f"unknown moment class {cls}, expected one of {tuple(MOMENT_CLASSES)}")
    _check_cap(n, centered, cap)
    total = TracePolynomial.zero()
    count = 0
    for p in enumerate_partitions(n, m, MOMENT_CLASSES[cls]):
        total = total + moment_partition(p, centered, cap)
        count += 1
    logger.debug(f"moment_class n={n} m={m} {cls} centered={centered}: {count} partitions")
    return total


def _h_loops(n: int, pairs: Sequence[Tuple[int, int]], twisted: Sequence[bool]) -> Tuple[int, Dict[int, int]]:
    """
    Factor s of H^n has a left end at node s-1 and a right end at node s.
    A straight pair joins left-left and right-right ends with P, a twisted
    pair joins left-right and right-left. Internal nodes glue the right end
    of factor s to the left end of factor s+1.
    """
    link: Dict[Tuple[int, str], Tuple[int, str]] = {}
    for (s, t), twist in zip(pairs, twisted):
        if twist:
            ends = [((s, 'L'), (t, 'R')), ((s, 'R'), (t, 'L'))]
        else:
            ends = [((s, 'L'), (t, 'L')), ((s, 'R'), (t, 'R'))]
        for a, b in ends:
            link[a] = b
            link[b] = a

    def glue(end):
        s, side = end
        if side == 'R':
            return (s + 1, 'L') if s < n else None
        return (s - 1, 'R') if s > 1 else None

    visited = set()
    w = 0
    end = (1, 'L')
    while True:
        visited.add(end)
        end = link[end]
        visited.add(end)
        w += 1
        end = glue(end)
        if end is None:
            break

    traces: Dict[int, int] = {}
    for start in sorted(link):
        if start in visited:
            continue
        length = 0
        end = start
        while end not in visited:
            visited.add(end)
            end = link[end]
            visited.add(end)
            length += 1
            end = glue(end)
        traces[length] = traces.get(length, 0) + 1
    return w, traces


@lru_cache(maxsize=None)
def _moment_h(power: int) -> TracePolynomial:
    total: Dict[Tuple, Fraction] = {}
    for matching in perfect_matchings(list(range(1, power + 1))):
        for twisted in product((False, True), repeat=len(matching)):
            w, traces = _h_loops(power, matching, twisted)
            key = (tuple(sorted(traces.items())), w)
            total[key] = total.get(key, 0) + 1
    return TracePolynomial(total)


def moment_H(power: int, cap: Optional[int] = None) -> TracePolynomial:
    """E(H^power) for the Gaussian limit H with E[H_ij H_kl] = P_ik P_jl + P_il P_jk"""
    cap = CONFIG['h_cap'] if cap is None else cap
    if power < 0:
        raise BadInputError(f"power must be non-negative, got {power}")
    if power > cap:
        raise CapExceededError("moment_H power", power, cap)
    if power == 0:
        return TracePolynomial.one()
    if power % 2:
        return TracePolynomial.zero()
    return _moment_h(power)


def moment_numeric(p: SetPartition, Q: Sequence[np.ndarray], centered: bool, Pnum: np.ndarray,
                   cap: Optional[int] = None) -> np.ndarray:
    """
    E of Q_1 X_{alpha(1)} Q_2 X_{alpha(2)} ... Q_n X_{alpha(n)} (n matrices) or of
    Q_0 X_{alpha(1)} Q_1 ... X_{alpha(n)} Q_n (n+1 matrices), centered or not.
    """
    Pnum = np.asarray(Pnum, dtype=float)
    if Pnum.ndim != 2 or Pnum.shape[0] != Pnum.shape[1]:
        raise BadInputError(f"P must be square, got shape {Pnum.shape}")
    n = p.n
    if len(Q) not in (n, n + 1):
        raise BadInputError(f"need {n} or {n + 1} matrices Q, got {len(Q)}")
    Qs = [np.asarray(q, dtype=float) for q in Q]
    for q in Qs:
        if q.shape != Pnum.shape:
            raise BadInputError(f"dimension mismatch {q.shape} vs {Pnum.shape}")
    _check_cap(n, centered, cap)
    dim = Pnum.shape[0]
    # with n matrices each Q_i precedes X_i and nothing follows the last factor
    if len(Qs) == n:
        Qs = Qs + [np.eye(dim)]
    labels = alpha(p)
    result = np.zeros((dim, dim))
    for sign, kept in _subsets(n, centered):
        items: List[Item] = []
        for i in range(n):
            items.append(Matrix(Qs[i]))
            items.append(Occ(labels[i]) if i in kept else Matrix(Pnum))
        items.append(Matrix(Qs[n]))
        result = result + sign * word_expectation(GaussianWord(tuple(items)), Pnum)
    return result


def _subsets(n: int, centered: bool) -> Iterator[Tuple[int, set]]:
    if not centered:
        yield 1, set(range(n))
        return
    for size in range(n + 1):
        for kept in combinations(range(n), size):
            yield (-1) ** (n - size), set(kept)


def rank_one_reduction(Q: Sequence[np.ndarray], dim: Optional[int] = None) -> np.ndarray:
    """
    Partition-sum value of E((XQ_2)...(XQ_n)X) at P = I, with Q_1 = I:
    sum over partitions tau of [n] of 2^{n-m} prod_k (k-1)!^{r_k(tau)}
    prod_{i>=2} Tr(Q_{tau_i}) (Q_{tau_1})_sym, where Q_b is the ordered product
    over the block. Exact for n <= 3 and for commuting Q.
    """
    if dim is None:
        if not Q:
            raise BadInputError("dimension needed when no matrices are given")
        dim = np.asarray(Q[0]).shape[0]
    Qs = [np.eye(dim)] + [np.asarray(q, dtype=float) for q in Q]
    n = len(Qs)
    result = np.zeros((dim, dim))
    for tau in enumerate_partitions(n, None, 'ALL'):
        weight = float(2 ** (n - tau.m))
        for k, c in enumerate(partition_type(tau).mu):
            if k >= 1 and c:
                weight *= factorial(k - 1) ** c
        products = []
        for block in tau.blocks:
            M = np.eye(dim)
            for i in block:
                M = M @ Qs[i - 1]
            products.append(M)
        head = products[0]
        for M in products[1:]:
            weight *= np.trace(M)
        result += weight * (head + head.T) / 2
    return result
