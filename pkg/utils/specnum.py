#!/usr/bin/env python3
"""
Exact counting sequences and Bell polynomials

All counts are Python integers; Bell polynomials work over any commutative
ring whose elements support +, * and multiplication by integers (Fraction,
RLaurent, TracePolynomial).
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod
from typing import Any, Dict, List, Sequence, Tuple, Union

from utils.errors import BadInputError, HypothesisError
from utils.partitions import PartitionType

logger = logging.getLogger(__name__)

KINDS = ('STIRLING1', 'STIRLING2', 'BELL', 'CATALAN', 'NARAYANA', 'RIORDAN_NM', 'RIORDAN_N',
         'KREWERAS', 'CATALAN_TRIANGLE', 'POCHHAMMER', 'GAUSS_EVEN')


def binom(a: int, b: int) -> int:
    """Binomial coefficient, zero outside 0 <= b <= a"""
    if a < 0 or b < 0 or b > a:
        return 0
    return comb(a, b)


def _check_nonneg(*values: int):
    for v in values:
        if not isinstance(v, int) or v < 0:
            raise BadInputError(f"index must be a non-negative integer, got {v!r}")


@lru_cache(maxsize=None)
def stirling1(n: int, m: int) -> int:
    """Signed Stirling numbers of the first kind: (x)_n = sum_m s(n,m) x^m"""
    _check_nonneg(n, m)
    if n == 0 and m == 0:
        return 1
    if n == 0 or m == 0:
        return 0
    return stirling1(n - 1, m - 1) - (n - 1) * stirling1(n - 1, m)


@lru_cache(maxsize=None)
def stirling2(n: int, m: int) -> int:
    _check_nonneg(n, m)
    if n == 0 and m == 0:
        return 1
    if n == 0 or m == 0:
        return 0
    return m * stirling2(n - 1, m) + stirling2(n - 1, m - 1)


def bell_number(n: int) -> int:
    _check_nonneg(n)
    return sum(stirling2(n, m) for m in range(n + 1))


def catalan(n: int) -> int:
    _check_nonneg(n)
    return comb(2 * n, n) // (n + 1)


def narayana(n: int, m: int) -> int:
    """Number of non-crossing partitions of [n] with m blocks"""
    _check_nonneg(n, m)
    if n == 0:
        return 1 if m == 0 else 0
    return binom(n, m - 1) * binom(n, m) // n


def riordan_nm(n: int, m: int) -> int:
    """Number of non-crossing partitions of [n] with m blocks and no singleton"""
    _check_nonneg(n, m)
    if n == 0:
        return 1 if m == 0 else 0
    return binom(n + 1, m) * binom(n - m - 1, m - 1) // (n + 1)


def riordan_n(n: int) -> int:
    return sum(riordan_nm(n, m) for m in range(n + 1))


def kreweras_count(mu: PartitionType) -> int:
    """Number of non-crossing partitions of type mu: n!/((n+1-m)! prod mu_k!)"""
    n, m = mu.n, mu.m
    if m > n + 1 or (n > 0 and m == 0):
        return 0
    return factorial(n) // (factorial(n + 1 - m) * prod(factorial(c) for c in mu.mu))


def catalan_triangle(n: int, m: int) -> int:
    """Non-crossing partitions of [n] whose first block has m elements: (m/n) C(2n-m-1, n-1)"""
    _check_nonneg(n, m)
    if n == 0:
        return 1 if m == 0 else 0
    if m == 0 or m > n:
        return 0
    return m * binom(2 * n - m - 1, n - 1) // n


@lru_cache(maxsize=None)
def catalan_triangle_convolution(n: int, m: int) -> int:
    """Sum over compositions k_1+...+k_m = n (k_i >= 1) of prod C_{k_i - 1}"""
    _check_nonneg(n, m)
    if m == 0:
        return 1 if n == 0 else 0
    return sum(catalan(k - 1) * catalan_triangle_convolution(n - k, m - 1) for k in range(1, n - m + 2))


def pochhammer(x: Union[int, Fraction], m: int) -> Union[int, Fraction]:
    """Falling factorial (x)_m = x (x-1) ... (x-m+1)"""
    _check_nonneg(m)
    result = 1
    for i in range(m):
        result *= x - i
    return result


def gauss_even(n: int) -> int:
    """v_{2n} = (2n)!/(2^n n!), the number of pair partitions of [2n]"""
    _check_nonneg(n)
    return factorial(2 * n) // (2 ** n * factorial(n))


def count(kind: str, args: Sequence[Any]) -> int:
    """Dispatch a counting sequence by name"""
    kind = kind.upper()
    try:
        if kind == 'STIRLING1':
            return stirling1(int(args[0]), int(args[1]))
        if kind == 'STIRLING2':
            return stirling2(int(args[0]), int(args[1]))
        if kind == 'BELL':
            return bell_number(int(args[0]))
        if kind == 'CATALAN':
            return catalan(int(args[0]))
        if kind == 'NARAYANA':
            return narayana(int(args[0]), int(args[1]))
        if kind == 'RIORDAN_NM':
            return riordan_nm(int(args[0]), int(args[1]))
        if kind == 'RIORDAN_N':
            return riordan_n(int(args[0]))
        if kind == 'KREWERAS':
            mu = args[0] if isinstance(args[0], PartitionType) else parse_type(args)
            return kreweras_count(mu)
        if kind == 'CATALAN_TRIANGLE':
            return catalan_triangle(int(args[0]), int(args[1]))
        if kind == 'POCHHAMMER':
            return pochhammer(int(args[0]), int(args[1]))
        if kind == 'GAUSS_EVEN':
            return gauss_even(int(args[0]))
    except (IndexError, ValueError, TypeError) as e:
        raise BadInputError(f"bad arguments {list(args)} for {kind}: {e}")
    raise BadInputError(f"unknown count kind {kind}, expected one of {KINDS}")


def parse_type(args: Sequence[Any]) -> PartitionType:
    """Parse 'k:c' tokens (c blocks of size k) into a partition type"""
    counts: Dict[int, int] = {}
    for token in args:
        size, _, multiplicity = str(token).partition(':')
        counts[int(size)] = counts.get(int(size), 0) + int(multiplicity or 1)
    return PartitionType.from_counts(counts)


def _ring_one(x: Sequence[Any]):
    if x and hasattr(type(x[0]), 'one'):
        return type(x[0]).one()
    return Fraction(1)


def _ring_zero(x: Sequence[Any]):
    return 0 * _ring_one(x)


def bell_partial(k: int, n: int, x: Sequence[Any]):
    """Partial Bell polynomial B_{n,k}(x_1, ..., x_{n-k+1}) with k parts"""
    _check_nonneg(k, n)
    if n > 0 and len(x) < n - k + 1:
        raise BadInputError(f"need at least {n - k + 1} arguments, got {len(x)}")
    table: Dict[Tuple[int, int], Any] = {}

    def b(nn: int, kk: int):
        if kk == 0:
            return _ring_one(x) if nn == 0 else _ring_zero(x)
        if nn < kk:
            return _ring_zero(x)
        key = (nn, kk)
        if key not in table:
            total = _ring_zero(x)
            for i in range(1, nn - kk + 2):
                total = total + comb(nn - 1, i - 1) * (x[i - 1] * b(nn - i, kk - 1))
            table[key] = total
        return table[key]

    return b(n, k)


def bell_complete(n: int, x: Sequence[Any]):
    """Complete Bell polynomial B_n(x_1, ..., x_n), B_0 = 1"""
    _check_nonneg(n)
    if n == 0:
        return _ring_one(x)
    if len(x) < n:
        raise BadInputError(f"need at least {n} arguments, got {len(x)}")
    # Y_n = sum_i C(n-1, i-1) x_i Y_{n-i}
    ys = [_ring_one(x)]
    for m in range(1, n + 1):
        total = _ring_zero(x)
        for i in range(1, m + 1):
            total = total + comb(m - 1, i - 1) * (x[i - 1] * ys[m - i])
        ys.append(total)
    return ys[n]


def bell_inverse(y: Sequence[Any]) -> List[Any]:
    """Recover x_1..x_n from y_k = B_k(x): x_n = sum_k (-1)^{k-1} (k-1)! B_{n,k}(y)"""
    n = len(y)
    result = []
    for m in range(1, n + 1):
        total = _ring_zero(y)
        for k in range(1, m + 1):
            total = total + ((-1) ** (k - 1) * factorial(k - 1)) * bell_partial(k, m, y)
        result.append(total)
    return result


def bell_tail_check(p: int, rho: Fraction, beta: Fraction, x: Sequence[Fraction], n: int, q: int) -> bool:
    """
    Check the Bell-polynomial estimates for sequences vanishing below p.

    Hypotheses: x_k = 0 for k < p and |x_k| <= k! rho beta^k for every given k.
    Checks |B_{pn} - (np)!/n! (x_p/p!)^n| <= (np)!/2 (2 beta)^{pn} S(n-1) and,
    for 1 <= q < p, |B_{pn+q}| <= (np+q)!/2 (2 beta)^{pn+q} S(n), where
    S(k) = sum_{1<=j<=k} (rho/2^{p-1})^j / j!. When every x_k >= 0 it also
    checks B_k >= 0 up to pn and the lower bound B_{pn} >= (np)!/n! (x_p/p!)^n.
    """
    rho, beta = Fraction(rho), Fraction(beta)
    x = [Fraction(v) for v in x]
    if p < 1 or n < 1 or q < 0:
        raise BadInputError(f"need p >= 1, n >= 1, q >= 0, got p={p}, n={n}, q={q}")
    if q >= p and q != 0:
        raise HypothesisError("1 <= q < p", f"q={q}, p={p}")
    needed = p * n + q
    if len(x) < needed:
        raise BadInputError(f"need {needed} sequence values, got {len(x)}")
    if rho < 0 or beta < 0:
        raise HypothesisError("rho >= 0 and beta >= 0")
    for k in range(1, len(x) + 1):
        if k < p and x[k - 1] != 0:
            raise HypothesisError("x_k = 0 for k < p", f"x_{k} = {x[k - 1]}")
        if abs(x[k - 1]) > factorial(k) * rho * beta ** k:
            raise HypothesisError("|x_k| <= k! rho beta^k", f"k={k}")

    ratio = rho / 2 ** (p - 1)

    def tail_sum(upper: int) -> Fraction:
        return sum((ratio ** j / factorial(j) for j in range(1, upper + 1)), Fraction(0))

    leading = Fraction(factorial(n * p), factorial(n)) * (x[p - 1] / factorial(p)) ** n
    b_pn = bell_complete(n * p, x)
    first = abs(b_pn - leading) <= Fraction(factorial(n * p), 2) * (2 * beta) ** (p * n) * tail_sum(n - 1)

    second = True
    if q >= 1:
        b_pnq = bell_complete(n * p + q, x)
        second = abs(b_pnq) <= Fraction(factorial(n * p + q), 2) * (2 * beta) ** (p * n + q) * tail_sum(n)

    positive = True
    if all(v >= 0 for v in x):
        positive = all(bell_complete(k, x) >= 0 for k in range(needed + 1)) and b_pn >= leading

    logger.debug(f"bell tail check p={p} n={n} q={q}: first={first} second={second} positive={positive}")
    return first and second and positive


def central_binomial_check(n: int) -> bool:
    """1/sqrt(4n) <= (2n)!/(2^{2n} n!^2) <= 1/sqrt(3n+1), compared through squares"""
    if n < 1:
        raise BadInputError(f"need n >= 1, got {n}")
    c = Fraction(comb(2 * n, n), 4 ** n)
    return Fraction(1, 4 * n) <= c * c <= Fraction(1, 3 * n + 1)


def falling_factorial_coefficients(m: int) -> Dict[int, int]:
    """Coefficients of (N)_m as a polynomial in N"""
    return {l: stirling1(m, l) for l in range(m + 1) if stirling1(m, l)}
