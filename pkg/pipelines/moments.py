#!/usr/bin/env python3
"""
Wishart Moment Formulae

Catalan-type recursions and closed-form partition sums for the matrix
moments of the fluctuation matrix H_N = sqrt(N)(P_N - P), its Gaussian limit
H and the sample covariance P_N, plus their isotropic (P = I) values and the
alpha coefficient tables. Every object that has two routes exposes both so
they can be cross-checked exactly.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial, prod
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from utils.config import CONFIG
from utils.errors import BadInputError, CapExceededError, CheckFailedError
from utils.partitions import (SetPartition, enumerate_partitions, from_alpha,
                              iota, is_crossing, kreweras, partition_type)
from utils.specnum import bell_complete, binom, catalan, stirling1
from utils.tracepoly import RLaurent, TracePolynomial
from utils.wick import moment_class, moment_partition

logger = logging.getLogger(__name__)

ROUTES = ('RECURSION', 'CLOSED_FORM', 'WICK')
ISOTROPIC_KINDS = ('M_PI_CIRC', 'M_PI_CENTERED', 'X_MINUS_I_POWER', 'M_PLUS_I', 'RANK1_POWER')

# exponent of N -> coefficient polynomial
NSeries = Dict[Fraction, TracePolynomial]


@dataclass
class MomentResult:
    value: Any
    meta: Dict[str, Any] = field(default_factory=dict)


def _check_recursion_cap(n: int, cap: Optional[int] = None):
    cap = CONFIG['recursion_cap'] if cap is None else cap
    if n < 0:
        raise BadInputError(f"n must be non-negative, got {n}")
    if n > cap:
        raise CapExceededError("recursion n", n, cap)


# Catalan-type recursions

@lru_cache(maxsize=None)
def _m_plus(n: int) -> TracePolynomial:
    if n == 0:
        return TracePolynomial.one()
    total = TracePolynomial.zero()
    for k in range(n):
        mk = _m_plus(k)
        left = mk.mul_P() + mk.mul_P().trace()
        total = total + left * _m_plus(n - 1 - k).mul_P()
    return total


@lru_cache(maxsize=None)
def _m_plus_gamma(n: int) -> TracePolynomial:
    if n == 0:
        return TracePolynomial.one()
    total = TracePolynomial.zero()
    for k in range(n):
        total = total + _m_plus_gamma(k) * _m_plus_gamma(n - 1 - k).gamma('GAMMA')
    return total


def m_plus(n: int, route: str = 'RECURSION', cap: Optional[int] = None) -> TracePolynomial:
    """
    Non-crossing part of E(H^{2n}):
    M+_n = sum_{k+l=n-1} [M+_k P + Tr(M+_k P) I] M+_l P, M+_0 = I.
    route='GAMMA' uses the equivalent sum of M+_k Gamma(M+_l); route='WICK'
    sums the Wick oracle over non-crossing pair-free partitions (cap overrides
    the configured Wick cap).
    """
    _check_recursion_cap(n)
    route = route.upper()
    if route == 'RECURSION':
        return _m_plus(n)
    if route == 'GAMMA':
        return _m_plus_gamma(n)
    if route == 'WICK':
        return moment_class(2 * n, n, 'Q_PLUS', centered=True, cap=cap)
    raise BadInputError(f"unknown route {route} for m_plus")


@lru_cache(maxsize=None)
def _sigma_recursion(n: int) -> TracePolynomial:
    if n == 0:
        return TracePolynomial.one()
    total = TracePolynomial.zero()
    for k in range(n):
        total = total + _sigma_recursion(k).mul_P().trace() * _sigma_recursion(n - 1 - k).mul_P()
    return total


@lru_cache(maxsize=None)
def _sigma_closed_form(n: int) -> TracePolynomial:
    if n == 0:
        return TracePolynomial.one()
    total = TracePolynomial.zero()
    for p in enumerate_partitions(n, None, 'NC'):
        first = len(p.blocks[0])
        mu = partition_type(p).counts()
        traces = {1 + i: c for i, c in mu.items()}
        traces[1] = traces.get(1, 0) + (n - p.m)
        traces[first + 1] -= 1
        traces[1] = traces.get(1, 0) + 1
        total = total + TracePolynomial.monomial(1, traces, first)
    return total


def sigma(n: int, route: str = 'RECURSION') -> TracePolynomial:
    """Leading trace polynomial Sigma_n of E(H^{2n}), by recursion or by the non-crossing sum"""
    _check_recursion_cap(n)
    route = route.upper()
    if route == 'RECURSION':
        return _sigma_recursion(n)
    if route == 'CLOSED_FORM':
        return _sigma_closed_form(n)
    raise BadInputError(f"unknown route {route} for sigma")


def sigma_trace(n: int) -> Tuple[TracePolynomial, List[Dict[str, Any]]]:
    """
    Multinomial trace formula 2 sum_mu n!/prod(mu_i!) prod Tr(P^i)^{mu_i} over
    mu with sum mu_i = n+1 and sum i mu_i = 2n. Returns the scalar polynomial
    and the mu-indexed coefficient table.
    """
    if n < 1:
        raise BadInputError(f"n must be at least 1, got {n}")
    if n > 10:
        raise CapExceededError("sigma_trace n", n, 10)
    total = TracePolynomial.zero()
    table = []
    for mu in _weighted_compositions(n):
        coeff = Fraction(2 * factorial(n), prod(factorial(c) for c in mu.values()))
        total = total + TracePolynomial.monomial(coeff, mu, 0)
        table.append({'mu': dict(sorted(mu.items())), 'coefficient': coeff})
    table.sort(key=lambda row: sorted(row['mu'].items()))
    return total, table


def _weighted_compositions(n: int) -> List[Dict[int, int]]:
    """All mu (i -> mu_i, i = 1..n) with sum mu_i = n+1 and sum i mu_i = 2n"""
    results = []

    def extend(i: int, count: int, weight: int, current: Dict[int, int]):
        if i > n:
            if count == n + 1 and weight == 2 * n:
                results.append(dict(current))
            return
        for c in range(0, n + 2 - count):
            if weight + i * c > 2 * n:
                break
            if c:
                current[i] = c
            extend(i + 1, count + c, weight + i * c, current)
            current.pop(i, None)

    extend(1, 0, 0, {})
    return results


@lru_cache(maxsize=None)
def _sigma_circ_recursion(n: int, m: int) -> TracePolynomial:
    if n == 0:
        return TracePolynomial.one() if m == 0 else TracePolynomial.zero()
    if m == 0 or m > n:
        return TracePolynomial.zero()
    # shift to the (n+1, m+1) form of the recursion
    n0, m0 = n - 1, m - 1
    total = _sigma_circ_recursion(n0, m0).mul_P()
    for n2 in range(1, n0 + 1):
        n1 = n0 - n2
        for m2 in range(0, n2 + 1):
            m1 = m0 + 1 - m2
            if m1 < 0 or m1 > n1:
                continue
            head = _sigma_circ_recursion(n1, m1)
            tail = _sigma_circ_recursion(n2, m2)
            if head.is_zero() or tail.is_zero():
                continue
            total = total + head * tail.trace().mul_P()
    return total


@lru_cache(maxsize=None)
def _sigma_circ_closed_form(n: int, m: int) -> TracePolynomial:
    if n == 0:
        return TracePolynomial.one() if m == 0 else TracePolynomial.zero()
    total = TracePolynomial.zero()
    if m == 0:
        return total
    for p in enumerate_partitions(n, m, 'NC'):
        visible = iota(p)
        traces = partition_type(kreweras(p)).counts()
        term = TracePolynomial.monomial(1, traces, visible).divide_trace(visible)
        total = total + term
    return total


def sigma_circ(n: int, m: int, route: str = 'RECURSION') -> TracePolynomial:
    """
    Leading part of the covariance moment polynomials. The recursion is
    S(n+1, m+1) = S(n, m) P + sum S(n1, m1) Tr(S(n2, m2)) P over n1+n2 = n,
    m1+m2 = m+1, n2 >= 1; the closed form sums prod Tr(P^i)^{r_i(K(p))}
    P^iota / Tr(P^iota) over non-crossing p with K the Kreweras complement.
    """
    _check_recursion_cap(n)
    if m < 0 or m > n:
        raise BadInputError(f"need 0 <= m <= n, got ({n}, {m})")
    route = route.upper()
    if route == 'RECURSION':
        return _sigma_circ_recursion(n, m)
    if route == 'CLOSED_FORM':
        return _sigma_circ_closed_form(n, m)
    raise BadInputError(f"unknown route {route} for sigma_circ")


# finite-N moments

@lru_cache(maxsize=None)
def m_nm(n: int, m: int) -> TracePolynomial:
    """M_{n,m}: centered partition moments summed over pair-free partitions with m blocks"""
    return moment_class(n, m, 'Q_ALL', centered=True)


@lru_cache(maxsize=None)
def m_circ_nm(n: int, m: int) -> TracePolynomial:
    """M°_{n,m}: uncentered partition moments summed over all partitions with m blocks"""
    return moment_class(n, m, 'P_ALL', centered=False)


def _coefficient(m: int, l: int, convention: str) -> Fraction:
    if convention == 'falling':
        return Fraction(stirling1(m, l))
    if convention == 'binomial':
        return Fraction(stirling1(m, l), factorial(m))
    raise BadInputError(f"unknown convention {convention}, expected 'falling' or 'binomial'")


def d_nl(n: int, l: int, convention: str = 'falling') -> TracePolynomial:
    """Coefficient of N^l in N^{n/2} E(H_N^n): sum_m s(m, l) M_{n,m}"""
    total = TracePolynomial.zero()
    for m in range(l, n + 1):
        c = _coefficient(m, l, convention)
        if c:
            total = total + c * m_nm(n, m)
    return total


def d_circ_nl(n: int, l: int, convention: str = 'falling') -> TracePolynomial:
    """Coefficient of N^{l-n} in E(P_N^n): sum_m s(m, l) M°_{n,m}"""
    total = TracePolynomial.zero()
    for m in range(l, n + 1):
        c = _coefficient(m, l, convention)
        if c:
            total = total + c * m_circ_nm(n, m)
    return total


def hn_moment(n: int, convention: str = 'falling') -> NSeries:
    """
    E(H_N^n) = N^{-n/2} sum_m (N)_m M_{n,m}, returned as {exponent of N: polynomial}.
    Exponents are l - n/2 for l = 1..n.
    """
    if n < 0:
        raise BadInputError(f"n must be non-negative, got {n}")
    if n == 0:
        return {Fraction(0): TracePolynomial.one()}
    series: NSeries = {}
    for l in range(1, n + 1):
        coeff = d_nl(n, l, convention)
        if not coeff.is_zero():
            series[Fraction(l) - Fraction(n, 2)] = coeff
    return series


def pn_moment(n: int, centered: bool = False, convention: str = 'falling') -> NSeries:
    """
    E(P_N^n) = sum_l N^{l-n} d°_{n,l} (uncentered) or
    E((P_N - P)^n) = N^{-n/2} E(H_N^n) (centered), as {exponent of N: polynomial}.
    """
    if n < 0:
        raise BadInputError(f"n must be non-negative, got {n}")
    if n == 0:
        return {Fraction(0): TracePolynomial.one()}
    if centered:
        return {e - Fraction(n, 2): c for e, c in hn_moment(n, convention).items()}
    series: NSeries = {}
    for l in range(1, n + 1):
        coeff = d_circ_nl(n, l, convention)
        if not coeff.is_zero():
            series[Fraction(l - n)] = coeff
    return series


def series_at(series: NSeries, N: int) -> TracePolynomial:
    """Exact value at a given N; only for integer exponents or perfect-square N"""
    total = TracePolynomial.zero()
    for exponent, coeff in series.items():
        value = _rational_power(N, exponent)
        total = total + value * coeff
    return total


def _rational_power(N: int, exponent: Fraction) -> Fraction:
    if exponent.denominator == 1:
        return Fraction(N) ** int(exponent)
    root = int(round(N ** 0.5))
    if root * root != N:
        raise BadInputError(f"N={N} has no rational square root for exponent {exponent}")
    return Fraction(root) ** int(2 * exponent)


def series_numeric(series: NSeries, N: float, P: np.ndarray) -> np.ndarray:
    total = None
    for exponent, coeff in series.items():
        value = float(N) ** float(exponent) * coeff.eval_numeric(P)
        total = value if total is None else total + value
    return total


def series_pretty(series: NSeries) -> str:
    parts = []
    for exponent in sorted(series, reverse=True):
        tag = "" if exponent == 0 else f"N^({exponent}) * "
        parts.append(f"{tag}[{series[exponent].pretty()}]")
    return " + ".join(parts) if parts else "0"


@lru_cache(maxsize=None)
def _scaled_hk_moment(n: int, k: int) -> TracePolynomial:
    """k^{n/2} E(H_k^n) = E[(sum_{i<=k} (X_i - P))^n], by expanding over label words"""
    total = TracePolynomial.zero()
    seen: Dict[SetPartition, int] = {}
    for word in product(range(1, k + 1), repeat=n):
        p = from_alpha(word)
        seen[p] = seen.get(p, 0) + 1
    for p, multiplicity in seen.items():
        total = total + multiplicity * moment_partition(p, centered=True)
    return total


def inversion(n: int, m: int) -> TracePolynomial:
    """M_{n,m} = sum_{k<=m} (-1)^{m-k} k^{n/2}/(k!(m-k)!) E(H_k^n)"""
    if m < 1 or m > n:
        raise BadInputError(f"need 1 <= m <= n, got ({n}, {m})")
    total = TracePolynomial.zero()
    for k in range(1, m + 1):
        c = Fraction((-1) ** (m - k), factorial(k) * factorial(m - k))
        total = total + c * _scaled_hk_moment(n, k)
    return total


# isotropic values

def x_minus_i_power(n: int, form: str = 'BELL') -> RLaurent:
    """E((X - I)^n) at P = I as a multiple of I"""
    if n < 0:
        raise BadInputError(f"n must be non-negative, got {n}")
    r = RLaurent.r()
    sign = (-1) ** n
    tail = sign * (1 - RLaurent.r(-1))
    if form.upper() == 'BELL':
        args = [r - 1] + [2 ** (k - 1) * factorial(k - 1) * r for k in range(2, n + 1)]
        return RLaurent.r(-1) * bell_complete(n, args) + tail
    if form.upper() == 'BINOMIAL':
        total = RLaurent()
        for l in range(n + 1):
            rising = RLaurent.one()
            for j in range(l):
                rising = rising * (r + 2 * j)
            total = total + binom(n, l) * (-1) ** (n - l) * rising
        return RLaurent.r(-1) * total + tail
    raise BadInputError(f"unknown form {form}")


def x_power_iso(k: int) -> RLaurent:
    """E(X^k) at P = I: prod_{l<k} (r + 2l) / r"""
    value = RLaurent.one()
    for l in range(k):
        value = value * (RLaurent.r() + 2 * l)
    return value * RLaurent.r(-1) if k else value


def rank1_power(n: int) -> TracePolynomial:
    """E(X^n) = 2^{n-1}(n-1)! sum_{k<n} 2^{-k}/k! B_k(x) P^{n-k}, x_j = 2^{j-1}(j-1)! Tr(P^j)"""
    if n < 1:
        raise BadInputError(f"n must be at least 1, got {n}")
    args = [2 ** (j - 1) * factorial(j - 1) * TracePolynomial.tr(j) for j in range(1, n)]
    total = TracePolynomial.zero()
    for k in range(n):
        bell = bell_complete(k, args) if k else TracePolynomial.one()
        total = total + Fraction(1, 2 ** k * factorial(k)) * bell.mul_P(n - k)
    return 2 ** (n - 1) * factorial(n - 1) * total


def isotropic(kind: str, args: Dict[str, Any]):
    kind = kind.upper()
    if kind == 'M_PI_CIRC':
        p = _partition_arg(args)
        if is_crossing(p):
            raise BadInputError(f"isotropic factorization needs a non-crossing partition, got {p}")
        value = RLaurent.one()
        for block in p.blocks:
            value = value * x_power_iso(len(block))
        return value
    if kind == 'M_PI_CENTERED':
        p = _partition_arg(args)
        if is_crossing(p):
            raise BadInputError(f"isotropic factorization needs a non-crossing partition, got {p}")
        if any(len(b) == 1 for b in p.blocks):
            return RLaurent()
        value = RLaurent.one()
        for block in p.blocks:
            value = value * x_minus_i_power(len(block))
        return value
    if kind == 'X_MINUS_I_POWER':
        return x_minus_i_power(int(args['n']), args.get('form', 'BELL'))
    if kind == 'M_PLUS_I':
        n = int(args['n'])
        return catalan(n) * (1 + RLaurent.r()) ** n
    if kind == 'RANK1_POWER':
        return rank1_power(int(args['n']))
    raise BadInputError(f"unknown isotropic kind {kind}, expected one of {ISOTROPIC_KINDS}")


def _partition_arg(args: Dict[str, Any]) -> SetPartition:
    p = args.get('partition')
    if isinstance(p, SetPartition):
        return p
    if p is None:
        raise BadInputError("a partition argument is required")
    return SetPartition.from_json(p if not isinstance(p, str) else json.loads(p))


def pn_trace_iso(n: int, rho: Fraction) -> RLaurent:
    """r^{-1} Tr E(P_N^n) at P = I with N = r/rho, as a Laurent polynomial in r"""
    rho = Fraction(rho)
    if rho <= 0:
        raise BadInputError(f"rho must be positive, got {rho}")
    total = RLaurent()
    for exponent, coeff in pn_moment(n).items():
        e = int(exponent)
        total = total + coeff.eval_isotropic() * rho ** (-e) * RLaurent.r(e)
    return total


def pn_moment_iso(n: int, centered: bool = False) -> Dict[Fraction, RLaurent]:
    """E(P_N^n) (or E((P_N - I)^n)) at P = I as multiples of I, keyed by the exponent of N"""
    return {e: c.eval_isotropic() for e, c in pn_moment(n, centered).items()}


# alpha coefficients

def _u(u: Sequence[Fraction], i: int) -> Fraction:
    if i >= len(u):
        raise BadInputError(f"u({i}) needed but only {len(u)} values given")
    return Fraction(u[i])


def alpha_direct(n_max: int, u: Sequence[Fraction]) -> Dict[Tuple[int, int], Fraction]:
    """alpha_n(m) = u(0)/u(m) sum over p in NC(n) with |p_1| = m of prod_{i>=0} u(i)^{r_i(p)}, r_0 = n - |p|"""
    table = {(0, 0): Fraction(1)}
    for n in range(1, n_max + 1):
        table[(n, 0)] = Fraction(0)
        sums: Dict[int, Fraction] = {}
        for p in enumerate_partitions(n, None, 'NC'):
            first = len(p.blocks[0])
            weight = _u(u, 0) ** (n - p.m)
            for size, c in partition_type(p).counts().items():
                weight *= _u(u, size) ** c
            sums[first] = sums.get(first, 0) + weight
        for m in range(1, n + 1):
            if _u(u, m) == 0:
                raise BadInputError(f"u({m}) must be non-zero")
            table[(n, m)] = _u(u, 0) / _u(u, m) * sums.get(m, Fraction(0))
    return table


def alpha_convolution(n_max: int, u: Sequence[Fraction]) -> Dict[Tuple[int, int], Fraction]:
    """alpha_{n+1}(1) = sum_m u(m) alpha_n(m) and alpha_n(m) = sum over compositions of prod alpha_{k_i}(1)"""
    table = {(0, 0): Fraction(1)}
    for n in range(1, n_max + 1):
        table[(n, 0)] = Fraction(0)
        table[(n, 1)] = sum((_u(u, m) * table[(n - 1, m)] for m in range(0, n)), Fraction(0))
        for m in range(2, n + 1):
            # first part k, the rest a composition of n-k into m-1 parts
            table[(n, m)] = sum((table[(k, 1)] * table[(n - k, m - 1)] for k in range(1, n - m + 2)),
                                Fraction(0))
    return table


def alpha_from_sigma(n_max: int, u: Sequence[Fraction]) -> Dict[Tuple[int, int], Fraction]:
    """Coefficient of P^m in Sigma_n after substituting Tr(P^j) -> u(j-1)"""
    table = {(0, 0): Fraction(1)}
    values = {j: _u(u, j - 1) for j in range(1, n_max + 2)}
    for n in range(1, n_max + 1):
        coeffs = sigma(n).substitute_traces(values)
        for m in range(0, n + 1):
            table[(n, m)] = coeffs.get(m, Fraction(0))
    return table


def alpha_coeffs(n_max: int, u: Sequence[Fraction]) -> Dict[Tuple[int, int], Fraction]:
    """alpha_n(m) for n <= n_max, computed three ways; raises CheckFailedError on disagreement"""
    if n_max < 0 or n_max > 9:
        raise CapExceededError("alpha n_max", n_max, 9)
    direct = alpha_direct(n_max, u)
    convolution = alpha_convolution(n_max, u)
    if direct != convolution:
        raise CheckFailedError("alpha coefficients: partition sum and convolution disagree")
    if n_max <= CONFIG['recursion_cap']:
        if direct != alpha_from_sigma(n_max, u):
            raise CheckFailedError("alpha coefficients: partition sum and Sigma coefficients disagree")
    return direct


def alpha_table_frame(table: Dict[Tuple[int, int], Fraction]) -> pd.DataFrame:
    rows = [{'n': n, 'm': m, 'alpha': str(v)} for (n, m), v in sorted(table.items())]
    return pd.DataFrame(rows, columns=['n', 'm', 'alpha'])


def norm_estimates(P: np.ndarray, n: int, m: int) -> Dict[str, float]:
    """Frobenius norm of M_{n,m}(P) against its combinatorial bound"""
    P = np.asarray(P, dtype=float)
    value = float(np.linalg.norm(m_nm(n, m).eval_numeric(P)))
    tr1 = float(np.trace(P))
    tr2 = float(np.trace(P @ P))
    bound = factorial(n) / factorial(m) * 2.0 ** (3 * n - (2 * m + 1)) * tr1 ** n
    if n == 2 * m:
        v = factorial(n) / (2 ** m * factorial(m))
        bound = min(bound, v * (tr2 + tr1 ** 2) ** m)
    return {'norm': value, 'bound': bound, 'holds': value <= bound * (1 + 1e-12)}


class MomentTables:
    """Write the coefficient tables (sigma, alpha, finite-N) for a range of n"""

    def __init__(self, n_max: int = 5, output_dir: str = "generated/moments"):
        self.n_max = n_max
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def sigma_frame(self) -> pd.DataFrame:
        rows = []
        for n in range(1, self.n_max + 1):
            _, table = sigma_trace(n)
            for row in table:
                mu = " ".join(f"{i}:{c}" for i, c in row['mu'].items())
                rows.append({'n': n, 'mu': mu, 'coefficient': str(row['coefficient'])})
        return pd.DataFrame(rows, columns=['n', 'mu', 'coefficient'])

    def finite_n_frame(self) -> pd.DataFrame:
        rows = []
        for n in range(1, min(self.n_max, 4) + 1):
            for exponent, coeff in sorted(hn_moment(n).items(), reverse=True):
                rows.append({'n': n, 'N_exponent': str(exponent), 'coefficient': coeff.pretty()})
        return pd.DataFrame(rows, columns=['n', 'N_exponent', 'coefficient'])

    def generate(self) -> Dict[str, int]:
        stats = {'n_max': self.n_max}
        sigma_df = self.sigma_frame()
        sigma_df.to_csv(self.output_dir / "sigma_coefficients.csv", index=False)
        stats['sigma_rows'] = len(sigma_df)

        alpha_df = alpha_table_frame(alpha_coeffs(self.n_max, [1] * (self.n_max + 2)))
        alpha_df.to_csv(self.output_dir / "alpha_catalan.csv", index=False)
        stats['alpha_rows'] = len(alpha_df)

        finite_df = self.finite_n_frame()
        finite_df.to_csv(self.output_dir / "finite_n_moments.csv", index=False)
        stats['finite_n_rows'] = len(finite_df)

        with open(self.output_dir / "moment_tables_stats.json", 'w', encoding='utf-8') as f:
            json.dump(stats, f, indent=2)
        logger.info(f"Moment tables written to {self.output_dir}")
        return stats


def main():
    import argparse

    parser = argparse.ArgumentParser(description="Write Wishart moment coefficient tables")
    parser.add_argument('--n-max', type=int, default=5, help='Largest moment order')
    parser.add_argument('--output-dir', default='generated/moments', help='Output directory')
    args = parser.parse_args()

    tables = MomentTables(args.n_max, args.output_dir)
    stats = tables.generate()

    print(f"\n=== Moment Tables Complete ===")
    print(f"Sigma coefficient rows: {stats['sigma_rows']}")
    print(f"Alpha rows: {stats['alpha_rows']}")
    print(f"Finite-N rows: {stats['finite_n_rows']}")
    print(f"Output directory: {args.output_dir}")


if __name__ == "__main__":
    main()
