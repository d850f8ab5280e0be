#!/usr/bin/env python3
"""
Laplace transforms and concentration bounds

Evaluates the Laplace-transform formulas and concentration thresholds for
Wishart fluctuations and checks them against exact oracles (closed forms,
series, quadrature) or against Monte Carlo coverage experiments. Every
evaluator refuses inputs outside its stated domain with a HypothesisError
naming the violated condition.
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from math import comb, e, exp, factorial, log, pi, sqrt
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import integrate, optimize

from pipelines.moments import hn_moment, series_numeric
from utils.config import CONFIG
from utils.errors import BadInputError, CapExceededError, HypothesisError
from utils.sampling import (RngSpec, check_symmetric, event_frequency, eigenvalues, run_trials,
                            sample_h, sample_hn, sample_wishart, sqrt_psd)
from utils.specnum import bell_complete
from utils.wick import moment_H

logger = logging.getLogger(__name__)

LAPLACE_KINDS = ('RANK1_EXACT', 'RANK1_ISO', 'H_SERIES', 'TRACE_AH', 'CHI_SQ', 'TRACE_AHN')
LEGENDRE_KINDS = ('L', 'LSTAR', 'LSTAR_INV', 'CRAMER_THRESHOLD')
THRESHOLD_KINDS = ('TRACE_TWO_SIDED', 'TRACE_POS', 'TRACE_NEG', 'OPNORM', 'EIGEN_SUP', 'LAMBDA1', 'MOMENT_TAIL',
                   'TRACE_H', 'TRACE_PN', 'LAMBDA1_H')

LOEWNER_SLACK = 1e-8
SERIES_RATIO = 1e-16
GAUSS_HERMITE_NODES = 40
GAUSS_HERMITE_CAP = 300000


@dataclass
class BoundReport:
    name: str
    hypothesis_satisfied: bool
    bound: float
    empirical: float
    margin: float
    holds: bool
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)


def _report(name: str, lhs: float, rhs: float, slack: float = 0.0, **detail) -> BoundReport:
    margin = float(rhs) - float(lhs)
    return BoundReport(name, True, float(rhs), float(lhs), margin, margin >= -slack, detail)


def _require(condition: bool, text: str, detail: str = ""):
    if not condition:
        raise HypothesisError(text, detail)


# matrix functions

def sym_fun(A: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """f applied to a symmetric matrix (or a stack of them) through its eigendecomposition"""
    values, vectors = np.linalg.eigh(A)
    return np.einsum('...ij,...j,...kj->...ik', vectors, f(values), vectors)


def sym_exp(A: np.ndarray) -> np.ndarray:
    return sym_fun(A, np.exp)


def sym_log(A: np.ndarray) -> np.ndarray:
    values = np.linalg.eigvalsh(A)
    if values.min() <= 0:
        raise BadInputError("matrix logarithm needs a positive definite argument")
    return sym_fun(A, np.log)


def loewner_gap(lower: np.ndarray, upper: np.ndarray) -> float:
    """Smallest eigenvalue of upper - lower (non-negative when lower <= upper)"""
    gap = upper - lower
    return float(np.linalg.eigvalsh((gap + gap.T) / 2.0).min())


def lambda1(A: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(A).max())


def is_psd(A: np.ndarray, slack: float = 1e-12) -> bool:
    return float(np.linalg.eigvalsh(A).min()) >= -slack


# moment estimates

def eps_v(n: int, N: int) -> Tuple[float, float]:
    """
    eps_n(N) = N^{-(n/2 - [n/2])} sum_{1<=m<=[n/2] ^ N} (4/N)^{[n/2]-m} [n/2]!/m!
    and v_n = n!/(2^{[n/2]} [n/2]!).
    """
    if n < 1 or N < 1:
        raise BadInputError(f"need n, N >= 1, got n={n}, N={N}")
    eps, v = eps_v_exact(n, N)
    scale = 1.0 if n % 2 == 0 else 1.0 / sqrt(N)
    return float(eps) * scale, float(v)


def eps_v_exact(n: int, N: int) -> Tuple[Fraction, Fraction]:
    """The rational part of eps_n(N) (without N^{-1/2} for odd n) and v_n"""
    half = n // 2
    total = Fraction(0)
    for m in range(1, min(half, N) + 1):
        total += Fraction(4, N) ** (half - m) * Fraction(factorial(half), factorial(m))
    return total, Fraction(factorial(n), 2 ** half * factorial(half))


def frobenius_h2(P: np.ndarray) -> float:
    """E(||H||_F^2) = Tr(P^2) + Tr(P)^2"""
    return float(np.trace(P @ P) + np.trace(P) ** 2)


def moment_norm_check(P: np.ndarray, n: int, N: int) -> List[BoundReport]:
    """
    ||E(H_N^n)||_F <= v_n 2^{3n-1-[n/2]} Tr(P)^n eps_n(N) and, for even n = 2k with N >= k,
    the trace and Frobenius comparisons of E(H_N^{2k}) with E(H^{2k}).
    """
    P = check_symmetric(P, "P")
    if n < 1:
        raise BadInputError(f"n must be at least 1, got {n}")
    trace = float(np.trace(P))
    eps, v = eps_v(n, N)
    expected_n = series_numeric(hn_moment(n), N, P)
    lhs = float(np.linalg.norm(expected_n))
    rhs = v * 2.0 ** (3 * n - 1 - n // 2) * trace ** n * eps
    reports = [_report('moment_norm', lhs, rhs, 1e-9, n=n, N=N)]

    if n % 2 == 0:
        k = n // 2
        _require(N >= k, "N >= n for the trace and Frobenius comparisons", f"N={N}, n={k}")
        eps2, v2 = eps_v(2 * k, N)
        limit = moment_H(2 * k).eval_numeric(P)
        r = P.shape[0]
        lhs3 = float(np.trace(expected_n))
        rhs3 = float(np.trace(limit)) + sqrt(r) * 2.0 ** (12 * k - 1) * v2 * trace ** (2 * k) * (eps2 - 1.0)
        reports.append(_report('trace_comparison', lhs3, rhs3, 1e-9, n=k, N=N))
        lhs4 = N * float(np.linalg.norm(expected_n - limit))
        rhs4 = (k - 1) ** 2 * v2 * frobenius_h2(P) ** k + 2.0 ** (6 * k - 1) * v2 * trace ** (2 * k) * eps2
        reports.append(_report('frobenius_comparison', lhs4, rhs4, 1e-9, n=k, N=N))
    return reports


def gaussian_moment_norm_check(P: np.ndarray, n: int) -> BoundReport:
    """||E(H^{2n})||_F <= v_{2n} [Tr(P^2) + Tr(P)^2]^n"""
    P = check_symmetric(P, "P")
    lhs = float(np.linalg.norm(moment_H(2 * n).eval_numeric(P)))
    _, v = eps_v(2 * n, 1)
    return _report('gaussian_moment_norm', lhs, v * frobenius_h2(P) ** n, 1e-9, n=n)


# Laplace transforms

def rank1_iso(t: float, r: int) -> float:
    """E(exp[tX]) at P = I_r as a multiple of I: 1 + ((1-2t)^{-r/2} - 1)/r"""
    _require(1.0 - 2.0 * t > 0.0, "I - 2tP invertible with 1 - 2t > 0", f"t={t}")
    if r < 1:
        raise BadInputError(f"r must be at least 1, got {r}")
    return 1.0 + ((1.0 - 2.0 * t) ** (-r / 2.0) - 1.0) / r


def _rank1_domain(values: np.ndarray, t: float):
    _require(float(np.min(1.0 - 2.0 * t * values)) > 0.0, "I - 2sP positive definite for s between 0 and t",
             f"t={t}, lambda_1={values.max():.6g}")


def rank1_exact(P: np.ndarray, t: float) -> np.ndarray:
    """E(exp[tX]) = I + int_0^t det(I - 2sP)^{-1/2} (I - 2sP)^{-1} P ds, by adaptive quadrature"""
    P = check_symmetric(P, "P")
    values, vectors = np.linalg.eigh(P)
    _rank1_domain(values, t)

    def integrand(s: float) -> np.ndarray:
        shrink = 1.0 - 2.0 * s * values
        return np.prod(shrink) ** -0.5 * values / shrink

    if t == 0:
        return np.eye(P.shape[0])
    diagonal, _ = integrate.quad_vec(integrand, 0.0, t, epsabs=1e-13, epsrel=1e-12)
    return (vectors * (1.0 + diagonal)) @ vectors.T


def centered_rank1_laplace(P: np.ndarray, t: float, nodes: int = GAUSS_HERMITE_NODES) -> np.ndarray:
    """
    E(exp[t(X - P)]) by tensor Gauss-Hermite quadrature. The Gaussian factor
    exp(t|x|^2) is absorbed into the sampling law, leaving a bounded integrand.
    """
    P = check_symmetric(P, "P")
    dim = P.shape[0]
    values = np.linalg.eigvalsh(P)
    _rank1_domain(values, t)
    if nodes ** dim > GAUSS_HERMITE_CAP:
        raise CapExceededError("Gauss-Hermite grid", nodes ** dim, GAUSS_HERMITE_CAP)
    L = np.linalg.cholesky(P)
    S = L.T @ L
    precision = np.eye(dim) - 2.0 * t * S
    normalizer = np.linalg.det(precision) ** -0.5
    root = sqrt_psd(np.linalg.inv(precision))

    y, w = np.polynomial.hermite_e.hermegauss(nodes)
    w = w / sqrt(2.0 * pi)
    grid = np.array(list(product(range(nodes), repeat=dim)))
    points = y[grid] @ root.T
    weights = np.prod(w[grid], axis=1)
    x = points @ L.T
    outer = x[:, :, None] * x[:, None, :]
    norms = np.einsum('gi,gi->g', x, x)
    exponent = t * (outer - P) - t * norms[:, None, None] * np.eye(dim)
    values_exp = sym_exp(exponent)
    return normalizer * np.einsum('g,gij->ij', weights, values_exp)


def h_series(P: np.ndarray, t: float, m: int) -> Dict[str, Any]:
    """
    sum_{n<=m} t^{2n}/(2n)! E(H^{2n}) with the Frobenius remainder bound
    exp(t^2 F/2) (e t^2 F/(2(m+1)))^{m+1} / sqrt(2 pi (m+1)), F = E||H||_F^2.
    """
    P = check_symmetric(P, "P")
    if m < 0:
        raise BadInputError(f"m must be non-negative, got {m}")
    if 2 * m > CONFIG['h_cap']:
        raise CapExceededError("H_SERIES order 2m", 2 * m, CONFIG['h_cap'])
    total = np.eye(P.shape[0])
    for n in range(1, m + 1):
        total = total + t ** (2 * n) / factorial(2 * n) * moment_H(2 * n).eval_numeric(P)
    F = frobenius_h2(P)
    remainder = exp(t * t * F / 2.0) / sqrt(2.0 * pi * (m + 1)) * (e * t * t * F / (2.0 * (m + 1))) ** (m + 1)
    return {'value': total, 'remainder_bound': remainder, 'log_norm_bound': t * t * F / 2.0}


def trace_ah(A: np.ndarray, P: np.ndarray, t: float) -> float:
    """log E exp(t Tr(AH)) = t^2 Tr((AP)^2)"""
    AP = A @ P
    return float(t * t * np.trace(AP @ AP))


def chi_sq(P: np.ndarray, t: float) -> float:
    """log E exp(t ||H||_F^2) = -1/2 sum_{i<=j} log(1 - 4t lambda_i lambda_j)"""
    values = np.linalg.eigvalsh(check_symmetric(P, "P"))
    products = np.outer(values, values)[np.triu_indices(len(values))]
    _require(float(np.max(4.0 * t * products)) < 1.0, "4t lambda_1(P)^2 < 1", f"t={t}")
    return float(-0.5 * np.sum(np.log1p(-4.0 * t * products)))


def chi_sq_series(P: np.ndarray, t: float, terms: int = 200) -> float:
    """1/4 sum_n (4t)^n/n [Tr(P^n)^2 + Tr(P^{2n})]"""
    values = np.linalg.eigvalsh(check_symmetric(P, "P"))
    _require(float(4.0 * abs(t) * values.max() ** 2) < 1.0, "4|t| lambda_1(P)^2 < 1", f"t={t}")
    total = 0.0
    for n in range(1, terms + 1):
        term = (4.0 * t) ** n / n * (np.sum(values ** n) ** 2 + np.sum(values ** (2 * n))) / 4.0
        total += term
        if abs(term) < SERIES_RATIO * abs(total):
            break
    return float(total)


def _ap_spectrum(A: np.ndarray, P: np.ndarray) -> np.ndarray:
    root = sqrt_psd(P)
    return np.linalg.eigvalsh(root @ A @ root)


def trace_ahn(A: np.ndarray, P: np.ndarray, N: int, t: float) -> float:
    """log E exp(t Tr(A H_N)) = N [-1/2 sum log(1 - 2s mu_k) - s sum mu_k], s = t/sqrt(N), mu = spec(AP)"""
    A = check_symmetric(A, "A")
    P = check_symmetric(P, "P")
    mu = _ap_spectrum(A, P)
    s = t / sqrt(N)
    _require(float(np.max(2.0 * s * mu)) < 1.0, "2 t lambda_1(AP) < sqrt(N)", f"t={t}, N={N}")
    return float(N * (-0.5 * np.sum(np.log1p(-2.0 * s * mu)) - s * np.sum(mu)))


def trace_ahn_series(A: np.ndarray, P: np.ndarray, N: int, t: float, max_terms: int = 10000) -> Dict[str, float]:
    """
    t^2 Tr((AP)^2) + t^2 sum_{n>=1} t^n/(n+2) 2^{n+1}/N^{n/2} Tr((AP)^{n+2}), truncated
    once the term ratio falls below 1e-16; the geometric tail certificate is reported.
    """
    A = check_symmetric(A, "A")
    P = check_symmetric(P, "P")
    AP = A @ P
    frob = float(np.linalg.norm(AP))
    _require(2.0 * abs(t) * frob < sqrt(N), "2|t| ||AP||_F < sqrt(N)", f"t={t}, N={N}")
    mu = _ap_spectrum(A, P)
    ratio = 2.0 * abs(t) * float(np.max(np.abs(mu))) / sqrt(N)
    total = t * t * float(np.sum(mu ** 2))
    term = 0.0
    for n in range(1, max_terms + 1):
        term = t * t * t ** n / (n + 2) * 2.0 ** (n + 1) / N ** (n / 2.0) * float(np.sum(mu ** (n + 2)))
        total += term
        if abs(term) <= SERIES_RATIO * abs(total) or term == 0.0:
            break
    tail = abs(term) * ratio / (1.0 - ratio) if ratio < 1.0 else float('inf')
    return {'value': total, 'tail_bound': tail, 'terms': n}


def laplace(kind: str, args: Dict[str, Any]):
    """Dispatch a Laplace-transform formula by kind"""
    kind = kind.upper()
    try:
        if kind == 'RANK1_EXACT':
            return rank1_exact(args['P'], float(args['t']))
        if kind == 'RANK1_ISO':
            return rank1_iso(float(args['t']), int(args['r']))
        if kind == 'H_SERIES':
            return h_series(args['P'], float(args['t']), int(args.get('m', 4)))
        if kind == 'TRACE_AH':
            return trace_ah(args['A'], args['P'], float(args['t']))
        if kind == 'CHI_SQ':
            return chi_sq(args['P'], float(args['t']))
        if kind == 'TRACE_AHN':
            return trace_ahn(args['A'], args['P'], int(args['N']), float(args['t']))
    except KeyError as e:
        raise BadInputError(f"missing argument {e} for {kind}")
    raise BadInputError(f"unknown Laplace kind {kind}, expected one of {LAPLACE_KINDS}")


# Legendre transforms

def L(t: float) -> float:
    _require(0.0 <= t < 1.0, "0 <= t < 1", f"t={t}")
    return t * t / (1.0 - t)


def L_star(u: float) -> float:
    _require(u >= 0.0, "u >= 0", f"u={u}")
    return (sqrt(u + 1.0) - 1.0) ** 2


def L_star_inv(u: float) -> float:
    _require(u >= 0.0, "u >= 0", f"u={u}")
    return u + 2.0 * sqrt(u)


def L_star_numeric(u: float) -> float:
    """sup_{0<=t<1} (ut - L(t)) by bounded scalar minimization"""
    _require(u >= 0.0, "u >= 0", f"u={u}")
    result = optimize.minimize_scalar(lambda t: -(u * t - t * t / (1.0 - t)), bounds=(0.0, 1.0 - 1e-12),
                                      method='bounded', options={'xatol': 1e-12})
    return float(-result.fun)


def legendre(kind: str, args: Dict[str, Any]) -> float:
    kind = kind.upper()
    try:
        if kind == 'L':
            return L(float(args['t']))
        if kind == 'LSTAR':
            return L_star(float(args['u']))
        if kind == 'LSTAR_INV':
            return L_star_inv(float(args['u']))
        if kind == 'CRAMER_THRESHOLD':
            return L_star_inv(float(args['delta']))
    except KeyError as e:
        raise BadInputError(f"missing argument {e} for {kind}")
    raise BadInputError(f"unknown Legendre kind {kind}, expected one of {LEGENDRE_KINDS}")


# matrix Laplace inequalities

def cubic_weight(Q: np.ndarray) -> np.ndarray:
    return Q @ (np.eye(Q.shape[0]) / 5.0 + 5.0 * Q / 24.0 + Q @ Q)


def cubic_weight_upper(Q: np.ndarray) -> np.ndarray:
    return Q @ (np.eye(Q.shape[0]) / 5.0 + Q / 3.0 + Q @ Q)


def cubic_weight_top(Q: np.ndarray) -> float:
    return lambda1(cubic_weight(Q))


def matrix_laplace_ineq(P: np.ndarray, t: float, nodes: int = GAUSS_HERMITE_NODES) -> List[BoundReport]:
    """
    Loewner-order checks, for 0 <= 2t Tr(P) < 1:
      I <= E(exp[tX]) exp[-tP] <= exp[L(2t Tr P) cubic_weight_upper(P/Tr P)]
      I <= E(exp[t(X - P)]) <= exp[L(2t Tr P) cubic_weight(P/Tr P)]
    and their logarithmic forms.
    """
    P = check_symmetric(P, "P")
    trace = float(np.trace(P))
    _require(t >= 0.0 and 2.0 * t * trace < 1.0, "0 <= 2t Tr(P) < 1", f"t={t}, Tr(P)={trace:.6g}")
    dim = P.shape[0]
    identity = np.eye(dim)
    Q = P / trace
    scale = L(2.0 * t * trace)

    uncentered = rank1_exact(P, t) @ sym_exp(-t * P)
    uncentered = (uncentered + uncentered.T) / 2.0
    centered = centered_rank1_laplace(P, t, nodes)
    upper1 = sym_exp(scale * cubic_weight_upper(Q))
    upper = sym_exp(scale * cubic_weight(Q))

    reports = []
    for name, middle, top, top_log in (('uncentered_laplace', uncentered, upper1, scale * cubic_weight_upper(Q)),
                                       ('centered_laplace', centered, upper, scale * cubic_weight(Q))):
        low = loewner_gap(identity, middle)
        high = loewner_gap(middle, top)
        reports.append(BoundReport(name, True, float(lambda1(top)), float(lambda1(middle)),
                                   min(low, high), min(low, high) >= -LOEWNER_SLACK,
                                   {'lower_gap': low, 'upper_gap': high, 't': t}))
        log_middle = sym_log(middle)
        low = loewner_gap(np.zeros((dim, dim)), log_middle)
        high = loewner_gap(log_middle, top_log)
        reports.append(BoundReport(f"log_{name}", True, float(lambda1(top_log)), float(lambda1(log_middle)),
                                   min(low, high), min(low, high) >= -LOEWNER_SLACK,
                                   {'lower_gap': low, 'upper_gap': high, 't': t}))
    return reports


def cubic_weight_order_check(Q: np.ndarray) -> BoundReport:
    """cubic_weight(Q) <= cubic_weight_upper(Q) in Loewner order"""
    gap = loewner_gap(cubic_weight(Q), cubic_weight_upper(Q))
    return BoundReport('cubic_weight_order', True, 0.0, -gap, gap, gap >= -LOEWNER_SLACK)


# concentration thresholds

def _frob_sq(M: np.ndarray) -> float:
    return float(np.sum(M * M))


def concentration_threshold(kind: str, args: Dict[str, Any]) -> float:
    """
    Threshold value of a concentration event holding with probability at
    least 1 - exp(-delta). For TRACE_NEG the event is Tr(A H_N) >= -value.
    """
    kind = kind.upper()
    if kind not in THRESHOLD_KINDS:
        raise BadInputError(f"unknown threshold kind {kind}, expected one of {THRESHOLD_KINDS}")
    delta = float(args.get('delta', 0.0))
    _require(delta >= 0.0, "delta >= 0", f"delta={delta}")

    if kind == 'MOMENT_TAIL':
        if 'z' in args:
            z = float(args['z'])
        elif 'y' in args:
            z = float(args['y']) / e
        else:
            raise BadInputError("MOMENT_TAIL needs z or y")
        _require(z > 0, "z > 0", f"z={z}")
        return z * e * e / sqrt(2.0) * (0.5 + delta + sqrt(delta))

    P = check_symmetric(args['P'], "P")
    r = P.shape[0]
    N = int(args.get('N', 0))
    top = lambda1(P)

    if kind == 'OPNORM':
        _require(N / 8.0 >= delta + 7 * r, "N/8 >= delta + 7r", f"N={N}, delta={delta}, r={r}")
        return 5.0 * sqrt(3.0) * sqrt(delta + 7 * r) * top
    if kind == 'EIGEN_SUP':
        _require(N / 8.0 >= delta + 7 * r, "N/8 >= delta + 7r", f"N={N}, delta={delta}, r={r}")
        return 5.0 * sqrt(3.0) * sqrt((delta + 7 * r) / N) * top
    if kind in ('LAMBDA1', 'LAMBDA1_H'):
        _require(N >= 1, "N >= 1", f"N={N}")
        trace = float(np.trace(P))
        spread = cubic_weight_top(P / trace)
        level = delta + log(r)
        if kind == 'LAMBDA1_H':
            return 2.0 * trace * (level / sqrt(N) + 2.0 * sqrt(level * spread))
        return top + 2.0 * trace * (level / N + 2.0 * sqrt(level / N * spread))

    A = check_symmetric(args['A'], "A")
    AP = A @ P
    tr_ap2 = float(np.trace(AP @ AP))
    if kind == 'TRACE_H':
        return 2.0 * sqrt(delta * tr_ap2)
    if kind == 'TRACE_TWO_SIDED':
        _require(8.0 * delta <= N, "0 <= 8 delta <= N", f"delta={delta}, N={N}")
        return 2.0 * sqrt((delta + 1.0) * (tr_ap2 + 2.0 * _frob_sq(AP)))
    _require(is_psd(A), "A >= 0")
    tr_ap = float(np.trace(AP))
    if kind == 'TRACE_POS':
        _require(8.0 * delta <= N, "0 <= 8 delta <= N", f"delta={delta}, N={N}")
        return 2.0 * sqrt(3.0) * sqrt(delta * tr_ap2)
    if kind == 'TRACE_NEG':
        _require(tr_ap > 0, "Tr(AP) > 0")
        _require(4.0 * delta <= N * tr_ap2 / tr_ap ** 2, "0 <= 4 delta <= N Tr((AP)^2)/Tr(AP)^2",
                 f"delta={delta}, N={N}")
        return 2.0 * sqrt(delta * tr_ap2)
    # TRACE_PN
    _require(tr_ap > 0, "Tr(AP) > 0")
    _require(4.0 * delta <= N * min(0.5, tr_ap2 / tr_ap ** 2), "0 <= 4 delta <= N [1/2 ^ Tr((AP)^2)/Tr(AP)^2]",
             f"delta={delta}, N={N}")
    return 2.0 * sqrt((delta + 1.0) / N * (2.0 * tr_ap ** 2 + tr_ap2))


def _coverage_event(kind: str, args: Dict[str, Any], threshold: float) -> Callable[[np.random.Generator], bool]:
    P = check_symmetric(args['P'], "P")
    N = int(args.get('N', 1))
    A = np.asarray(args['A'], dtype=float) if 'A' in args else None
    root = sqrt_psd(P) if kind == 'TRACE_H' else None
    reference = eigenvalues(P)

    def event(gen: np.random.Generator) -> bool:
        if kind == 'TRACE_H':
            return float(np.trace(A @ sample_h(P, gen, root))) <= threshold
        if kind in ('TRACE_PN', 'EIGEN_SUP', 'LAMBDA1'):
            PN = sample_wishart(P, N, 'PLAIN', gen)
            if kind == 'TRACE_PN':
                return abs(float(np.trace(A @ PN) - np.trace(A @ P))) <= threshold
            if kind == 'EIGEN_SUP':
                return float(np.max(np.abs(eigenvalues(PN) - reference))) <= threshold
            return float(eigenvalues(PN)[0]) <= threshold
        H = sample_hn(P, N, gen)
        if kind == 'TRACE_TWO_SIDED':
            return abs(float(np.trace(A @ H))) <= threshold
        if kind == 'TRACE_POS':
            return float(np.trace(A @ H)) <= threshold
        if kind == 'TRACE_NEG':
            return float(np.trace(A @ H)) >= -threshold
        if kind == 'OPNORM':
            return float(np.max(np.abs(eigenvalues(H)))) <= threshold
        return float(eigenvalues(H)[0]) <= threshold

    return event


def coverage_experiment(kind: str, args: Dict[str, Any], trials: int, rng: Optional[RngSpec] = None,
                        workers: Optional[int] = None) -> BoundReport:
    """
    Empirical coverage of a concentration event: passes when the observed
    frequency plus the Wilson half-width reaches 1 - exp(-delta).
    """
    kind = kind.upper()
    if kind == 'MOMENT_TAIL':
        raise BadInputError("MOMENT_TAIL has no sampling experiment")
    threshold = concentration_threshold(kind, args)
    delta = float(args['delta'])
    target = 1.0 - exp(-delta)
    freq = event_frequency(_coverage_event(kind, args, threshold), trials, rng, workers)
    half_width = (freq.high - freq.low) / 2.0
    logger.info(f"Coverage {kind} delta={delta}: {freq.frequency:.4f} (target {target:.4f})")
    return BoundReport(kind, True, target, freq.frequency, freq.frequency + half_width - target,
                       freq.frequency + half_width >= target,
                       {'threshold': threshold, 'interval': [freq.low, freq.high], 'trials': trials, 'delta': delta})


# rank-one trace powers

def rank1_pq(u: float, v: float, n: int) -> Tuple[float, float]:
    """(AP)^n = p_n AP + q_n BP for A = (xy' + yx')/2, u = <x,Py>, v = <x,Px><y,Py>"""
    if n < 1:
        raise BadInputError(f"n must be at least 1, got {n}")
    k = n - 1
    p = sum(comb(k, 2 * l) * u ** (k - 2 * l) * v ** l for l in range(k // 2 + 1)) / 2.0 ** k
    q = sum(comb(k, 2 * l + 1) * u ** (k - 1 - 2 * l) * v ** l for l in range((k - 1) // 2 + 1)) / 2.0 ** (k + 1) \
        if k >= 1 else 0.0
    return p, q


def rank1_ab(u: float, v: float, n: int) -> Tuple[float, float]:
    """4 (AP)^n A = a_n (xy' + yx') + b_n [<x,Px> yy' + <y,Py> xx']"""
    a = sum(comb(n, 2 * l) * u ** (n - 2 * l) * v ** l for l in range(n // 2 + 1)) / 2.0 ** (n - 1)
    b = sum(comb(n, 2 * l + 1) * u ** (n - 1 - 2 * l) * v ** l for l in range((n - 1) // 2 + 1)) / 2.0 ** (n - 1)
    return a, b


def rank1_trace_power(x: Sequence[float], y: Sequence[float], P: np.ndarray, n: int) -> Dict[str, Any]:
    """
    2^{n+1} Tr[(AP)^{n+2}] for A = (xy' + yx')/2 from the closed form
    sum_l C(n+1, 2l) u^{n+2-2l} v^l + sum_{l>=1} C(n+1, 2l-1) u^{n+2-2l} v^l,
    against the direct matrix power and the bound 2^{n+1} lambda_1(P)^{n+2} (|x| |y|)^{n+2}.
    """
    P = check_symmetric(P, "P")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (P.shape[0],) or y.shape != (P.shape[0],):
        raise BadInputError("x and y must be vectors matching the dimension of P")
    if n < 0:
        raise BadInputError(f"n must be non-negative, got {n}")
    u = float(x @ P @ y)
    v = float((x @ P @ x) * (y @ P @ y))
    closed = sum(comb(n + 1, 2 * l) * u ** (n + 2 - 2 * l) * v ** l for l in range((n + 1) // 2 + 1))
    closed += sum(comb(n + 1, 2 * l - 1) * u ** (n + 2 - 2 * l) * v ** l for l in range(1, n // 2 + 2))

    A = (np.outer(x, y) + np.outer(y, x)) / 2.0
    direct = 2.0 ** (n + 1) * float(np.trace(np.linalg.matrix_power(A @ P, n + 2)))
    p, q = rank1_pq(u, v, n + 2)
    recursion = 2.0 ** (n + 1) * (p * u + 2.0 * q * v)
    bound = 2.0 ** (n + 1) * lambda1(P) ** (n + 2) * (np.linalg.norm(x) * np.linalg.norm(y)) ** (n + 2)
    scale = max(1.0, abs(direct))
    return {
        'closed_form': float(closed),
        'direct': direct,
        'recursion': recursion,
        'bound': float(bound),
        'matches': abs(closed - direct) <= 1e-10 * scale and abs(recursion - direct) <= 1e-10 * scale,
        'within_bound': direct <= bound * (1 + 1e-12) + 1e-12,
    }


def rank1_power_bound_check(x: Sequence[float], y: Sequence[float], P: np.ndarray, n: int) -> bool:
    """4 (AP)^n A against a_n (xy' + yx') + b_n B, entrywise within 1e-10"""
    P = check_symmetric(P, "P")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    A = (np.outer(x, y) + np.outer(y, x)) / 2.0
    u = float(x @ P @ y)
    v = float((x @ P @ x) * (y @ P @ y))
    a, b = rank1_ab(u, v, n)
    B = (x @ P @ x) * np.outer(y, y) + (y @ P @ y) * np.outer(x, x)
    lhs = 4.0 * np.linalg.matrix_power(A @ P, n) @ A
    rhs = a * (np.outer(x, y) + np.outer(y, x)) + b * B
    return bool(np.allclose(lhs, rhs, rtol=1e-10, atol=1e-10))


def trace_product_check(P: np.ndarray, Q: np.ndarray, n: int, m: int) -> bool:
    """0 <= Tr((PQ)^{n+m}) <= Tr((PQ)^n) Tr((PQ)^m) for positive semi-definite P, Q"""
    P = check_symmetric(P, "P")
    Q = check_symmetric(Q, "Q")
    _require(is_psd(P) and is_psd(Q), "P >= 0 and Q >= 0")
    PQ = P @ Q

    def tr(k: int) -> float:
        return float(np.trace(np.linalg.matrix_power(PQ, k)))

    whole = tr(n + m)
    scale = max(1.0, abs(tr(n) * tr(m)))
    return whole >= -1e-12 * scale and whole <= tr(n) * tr(m) + 1e-10 * scale


# trace fluctuations

def _trace_cumulants(A: np.ndarray, P: np.ndarray, N: Optional[int], order: int) -> List[float]:
    """Cumulants kappa_1..kappa_order of Tr(A H_N) (N given) or Tr(A H) (N None)"""
    mu = _ap_spectrum(A, P)
    cumulants = [0.0]
    for j in range(2, order + 1):
        power = float(np.sum(mu ** j))
        if N is None:
            cumulants.append(2.0 * power if j == 2 else 0.0)
        else:
            cumulants.append(N ** (1.0 - j / 2.0) * 2.0 ** (j - 1) * factorial(j - 1) * power)
    return cumulants[:order]


def trace_moment(A: np.ndarray, P: np.ndarray, N: Optional[int], k: int) -> float:
    """E[(Tr(A H_N))^k] (or of Tr(A H) when N is None) as a complete Bell polynomial in the cumulants"""
    if k == 0:
        return 1.0
    return float(bell_complete(k, _trace_cumulants(A, P, N, k)))


def trace_moment_check(A: np.ndarray, P: np.ndarray, N: int, n: int, alpha: float, beta: float) -> List[BoundReport]:
    """
    Moment gaps of Y_N = Tr(A H_N)/sqrt(2r) against Y = Tr(A H)/sqrt(2r):
      |E Y_N^{2n} - E Y^{2n}|/(2n)! <= 4(e-1)/(rN) alpha^{n-1} beta^{2n} (1 v 8/(rN))^{n-1}
      |E Y_N^{2n+1}|/(2n+1)! <= (e-1) sqrt(2)/sqrt(rN) alpha^n beta^{2n+1} (1 v 8/(rN))^n
    """
    A = check_symmetric(A, "A")
    P = check_symmetric(P, "P")
    if n < 1 or N < 1:
        raise BadInputError(f"need n, N >= 1, got n={n}, N={N}")
    r = P.shape[0]
    _require(alpha >= 1.0 and beta >= 0.0, "alpha >= 1 and beta >= 0", f"alpha={alpha}, beta={beta}")
    AP = A @ P
    for k in range(1, 2 * n + 2):
        value = abs(float(np.trace(np.linalg.matrix_power(AP, k)))) / r
        _require(value <= alpha * beta ** k * (1 + 1e-12) + 1e-15, "r^{-1}|Tr((AP)^k)| <= alpha beta^k",
                 f"k={k}: {value:.6g} > {alpha * beta ** k:.6g}")
    scale = sqrt(2.0 * r)
    rn = r * N
    growth = max(1.0, 8.0 / rn)

    even_gap = (trace_moment(A, P, N, 2 * n) - trace_moment(A, P, None, 2 * n)) / scale ** (2 * n)
    even_rhs = 4.0 * (e - 1.0) / rn * alpha ** (n - 1) * beta ** (2 * n) * growth ** (n - 1)
    odd = trace_moment(A, P, N, 2 * n + 1) / scale ** (2 * n + 1)
    odd_rhs = (e - 1.0) * sqrt(2.0) / sqrt(rn) * alpha ** n * beta ** (2 * n + 1) * growth ** n

    reports = [
        _report('even_moment_gap', abs(even_gap) / factorial(2 * n), even_rhs, 1e-12, signed=even_gap, n=n),
        _report('odd_moment', abs(odd) / factorial(2 * n + 1), odd_rhs, 1e-12, signed=odd, n=n),
    ]
    if is_psd(A):
        for report in reports:
            report.detail['nonnegative'] = report.detail['signed'] >= -1e-12
    return reports


def subgaussian_check(A: np.ndarray, P: np.ndarray, N: int, t: float) -> List[BoundReport]:
    """Sub-Gaussian log-Laplace bounds on Tr(A H_N), compared against the exact log-Laplace transform"""
    A = check_symmetric(A, "A")
    P = check_symmetric(P, "P")
    AP = A @ P
    frob = float(np.linalg.norm(AP))
    tr_ap2 = float(np.trace(AP @ AP))
    _require(4.0 * abs(t) * frob <= sqrt(N), "4|t| ||AP||_F <= sqrt(N)", f"t={t}, N={N}")
    exact = trace_ahn(A, P, N, t)
    reports = [_report('subgaussian', exact, t * t * (tr_ap2 + 2.0 * frob ** 2), 1e-9, t=t)]
    refined = t * t * tr_ap2 - 2.0 * t * t * frob ** 2 * log(1.0 - 2.0 * abs(t) * frob / sqrt(N))
    reports.append(_report('subgaussian_refined', exact, refined, 1e-9, t=t))
    tr_ap = float(np.trace(AP))
    if is_psd(A) and t >= 0 and 4.0 * t * tr_ap < sqrt(N):
        reports.append(_report('subgaussian_psd', exact, 3.0 * t * t * tr_ap2, 1e-9, t=t))
        psd_refined = t * t * tr_ap2 * (1.0 - 2.0 * log(1.0 - 2.0 * t * tr_ap / sqrt(N)))
        reports.append(_report('subgaussian_psd_refined', exact, psd_refined, 1e-9, t=t))
    return reports


# Monte Carlo expectation bounds

def hyperbolic_moment_check(P: np.ndarray, t: float, N: int, trials: int, rng: Optional[RngSpec] = None,
                    workers: Optional[int] = None, m: int = 4) -> List[BoundReport]:
    """
    ||E cosh(t H_N) - E exp(t H)||_F <= (8t)^4 [Tr(P^2) + Tr(P)^2]^2/N and
    ||E sinh(t H_N)||_F <= 4 (t Tr P)^3/sqrt(N), with Monte Carlo left sides and
    four standard errors (plus the series remainder) granted as slack.
    """
    P = check_symmetric(P, "P")
    trace = float(np.trace(P))
    _require(0.0 <= 4.0 * sqrt(2.0) * t * trace < 1.0 and N >= 8, "0 <= 4 sqrt(2) t Tr(P) < 1 and N >= 8",
             f"t={t}, N={N}")
    rng = rng or RngSpec()

    def task(gen: np.random.Generator) -> np.ndarray:
        H = sample_hn(P, N, gen)
        return np.stack([sym_fun(t * H, np.cosh), sym_fun(t * H, np.sinh)])

    samples = np.stack(run_trials(task, trials, rng, workers))
    mean = np.sum(samples, axis=0) / trials
    stderr = np.std(samples, axis=0, ddof=1) / sqrt(trials)
    series = h_series(P, t, m)
    F = frobenius_h2(P)
    cosh_rhs = (8.0 * t) ** 4 * F ** 2 / N
    sinh_rhs = 4.0 * (t * trace) ** 3 / sqrt(N)
    cosh_slack = 4.0 * float(np.linalg.norm(stderr[0])) + series['remainder_bound']
    sinh_slack = 4.0 * float(np.linalg.norm(stderr[1]))
    reports = [
        _report('cosh_gap', float(np.linalg.norm(mean[0] - series['value'])), cosh_rhs, cosh_slack, trials=trials),
        _report('sinh_mean', float(np.linalg.norm(mean[1])), sinh_rhs, sinh_slack, trials=trials),
    ]
    laplace_rhs = 4.0 ** 6 / N * t ** 4 * F ** 2 + 4.0 / sqrt(N) * (t * trace) ** 3
    gap = float(np.linalg.norm(mean[0] + mean[1] - series['value']))
    reports.append(_report('laplace_gap', gap, laplace_rhs, cosh_slack + sinh_slack, trials=trials))
    return reports


def opnorm_expectation_check(P: np.ndarray, N: int, trials: int, rng: Optional[RngSpec] = None,
                    workers: Optional[int] = None) -> List[BoundReport]:
    """E||H||_op ^ E||H_N||_op <= 6 sqrt(r) lambda_1(P) and E[lambda_1(P_N)]/lambda_1(P) <= 1 + 6 sqrt(r/N)"""
    P = check_symmetric(P, "P")
    r = P.shape[0]
    _require(N >= 8 * r * log(31), "N >= 8 r log(31)", f"N={N}, r={r}")
    rng = rng or RngSpec()
    top = lambda1(P)
    root = sqrt_psd(P)

    def task(gen: np.random.Generator) -> Tuple[float, float, float]:
        PN = sample_wishart(P, N, 'PLAIN', gen)
        HN = sqrt(N) * (PN - P)
        H = sample_h(P, gen, root)
        return (float(np.max(np.abs(eigenvalues(H)))), float(np.max(np.abs(eigenvalues(HN)))),
                float(eigenvalues(PN)[0]))

    frame = pd.DataFrame(run_trials(task, trials, rng, workers), columns=['h_op', 'hn_op', 'lambda1_pn'])
    means = frame.mean()
    errors = frame.std(ddof=1) / sqrt(trials)
    op_bound = 6.0 * sqrt(r) * top
    smaller = min(means['h_op'], means['hn_op'])
    return [
        _report('opnorm_expectation', smaller, op_bound, 4.0 * float(errors.max()),
                h_op=float(means['h_op']), hn_op=float(means['hn_op'])),
        _report('lambda1_expectation', means['lambda1_pn'] / top, 1.0 + 6.0 * sqrt(r / N),
                4.0 * float(errors['lambda1_pn']) / top),
    ]


class CoverageSweep:
    """Coverage experiments over a grid of delta, written as a CSV table with stats"""

    def __init__(self, P: np.ndarray, A: np.ndarray, N: int = 400, trials: int = 10000,
                 deltas: Sequence[float] = (0.5, 1.0, 2.0), kinds: Optional[Sequence[str]] = None,
                 rng: Optional[RngSpec] = None, workers: Optional[int] = None,
                 output_dir: str = "generated/bounds"):
        self.P = check_symmetric(P, "P")
        self.A = check_symmetric(A, "A")
        self.N = N
        self.trials = trials
        self.deltas = list(deltas)
        self.kinds = list(kinds or ('TRACE_TWO_SIDED', 'TRACE_POS', 'TRACE_NEG', 'TRACE_H', 'OPNORM',
                                    'EIGEN_SUP', 'LAMBDA1', 'LAMBDA1_H'))
        self.rng = rng or RngSpec()
        self.workers = workers
        self.output_dir = Path(output_dir)

    def run(self) -> pd.DataFrame:
        rows = []
        for kind in self.kinds:
            for delta in self.deltas:
                args = {'P': self.P, 'A': self.A, 'N': self.N, 'delta': delta}
                try:
                    report = coverage_experiment(kind, args, self.trials, self.rng, self.workers)
                except HypothesisError as e:
                    logger.warning(f"Skipping {kind} at delta={delta}: {e}")
                    continue
                rows.append({
                    'kind': kind, 'delta': delta, 'N': self.N, 'r': self.P.shape[0],
                    'threshold': report.detail['threshold'], 'frequency': report.empirical,
                    'target': report.bound, 'wilson_low': report.detail['interval'][0],
                    'wilson_high': report.detail['interval'][1], 'holds': report.holds,
                })
        return pd.DataFrame(rows, columns=['kind', 'delta', 'N', 'r', 'threshold', 'frequency', 'target',
                                           'wilson_low', 'wilson_high', 'holds'])

    def generate(self) -> Dict[str, Any]:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        df = self.run()
        df.to_csv(self.output_dir / "coverage.csv", index=False)
        stats = {
            'experiments': len(df),
            'failures': int((~df['holds']).sum()) if len(df) else 0,
            'trials': self.trials,
            'rng': self.rng.to_json(),
        }
        with open(self.output_dir / "coverage_stats.json", 'w', encoding='utf-8') as f:
            json.dump(stats, f, indent=2)
        logger.info(f"Coverage sweep written to {self.output_dir}: {stats}")
        return stats


def main():
    import argparse

    parser = argparse.ArgumentParser(description="Run concentration coverage experiments")
    parser.add_argument('--r', type=int, default=3, help='Dimension')
    parser.add_argument('--N', type=int, default=400, help='Degrees of freedom')
    parser.add_argument('--trials', type=int, default=10000, help='Trials per experiment')
    parser.add_argument('--output-dir', default='generated/bounds', help='Output directory')
    args = parser.parse_args()

    P = np.diag(np.linspace(1.0, 2.0, args.r))
    stats = CoverageSweep(P, np.eye(args.r), args.N, args.trials, output_dir=args.output_dir).generate()

    print(f"\n=== Coverage Sweep Complete ===")
    print(f"Experiments: {stats['experiments']}")
    print(f"Failures: {stats['failures']}")


if __name__ == "__main__":
    main()
