#!/usr/bin/env python3
"""
Monte Carlo oracle for Wishart matrices

Reproducible draws of the sample covariance P_N, the fluctuation H_N and the
Gaussian limit H; entrywise moment estimates with standard errors; a cyclic
Jacobi eigensolver; pooled spectral histograms with Marchenko-Pastur and
semicircle overlays; and event frequencies with Wilson intervals.

Every trial draws from its own MT19937 substream keyed by
(seed, stream, trial), so results do not depend on the worker count.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import sqrt
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import integrate, stats
from tqdm import tqdm

from utils.config import CONFIG
from utils.errors import BadInputError, ConvergenceError

logger = logging.getLogger(__name__)

VARIANTS = ('PLAIN', 'MEAN_ADJUSTED')
TARGETS = ('PN_POWER', 'CENTERED_POWER', 'HN_POWER', 'H_POWER')

JACOBI_TOLERANCE = 1e-12
JACOBI_MAX_SWEEPS = 100
# beyond this dimension histograms use LAPACK instead of Jacobi sweeps
JACOBI_MAX_DIM = 64


@dataclass(frozen=True)
class RngSpec:
    """MT19937 bit generator seeded by SeedSequence(seed, spawn_key=(stream, trial))"""

    seed: int = CONFIG['seed']
    stream: int = CONFIG['stream']

    def generator(self, trial: int = 0) -> np.random.Generator:
        if self.seed < 0 or self.stream < 0 or trial < 0:
            raise BadInputError(f"seed, stream and trial must be non-negative: {self}, trial={trial}")
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream, trial))
        return np.random.Generator(np.random.MT19937(sequence))

    def to_json(self) -> Dict[str, Any]:
        return {'algorithm': 'MT19937', 'seed': self.seed, 'stream': self.stream}


@dataclass
class MomentEstimate:
    mean: np.ndarray
    stderr: np.ndarray
    trials: int
    meta: Dict[str, Any] = field(default_factory=dict)

    def within(self, expected: np.ndarray, sigmas: float = 4.0, floor: float = 1e-9) -> bool:
        """Entrywise |mean - expected| <= sigmas * stderr (plus a tiny absolute floor)"""
        gap = np.abs(self.mean - np.asarray(expected, dtype=float))
        return bool(np.all(gap <= sigmas * self.stderr + floor))

    def to_json(self) -> Dict[str, Any]:
        return {
            'mean': self.mean.tolist(),
            'stderr': self.stderr.tolist(),
            'trials': self.trials,
            'meta': self.meta,
        }


@dataclass
class EventFrequency:
    frequency: float
    low: float
    high: float
    trials: int

    def to_json(self) -> Dict[str, Any]:
        return {'frequency': self.frequency, 'interval': [self.low, self.high], 'trials': self.trials}


# matrix helpers

def check_symmetric(A: np.ndarray, name: str = "matrix") -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise BadInputError(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(A).max()))):
        raise BadInputError(f"{name} is not symmetric")
    return A


def cholesky_factor(P: np.ndarray) -> np.ndarray:
    P = check_symmetric(P, "P")
    try:
        return np.linalg.cholesky(P)
    except np.linalg.LinAlgError:
        raise BadInputError("P is not symmetric positive definite")


def sqrt_psd(P: np.ndarray) -> np.ndarray:
    """Symmetric square root of a positive semi-definite matrix"""
    P = check_symmetric(P, "P")
    values, vectors = np.linalg.eigh(P)
    if values.min() < -1e-12 * max(1.0, abs(values).max()):
        raise BadInputError("P is not positive semi-definite")
    return (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.T


def box_muller(gen: np.random.Generator, shape) -> np.ndarray:
    """Standard normals from paired uniforms; always consumes 2*ceil(size/2) uniforms"""
    size = int(np.prod(shape))
    pairs = (size + 1) // 2
    u1 = 1.0 - gen.random(pairs)
    u2 = gen.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(2.0 * np.pi * u2)
    z[1::2] = radius * np.sin(2.0 * np.pi * u2)
    return z[:size].reshape(shape)


def random_spd(dim: int, gen: np.random.Generator, condition: float = 10.0) -> np.ndarray:
    """Random SPD matrix with eigenvalues spread over [1, condition]"""
    q, _ = np.linalg.qr(box_muller(gen, (dim, dim)))
    values = np.linspace(1.0, condition, dim)
    return (q * values) @ q.T


# draws

def sample_gaussians(P: np.ndarray, count: int, gen: np.random.Generator) -> np.ndarray:
    """count i.i.d. N(0, P) vectors as the columns of an r x count array"""
    L = cholesky_factor(P)
    return L @ box_muller(gen, (P.shape[0], count))


def sample_wishart(P: np.ndarray, N: int, variant: str = 'PLAIN', gen: Optional[np.random.Generator] = None,
                   rng: Optional[RngSpec] = None) -> np.ndarray:
    """
    One draw of P_N. PLAIN averages N outer products of N(0, P) vectors;
    MEAN_ADJUSTED draws N+1 vectors and uses the sample covariance with N
    degrees of freedom.
    """
    if N < 1:
        raise BadInputError(f"N must be at least 1, got {N}")
    variant = variant.upper()
    if variant not in VARIANTS:
        raise BadInputError(f"unknown variant {variant}, expected one of {VARIANTS}")
    gen = gen if gen is not None else (rng or RngSpec()).generator(0)
    if variant == 'PLAIN':
        X = sample_gaussians(P, N, gen)
    else:
        X = sample_gaussians(P, N + 1, gen)
        X = X - X.mean(axis=1, keepdims=True)
    S = X @ X.T / N
    return (S + S.T) / 2.0


def sample_h(P: np.ndarray, gen: np.random.Generator, root: Optional[np.ndarray] = None) -> np.ndarray:
    """One draw of H = P^{1/2} ((W + W')/sqrt(2)) P^{1/2} with W standard Gaussian"""
    root = sqrt_psd(P) if root is None else root
    W = box_muller(gen, P.shape)
    return root @ ((W + W.T) / sqrt(2.0)) @ root


def sample_hn(P: np.ndarray, N: int, gen: np.random.Generator) -> np.ndarray:
    return sqrt(N) * (sample_wishart(P, N, 'PLAIN', gen) - P)


# trial plumbing

def run_trials(task: Callable[[np.random.Generator], Any], trials: int, rng: RngSpec,
               workers: Optional[int] = None, desc: Optional[str] = None) -> List[Any]:
    """Run independent trials, each on its own substream; results come back in trial order"""
    workers = CONFIG['workers'] if workers is None else workers
    if workers < 1:
        raise BadInputError(f"workers must be at least 1, got {workers}")

    def one(trial: int):
        return task(rng.generator(trial))

    indices = range(trials)
    if workers == 1:
        return [one(t) for t in tqdm(indices, desc=desc, disable=desc is None)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(tqdm(pool.map(one, indices), total=trials, desc=desc, disable=desc is None))


def _estimate(samples: Sequence[np.ndarray], meta: Dict[str, Any]) -> MomentEstimate:
    stack = np.stack(samples)
    trials = stack.shape[0]
    mean = np.sum(stack, axis=0) / trials
    stderr = np.std(stack, axis=0, ddof=1) / sqrt(trials)
    return MomentEstimate(mean=mean, stderr=stderr, trials=trials, meta=meta)


def empirical_moment(P: np.ndarray, N: int, n: int, target: str, trials: int,
                     rng: Optional[RngSpec] = None, workers: Optional[int] = None) -> MomentEstimate:
    """Entrywise sample mean and standard error of a matrix power over independent trials"""
    P = check_symmetric(P, "P")
    target = target.upper()
    if target not in TARGETS:
        raise BadInputError(f"unknown target {target}, expected one of {TARGETS}")
    if trials < 100:
        raise BadInputError(f"need at least 100 trials, got {trials}")
    if n < 0:
        raise BadInputError(f"n must be non-negative, got {n}")
    rng = rng or RngSpec()
    cholesky_factor(P)
    root = sqrt_psd(P) if target == 'H_POWER' else None

    def task(gen: np.random.Generator) -> np.ndarray:
        if target == 'H_POWER':
            M = sample_h(P, gen, root)
        elif target == 'HN_POWER':
            M = sample_hn(P, N, gen)
        elif target == 'CENTERED_POWER':
            M = sample_wishart(P, N, 'PLAIN', gen) - P
        else:
            M = sample_wishart(P, N, 'PLAIN', gen)
        return np.linalg.matrix_power(M, n)

    logger.info(f"Estimating {target} n={n} N={N} over {trials} trials")
    samples = run_trials(task, trials, rng, workers)
    meta = {'target': target, 'n': n, 'N': N, 'rng': rng.to_json()}
    return _estimate(samples, meta)


# eigenvalues

def eigen(A: np.ndarray, tolerance: float = JACOBI_TOLERANCE, max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, in descending order"""
    A = check_symmetric(A).copy()
    dim = A.shape[0]
    target = tolerance * max(np.linalg.norm(A), np.finfo(float).tiny)

    def off_norm(M: np.ndarray) -> float:
        return float(np.sqrt(max(np.sum(M * M) - np.sum(np.diag(M) ** 2), 0.0)))

    for sweep in range(max_sweeps):
        if off_norm(A) <= target:
            logger.debug(f"Jacobi converged after {sweep} sweeps (dim={dim})")
            return np.sort(np.diag(A))[::-1]
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + sqrt(theta * theta + 1.0)) if theta != 0.0 else 1.0
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                rows = A[[p, q], :].copy()
                A[p, :] = c * rows[0] - s * rows[1]
                A[q, :] = s * rows[0] + c * rows[1]
                cols = A[:, [p, q]].copy()
                A[:, p] = c * cols[:, 0] - s * cols[:, 1]
                A[:, q] = s * cols[:, 0] + c * cols[:, 1]
    if off_norm(A) <= target:
        return np.sort(np.diag(A))[::-1]
    raise ConvergenceError(f"Jacobi sweeps did not converge after {max_sweeps} sweeps")


def eigenvalues(A: np.ndarray) -> np.ndarray:
    """Jacobi for small matrices, LAPACK (eigvalsh) for large ones; descending"""
    A = check_symmetric(A)
    if A.shape[0] <= JACOBI_MAX_DIM:
        return eigen(A)
    return np.sort(np.linalg.eigvalsh(A))[::-1]


def wielandt_hoffman_holds(A: np.ndarray, B: np.ndarray) -> bool:
    """sum_k (lambda_k(A) - lambda_k(B))^2 <= ||A - B||_F^2"""
    gap = eigenvalues(A) - eigenvalues(B)
    return float(np.sum(gap ** 2)) <= float(np.linalg.norm(A - B) ** 2) * (1 + 1e-10) + 1e-12


def weyl_holds(A: np.ndarray, B: np.ndarray) -> bool:
    """sup_k |lambda_k(A) - lambda_k(B)| <= ||A - B||_op"""
    gap = np.max(np.abs(eigenvalues(A) - eigenvalues(B)))
    op = np.max(np.abs(eigenvalues(A - B)))
    return float(gap) <= float(op) * (1 + 1e-10) + 1e-12


# limiting densities

def mp_edges(rho: float):
    return (1.0 - sqrt(rho)) ** 2, (1.0 + sqrt(rho)) ** 2


def mp_density(x, rho: float):
    """Absolutely continuous part of the Marchenko-Pastur law with ratio rho"""
    if rho <= 0:
        raise BadInputError(f"rho must be positive, got {rho}")
    lo, hi = mp_edges(rho)
    x = np.asarray(x, dtype=float)
    inside = (x > lo) & (x < hi) & (x > 0)
    safe = np.where(inside, x, 1.0)
    values = np.sqrt(np.clip((hi - safe) * (safe - lo), 0.0, None)) / (2.0 * np.pi * rho * safe)
    return np.where(inside, values, 0.0)


def mp_atom(rho: float) -> float:
    return max(0.0, 1.0 - 1.0 / rho)


def sc_density(x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < 2.0, np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / (2.0 * np.pi), 0.0)


def mp_bin_mass(lo: float, hi: float, rho: float) -> float:
    a, b = mp_edges(rho)
    left, right = max(lo, a), min(hi, b)
    mass = 0.0
    if right > left:
        mass, _ = integrate.quad(lambda x: float(mp_density(x, rho)), left, right, limit=200)
    if lo <= 0.0 < hi:
        mass += mp_atom(rho)
    return mass


def sc_bin_mass(lo: float, hi: float) -> float:
    left, right = max(lo, -2.0), min(hi, 2.0)
    if right <= left:
        return 0.0
    mass, _ = integrate.quad(lambda x: float(sc_density(x)), left, right, limit=200)
    return mass


# spectral statistics

def pooled_eigenvalues(P: np.ndarray, N: int, trials: int, kind: str = 'MP',
                       rng: Optional[RngSpec] = None, workers: Optional[int] = None) -> np.ndarray:
    """Eigenvalues of P_N (kind 'MP') or of H/sqrt(r) (kind 'SC') pooled over trials"""
    P = check_symmetric(P, "P")
    rng = rng or RngSpec()
    kind = kind.upper()
    if kind not in ('MP', 'SC'):
        raise BadInputError(f"unknown spectrum kind {kind}, expected 'MP' or 'SC'")
    dim = P.shape[0]
    root = sqrt_psd(P) if kind == 'SC' else None

    def task(gen: np.random.Generator) -> np.ndarray:
        if kind == 'MP':
            return eigenvalues(sample_wishart(P, N, 'PLAIN', gen))
        return eigenvalues(sample_h(P, gen, root) / sqrt(dim))

    return np.concatenate(run_trials(task, trials, rng, workers, desc=f"{kind} spectra"))


def spectral_histogram(P: np.ndarray, N: int, trials: int, bins: int, kind: str = 'MP',
                       rng: Optional[RngSpec] = None, workers: Optional[int] = None,
                       value_range: Optional[Sequence[float]] = None) -> pd.DataFrame:
    """
    Normalized histogram of pooled eigenvalues with the bin-averaged
    Marchenko-Pastur (rho = r/N, atom included) and semicircle densities.
    """
    if bins < 10:
        raise BadInputError(f"need at least 10 bins, got {bins}")
    values = pooled_eigenvalues(P, N, trials, kind, rng, workers)
    rho = P.shape[0] / N
    if value_range is None:
        if kind.upper() == 'MP':
            value_range = (min(0.0, float(values.min())), max(mp_edges(rho)[1], float(values.max())) * 1.05)
        else:
            bound = max(2.0, float(np.abs(values).max())) * 1.05
            value_range = (-bound, bound)
    counts, edges = np.histogram(values, bins=bins, range=tuple(value_range))
    widths = np.diff(edges)
    rows = []
    for i in range(bins):
        lo, hi = float(edges[i]), float(edges[i + 1])
        rows.append({
            'bin_lo': lo,
            'bin_hi': hi,
            'empirical': counts[i] / (len(values) * widths[i]),
            'mp_density': mp_bin_mass(lo, hi, rho) / widths[i],
            'sc_density': sc_bin_mass(lo, hi) / widths[i],
        })
    logger.info(f"Histogram of {len(values)} eigenvalues ({kind}, rho={rho:.3f}, bins={bins})")
    return pd.DataFrame(rows, columns=['bin_lo', 'bin_hi', 'empirical', 'mp_density', 'sc_density'])


def event_frequency(event: Callable[[np.random.Generator], bool], trials: int,
                    rng: Optional[RngSpec] = None, workers: Optional[int] = None,
                    confidence: float = 0.95) -> EventFrequency:
    """Frequency of a per-trial predicate with a Wilson score interval"""
    if trials < 1000:
        raise BadInputError(f"need at least 1000 trials, got {trials}")
    rng = rng or RngSpec()
    hits = sum(bool(h) for h in run_trials(event, trials, rng, workers))
    interval = stats.binomtest(hits, trials).proportion_ci(confidence_level=confidence, method='wilson')
    return EventFrequency(hits / trials, float(interval.low), float(interval.high), trials)


def trace_clt(P: np.ndarray, B: np.ndarray, N: int, trials: int,
              rng: Optional[RngSpec] = None, workers: Optional[int] = None) -> Dict[str, float]:
    """
    Kolmogorov-Smirnov test of Tr(H_N B) / sqrt(2 Tr((PB)^2)) against the
    standard normal law.
    """
    P = check_symmetric(P, "P")
    B = check_symmetric(B, "B")
    rng = rng or RngSpec()
    scale = sqrt(2.0 * float(np.trace(P @ B @ P @ B)))
    if scale <= 0:
        raise BadInputError("Tr((PB)^2) must be positive")

    def task(gen: np.random.Generator) -> float:
        return float(np.trace(sample_hn(P, N, gen) @ B)) / scale

    values = np.asarray(run_trials(task, trials, rng, workers))
    result = stats.kstest(values, 'norm')
    return {'statistic': float(result.statistic), 'pvalue': float(result.pvalue), 'trials': trials}
