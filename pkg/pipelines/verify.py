#!/usr/bin/env python3
"""
Verification suites

Named cross-route and oracle suites. Each suite runs as a phase that logs its
failures and reports pass/fail instead of aborting the run; `all` runs every
suite in order and writes a summary.
"""

import json
import logging
import sys
import time
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from pipelines.bounds import (CoverageSweep, cubic_weight_order_check, gaussian_moment_norm_check,
                              matrix_laplace_ineq, moment_norm_check, rank1_power_bound_check, rank1_trace_power,
                              subgaussian_check, trace_moment_check, trace_product_check)
from pipelines.limit_laws import (mp_integral, mp_moment, mp_moment_iso, mp_moment_iso_binomial, sc_integral,
                                  sc_moment)
from pipelines.moments import (alpha_coeffs, inversion, m_nm, m_plus, pn_moment, series_numeric, sigma,
                               rank1_power, sigma_circ, sigma_trace, x_minus_i_power)
from utils.errors import WishartError
from utils.partitions import SetPartition, count_partitions, integer_partitions, nc_of_type
from utils.sampling import RngSpec, empirical_moment, random_spd
from utils.specnum import (bell_number, bell_tail_check, catalan, catalan_triangle, catalan_triangle_convolution,
                           kreweras_count, narayana, riordan_nm, stirling2)
from utils.tracepoly import RLaurent
from utils.wick import moment_class, moment_H, moment_partition

logger = logging.getLogger(__name__)

SUITES = ('sigma-routes', 'circ-routes', 'mplus-wick', 'hn-wick', 'inversion', 'alpha-routes', 'counting',
          'isotropic', 'limits', 'golden', 'montecarlo', 'bounds', 'coverage')

# slot pairs allowed in the Wick cross-checks (centered n up to 6)
CROSS_CHECK_WICK_CAP = 12

GOLDEN_DIR = Path(__file__).resolve().parent.parent / 'tests' / 'golden'

# golden file -> polynomial producer
GOLDEN = {
    'h2.json': lambda: moment_H(2),
    'h4.json': lambda: moment_H(4),
    'x_minus_p_2.json': lambda: m_nm(2, 1),
    'x_minus_p_3.json': lambda: m_nm(3, 1),
    'x_minus_p_4.json': lambda: m_nm(4, 1),
    'm_pi3.json': lambda: moment_partition(SetPartition.from_blocks([[1, 3], [2, 4]]), centered=True),
    'm_plus_1.json': lambda: m_plus(1),
    'm_plus_2.json': lambda: m_plus(2),
    'm_plus_3.json': lambda: m_plus(3),
    **{f'sigma_{n}.json': (lambda n=n: sigma(n)) for n in range(1, 6)},
    **{f'sigma_trace_{n}.json': (lambda n=n: sigma_trace(n)[0]) for n in range(1, 6)},
    'sigma_circ_3_2.json': lambda: sigma_circ(3, 2),
    'fourth_moment_gap.json': lambda: m_nm(4, 1) - m_nm(4, 2),
    'rank1_power_3.json': lambda: rank1_power(3),
}


def random_symmetric(dim: int, gen: np.random.Generator) -> np.ndarray:
    B = gen.standard_normal((dim, dim))
    return (B + B.T) / 2.0


class VerificationSuite:
    def __init__(
        self,
        n_max: Optional[int] = None,
        trials: int = 10000,
        instances: int = 100,
        dim: int = 3,
        rng: Optional[RngSpec] = None,
        workers: Optional[int] = None,
        output_dir: str = "generated/verify"
    ):
        self.n_max = n_max
        self.trials = trials
        self.instances = instances
        self.dim = dim
        self.rng = rng or RngSpec()
        self.workers = workers
        self.output_dir = Path(output_dir)
        self.failures: List[str] = []
        self.checks = 0

    def _n(self, default: int) -> int:
        return default if self.n_max is None else min(self.n_max, default)

    def _expect(self, condition: bool, what: str):
        self.checks += 1
        if not condition:
            self.failures.append(what)
            logger.error(f"Check failed: {what}")

    def _instance_gen(self, i: int) -> np.random.Generator:
        return RngSpec(self.rng.seed, self.rng.stream + 1).generator(i)

    # exact route comparisons

    def run_sigma_routes_phase(self):
        for n in range(1, self._n(7) + 1):
            self._expect(sigma(n) == sigma(n, 'CLOSED_FORM'), f"sigma recursion vs closed form, n={n}")
            self._expect(sigma(n).trace() == sigma_trace(n)[0], f"trace of sigma vs multinomial formula, n={n}")

    def run_circ_routes_phase(self):
        for n in range(1, self._n(7) + 1):
            for m in range(0, n + 1):
                self._expect(sigma_circ(n, m) == sigma_circ(n, m, 'CLOSED_FORM'),
                             f"sigma_circ recursion vs closed form, (n, m)=({n}, {m})")

    def run_mplus_wick_phase(self):
        for n in range(1, self._n(3) + 1):
            recursion = m_plus(n)
            self._expect(recursion == m_plus(n, 'GAMMA'), f"m_plus recursion vs Gamma route, n={n}")
            self._expect(recursion == m_plus(n, 'WICK', cap=CROSS_CHECK_WICK_CAP),
                         f"m_plus recursion vs Wick sum, n={n}")

    def run_hn_wick_phase(self):
        for n in range(1, self._n(3) + 1):
            pairings = moment_class(2 * n, n, 'Q_ALL', centered=True, cap=CROSS_CHECK_WICK_CAP)
            self._expect(pairings == moment_H(2 * n), f"pair-partition sum vs Gaussian moment, n={n}")

    def run_inversion_phase(self):
        for n in range(1, self._n(4) + 1):
            for m in range(1, n + 1):
                self._expect(inversion(n, m) == m_nm(n, m), f"inversion vs class sum, (n, m)=({n}, {m})")

    def run_alpha_routes_phase(self):
        n_max = self._n(8)
        for u in ([1] * (n_max + 2), list(range(1, n_max + 3)), [2 ** i for i in range(n_max + 2)]):
            try:
                alpha_coeffs(n_max, u)
                self._expect(True, f"alpha routes, u={u[:4]}...")
            except WishartError as e:
                self._expect(False, f"alpha routes, u={u[:4]}...: {e}")

    def run_counting_phase(self):
        for n in range(1, self._n(9) + 1):
            self._expect(count_partitions(n) == bell_number(n), f"Bell count, n={n}")
            self._expect(count_partitions(n, None, 'NC') == catalan(n), f"Catalan count, n={n}")
            for m in range(1, n + 1):
                self._expect(count_partitions(n, m) == stirling2(n, m), f"Stirling count, ({n}, {m})")
                self._expect(count_partitions(n, m, 'NC') == narayana(n, m), f"Narayana count, ({n}, {m})")
                self._expect(count_partitions(n, m, 'NOSING_NC') == riordan_nm(n, m), f"Riordan count, ({n}, {m})")
                self._expect(catalan_triangle(n, m) == catalan_triangle_convolution(n, m),
                             f"Catalan triangle routes, ({n}, {m})")
            if n <= 7:
                for mu in integer_partitions(n):
                    self._expect(len(nc_of_type(n, mu)) == kreweras_count(mu), f"Kreweras count, type {mu}")

        for i in range(self.instances):
            gen = self._instance_gen(i)
            p = int(gen.integers(1, 4))
            n = int(gen.integers(1, 4))
            q = int(gen.integers(0, p))
            positive = bool(gen.integers(0, 2))
            x = []
            for k in range(1, p * n + q + 1):
                if k < p:
                    x.append(Fraction(0))
                    continue
                low = 0 if positive else -factorial(k)
                x.append(Fraction(int(gen.integers(low, factorial(k) + 1)), int(gen.integers(1, 4))))
            self._expect(bell_tail_check(p, Fraction(1), Fraction(1), x, n, q),
                         f"instance {i}: Bell tail estimate (p={p}, n={n}, q={q})")

    def run_isotropic_phase(self):
        r = RLaurent.r()
        for n in range(1, self._n(6) + 1):
            self._expect(m_plus(n).eval_isotropic() == catalan(n) * (1 + r) ** n, f"M+ at P=I, n={n}")
            self._expect(sigma(n).trace().eval_isotropic() == catalan(n) * r ** (n + 1), f"Tr(Sigma) at P=I, n={n}")
            for m in range(1, n + 1):
                self._expect(sigma_circ(n, m).trace().eval_isotropic() == narayana(n, m) * r ** (n - m + 1),
                             f"Tr(Sigma_circ) at P=I, (n, m)=({n}, {m})")
            self._expect(x_minus_i_power(n) == x_minus_i_power(n, 'BINOMIAL'), f"(X-I)^n two forms, n={n}")

    def run_limits_phase(self):
        for rho in (Fraction(1, 2), Fraction(1), Fraction(2)):
            for n in range(0, self._n(6) + 1):
                exact = float(mp_moment_iso(n, rho))
                self._expect(abs(exact - mp_integral(n, float(rho))) <= 1e-6, f"MP quadrature, rho={rho}, n={n}")
                self._expect(mp_moment_iso(n, rho) == mp_moment_iso_binomial(n, rho), f"MP two forms, n={n}")
                self._expect(mp_moment(n, rho, [1] * max(n, 1)) == mp_moment_iso(n, rho),
                             f"MP general at unit traces, n={n}")
        for n in range(1, self._n(6) + 1):
            self._expect(mp_moment_iso(n, 1) == catalan(n), f"MP at rho=1 is Catalan, n={n}")
        for n in range(0, 2 * self._n(6) + 1):
            self._expect(abs(sc_integral(n) - sc_moment(n)) <= 1e-8, f"semicircle quadrature, n={n}")

    def run_golden_phase(self):
        for name, producer in GOLDEN.items():
            path = GOLDEN_DIR / name
            if not path.exists():
                self._expect(False, f"golden file {name} missing")
                continue
            expected = path.read_text(encoding='utf-8').strip()
            self._expect(producer().to_json() == expected, f"golden {name}")

    # Monte Carlo and inequalities

    def run_montecarlo_phase(self):
        P = random_spd(self.dim, self._instance_gen(0))
        N = 50
        for n in range(1, 4):
            estimate = empirical_moment(P, N, n, 'PN_POWER', self.trials, self.rng, self.workers)
            self._expect(estimate.within(series_numeric(pn_moment(n), N, P)), f"E(P_N^{n}) Monte Carlo, N={N}")
        for n in (1, 2):
            estimate = empirical_moment(P, N, 2 * n, 'H_POWER', self.trials, self.rng, self.workers)
            self._expect(estimate.within(moment_H(2 * n).eval_numeric(P)), f"E(H^{2 * n}) Monte Carlo")

    def run_bounds_phase(self):
        for i in range(self.instances):
            gen = self._instance_gen(i)
            dim = int(gen.integers(2, self.dim + 1))
            P = random_spd(dim, gen)
            A = random_symmetric(dim, gen)
            n = int(gen.integers(2, 5))
            N = int(gen.integers(n, 60))

            for report in moment_norm_check(P, n, N):
                self._expect(report.holds, f"instance {i}: {report.name} (n={n}, N={N})")
            self._expect(gaussian_moment_norm_check(P, int(gen.integers(1, 3))).holds,
                         f"instance {i}: gaussian moment norm")

            t = float(gen.uniform(0.0, 0.9)) / (2.0 * np.trace(P))
            for report in matrix_laplace_ineq(P, t):
                self._expect(report.holds, f"instance {i}: {report.name} (t={t:.4g})")
            self._expect(cubic_weight_order_check(P / np.trace(P)).holds, f"instance {i}: cubic weight order")

            frob = float(np.linalg.norm(A @ P))
            s = float(gen.uniform(-1.0, 1.0)) * np.sqrt(N) / (4.0 * frob)
            for report in subgaussian_check(A, P, N, s):
                self._expect(report.holds, f"instance {i}: {report.name} (t={s:.4g})")

            k = int(gen.integers(1, 3))
            AP = A @ P
            beta = max((abs(np.trace(np.linalg.matrix_power(AP, j))) / dim) ** (1.0 / j) for j in range(1, 2 * k + 2))
            for report in trace_moment_check(A, P, N, k, 1.0, beta):
                self._expect(report.holds, f"instance {i}: {report.name} (n={k})")

            x = gen.standard_normal(dim)
            y = gen.standard_normal(dim)
            x /= max(1.0, np.linalg.norm(x))
            y /= max(1.0, np.linalg.norm(y))
            power = int(gen.integers(0, 6))
            result = rank1_trace_power(x, y, P, power)
            self._expect(result['matches'] and result['within_bound'], f"instance {i}: rank-one trace power")
            self._expect(rank1_power_bound_check(x, y, P, power + 1), f"instance {i}: rank-one power identity")
            Q = random_spd(dim, gen)
            self._expect(trace_product_check(P, Q, int(gen.integers(1, 4)), int(gen.integers(1, 4))),
                         f"instance {i}: trace product inequality")

    def run_coverage_phase(self):
        gen = self._instance_gen(0)
        P = random_spd(3, gen)
        sweep = CoverageSweep(P, np.eye(3), N=400, trials=self.trials, rng=self.rng, workers=self.workers,
                              output_dir=str(self.output_dir / 'coverage'))
        df = sweep.run()
        self._expect(len(df) > 0, "coverage experiments ran")
        for row in df.itertuples():
            self._expect(bool(row.holds), f"coverage {row.kind} at delta={row.delta}")

    # orchestration

    def phases(self) -> Dict[str, Callable[[], None]]:
        return {name: getattr(self, f"run_{name.replace('-', '_')}_phase") for name in SUITES}

    def run_phase(self, name: str) -> bool:
        phase = self.phases()[name]
        before = len(self.failures)
        logger.info(f"=== STARTING {name.upper()} SUITE ===")
        start = time.time()
        try:
            phase()
        except WishartError as e:
            logger.error(f"Suite {name} aborted: {e}")
            self.failures.append(f"{name}: {e}")
        passed = len(self.failures) == before
        logger.info(f"Suite {name} {'passed' if passed else 'FAILED'} in {time.time() - start:.1f}s")
        return passed

    def run(self, suites: Sequence[str]) -> Dict[str, bool]:
        unknown = [s for s in suites if s not in SUITES]
        if unknown:
            raise KeyError(f"unknown suites {unknown}, expected some of {SUITES}")
        results = {name: self.run_phase(name) for name in suites}
        self.write_summary(results)
        return results

    def write_summary(self, results: Dict[str, bool]):
        self.output_dir.mkdir(parents=True, exist_ok=True)
        stats = {
            'suites': results,
            'checks': self.checks,
            'failures': self.failures,
            'trials': self.trials,
            'instances': self.instances,
            'rng': self.rng.to_json(),
        }
        with open(self.output_dir / "verify_stats.json", 'w', encoding='utf-8') as f:
            json.dump(stats, f, indent=2)


def main():
    import argparse

    parser = argparse.ArgumentParser(description="Run verification suites")
    parser.add_argument('suite', choices=SUITES + ('all',), help='Suite to run')
    parser.add_argument('--n', type=int, help='Largest order to check')
    parser.add_argument('--trials', type=int, default=10000, help='Monte Carlo trials')
    parser.add_argument('--output-dir', default='generated/verify', help='Output directory')
    args = parser.parse_args()

    suites = SUITES if args.suite == 'all' else (args.suite,)
    results = VerificationSuite(args.n, args.trials, output_dir=args.output_dir).run(suites)

    print(f"\n=== Verification Complete ===")
    for name, passed in results.items():
        print(f"{name}: {'PASS' if passed else 'FAIL'}")
    sys.exit(0 if all(results.values()) else 1)


if __name__ == "__main__":
    main()
