#!/usr/bin/env python3
"""
Wishart Moments - Main Entry Point

This script provides a unified command line over the moment engine: set
partitions and counting sequences, exact trace-polynomial moments of Wishart
fluctuations, limit laws, Monte Carlo sampling, concentration bounds and the
verification suites.
"""

import os
import sys
import json
import logging
import argparse
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

# Add project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from utils.config import CONFIG, FORMATS, load_config, validate_config
from utils.errors import BadInputError, CheckFailedError, WishartError

logger = logging.getLogger(__name__)

MOMENT_KINDS = ('m', 'mplus', 'mcirc', 'hn', 'pn')
MATRIX_KEYS = ('P', 'A', 'B', 'Q')


def setup_logging(log_dir: str):
    os.makedirs(log_dir, exist_ok=True)
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(os.path.join(log_dir, 'wishart.log')),
            logging.StreamHandler(sys.stderr)
        ]
    )


# input helpers

def read_matrix(value: str, dim: Optional[int] = None) -> np.ndarray:
    """A matrix argument: 'I' (needs dim) or a path to {"dim": r, "rows": [...]}"""
    from utils.tracepoly import load_matrix

    if value == 'I':
        if not dim:
            raise BadInputError("the identity needs --dim")
        return np.eye(dim)
    try:
        with open(value, 'r', encoding='utf-8') as f:
            return load_matrix(f.read())
    except OSError as e:
        raise BadInputError(f"cannot read matrix file {value}: {e}")


def parse_kv(items: List[str], dim: Optional[int] = None) -> Dict[str, Any]:
    """key=value arguments; values parse as JSON where possible, matrices from files"""
    parsed: Dict[str, Any] = {}
    for item in items:
        key, sep, value = item.partition('=')
        if not sep:
            raise BadInputError(f"expected key=value, got {item}")
        if key in MATRIX_KEYS:
            parsed[key] = read_matrix(value, dim)
            continue
        try:
            parsed[key] = json.loads(value)
        except json.JSONDecodeError:
            parsed[key] = value
    return parsed


def rng_from(args):
    from utils.sampling import RngSpec

    return RngSpec(args.seed, args.stream)


# output helpers

def to_plain(value: Any) -> Any:
    """Convert engine values to JSON-ready structures"""
    from pipelines.bounds import BoundReport
    from utils.partitions import SetPartition
    from utils.tracepoly import RLaurent, TracePolynomial

    if isinstance(value, TracePolynomial):
        return {'polynomial': value.to_json_obj(), 'pretty': value.pretty()}
    if isinstance(value, RLaurent):
        return {'laurent': value.to_json(), 'pretty': value.pretty()}
    if isinstance(value, SetPartition):
        return value.to_json()
    if isinstance(value, BoundReport):
        return to_plain(value.to_json())
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, pd.DataFrame):
        return value.to_dict(orient='records')
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if hasattr(value, 'to_json'):
        return to_plain(value.to_json())
    return value


def pretty_text(value: Any) -> str:
    from utils.tracepoly import RLaurent, TracePolynomial

    if isinstance(value, (TracePolynomial, RLaurent)):
        return value.pretty()
    if isinstance(value, pd.DataFrame):
        return value.to_string(index=False)
    if isinstance(value, dict):
        return "\n".join(f"{k}: {pretty_text(v)}" for k, v in value.items())
    if isinstance(value, (list, tuple)) and value and not isinstance(value[0], (int, float, Fraction)):
        return "\n".join(pretty_text(v) for v in value)
    plain = to_plain(value)
    return plain if isinstance(plain, str) else json.dumps(plain)


def emit(result: Any, args, tag: str, route: Optional[str] = None):
    """Write a result to stdout with a provenance header"""
    provenance = {
        'formula': tag,
        'route': route,
        'caps': {key: CONFIG[key] for key in ('wick_cap', 'h_cap', 'recursion_cap', 'enum_cap')},
        'seed': args.seed,
        'stream': args.stream,
    }
    fmt = args.format.upper()
    if fmt == 'JSON':
        print(json.dumps({'provenance': provenance, 'result': to_plain(result)}, indent=2))
        return
    for key, value in provenance.items():
        print(f"# {key}: {json.dumps(value)}")
    if fmt == 'CSV':
        if isinstance(result, pd.DataFrame):
            frame = result
        elif isinstance(result, list) and result and isinstance(result[0], dict):
            frame = pd.DataFrame([to_plain(r) for r in result])
        elif isinstance(result, dict):
            frame = pd.DataFrame([{'key': str(k), 'value': json.dumps(to_plain(v))} for k, v in result.items()])
        else:
            frame = pd.DataFrame([{'value': json.dumps(to_plain(result))}])
        sys.stdout.write(frame.to_csv(index=False))
    else:
        print(pretty_text(result))


# subcommands

def run_partitions(args):
    """Enumerate set partitions of [n] in a class"""
    from utils.partitions import enumerate_partitions, iota, is_crossing

    rows = []
    for p in enumerate_partitions(args.n, args.m, args.cls, args.method):
        row = {'blocks': p.to_json(), 'm': p.m, 'crossing': is_crossing(p)}
        if not row['crossing']:
            row['iota'] = iota(p)
        rows.append(row)
    if args.format.upper() == 'PRETTY':
        result = [" ".join("{" + ",".join(map(str, b)) + "}" for b in row['blocks']) for row in rows]
        emit("\n".join(result) if result else "(none)", args, 'set partitions')
    else:
        emit(rows, args, 'set partitions', args.method)


def run_counts(args):
    """Evaluate a counting sequence"""
    from utils.specnum import count

    emit(count(args.kind, args.args), args, f"count {args.kind.upper()}")


def _evaluate(value, args):
    """Apply --eval to a polynomial: I (symbolic or numeric dimension) or a matrix file"""
    if args.eval is None:
        return value
    if args.eval == 'I':
        laurent = value.eval_isotropic()
        if args.dim is None or args.dim == 'r':
            return laurent
        return laurent.evaluate(int(args.dim))
    return value.eval_numeric(read_matrix(args.eval))


def run_moment(args):
    """Finite-N and partition-class moment polynomials"""
    from pipelines.moments import (hn_moment, m_circ_nm, m_nm, m_plus, pn_moment, series_at, series_numeric,
                                   series_pretty)

    kind = args.kind
    if kind in ('m', 'mcirc'):
        if args.extra is None:
            raise BadInputError(f"moment --kind {kind} needs n and m")
        value = (m_nm if kind == 'm' else m_circ_nm)(args.n, args.extra)
        emit(_evaluate(value, args), args, f"M{'' if kind == 'm' else '°'}_{{{args.n},{args.extra}}}", 'WICK')
        return
    if kind == 'mplus':
        emit(_evaluate(m_plus(args.n, args.route or 'RECURSION'), args), args, f"M+_{{{2 * args.n},{args.n}}}",
             args.route or 'RECURSION')
        return

    series = hn_moment(args.n, args.convention) if kind == 'hn' else pn_moment(args.n, args.centered, args.convention)
    tag = f"E({'H_N' if kind == 'hn' else ('(P_N - P)' if args.centered else 'P_N')}^{args.n})"
    if args.extra is None:
        if args.eval == 'I':
            result = {str(e): c.eval_isotropic() for e, c in sorted(series.items(), reverse=True)}
        elif args.format.upper() == 'PRETTY':
            result = series_pretty(series)
        else:
            result = {str(e): c for e, c in sorted(series.items(), reverse=True)}
        emit(result, args, tag, args.convention)
        return
    if args.eval is not None and args.eval != 'I':
        emit(series_numeric(series, args.extra, read_matrix(args.eval)), args, tag, args.convention)
        return
    emit(_evaluate(series_at(series, args.extra), args), args, f"{tag} at N={args.extra}", args.convention)


def run_sigma(args):
    """Leading trace polynomials Sigma_n and Sigma°_{n,m}"""
    from pipelines.moments import sigma, sigma_circ, sigma_trace

    route = (args.route or 'RECURSION').upper()
    if args.circ is not None:
        value = sigma_circ(args.n, args.circ, route)
        tag = f"Sigma°_{{{args.n},{args.circ}}}"
    elif args.trace:
        value, table = sigma_trace(args.n)
        if args.format.upper() == 'CSV':
            emit([{'mu': json.dumps(row['mu']), 'coefficient': str(row['coefficient'])} for row in table],
                 args, f"Tr(Sigma_{args.n})", 'MULTINOMIAL')
            return
        tag = f"Tr(Sigma_{args.n})"
        route = 'MULTINOMIAL'
    else:
        value = sigma(args.n, route)
        tag = f"Sigma_{args.n}"
    emit(_evaluate(value, args), args, tag, route)


def run_iso(args):
    """Isotropic (P = I) values"""
    from pipelines.moments import isotropic

    emit(isotropic(args.kind, parse_kv(args.args)), args, f"isotropic {args.kind.upper()}")


def run_limits(args):
    """Large-dimension limit laws"""
    from pipelines.limit_laws import limits

    params = parse_kv(args.args)
    if isinstance(params.get('rho'), str):
        params['rho'] = Fraction(params['rho'])
    if isinstance(params.get('tau'), str):
        params['tau'] = [Fraction(t) for t in params['tau'].split(',')]
    elif isinstance(params.get('tau'), (int, float)):
        params['tau'] = [params['tau']]
    emit(limits(args.kind, params), args, f"limit {args.kind.upper()}")


def run_verify(args):
    """Run a named verification suite; fails with exit code 1 on any failed check"""
    from pipelines.verify import SUITES, VerificationSuite

    suites = SUITES if args.suite == 'all' else (args.suite,)
    suite = VerificationSuite(args.n, args.trials, args.instances, rng=rng_from(args), workers=args.workers,
                              output_dir=os.path.join(args.output_dir, 'verify'))
    results = suite.run(suites)
    emit({'suites': results, 'checks': suite.checks, 'failures': suite.failures}, args, f"verify {args.suite}")
    if not all(results.values()):
        raise CheckFailedError(f"{len(suite.failures)} failed checks in {args.suite}")


def run_sample(args):
    """Monte Carlo moment estimate against the exact polynomial"""
    from pipelines.moments import hn_moment, pn_moment, series_numeric
    from utils.sampling import empirical_moment
    from utils.wick import moment_H

    P = read_matrix(args.matrix, args.dim_size)
    target = args.target.upper()
    estimate = empirical_moment(P, args.N, args.n, target, args.trials, rng_from(args), args.workers)
    result = estimate.to_json()
    if target == 'H_POWER':
        expected = moment_H(args.n).eval_numeric(P) if args.n % 2 == 0 else np.zeros_like(P)
    elif target == 'HN_POWER':
        expected = series_numeric(hn_moment(args.n), args.N, P)
    else:
        expected = series_numeric(pn_moment(args.n, target == 'CENTERED_POWER'), args.N, P)
    result['expected'] = expected
    result['within_4_stderr'] = estimate.within(expected)
    emit(result, args, f"Monte Carlo {target} n={args.n}", 'MT19937')


def run_spectra(args):
    """Pooled eigenvalue histogram with limiting-density overlays"""
    from utils.sampling import spectral_histogram

    P = read_matrix(args.matrix, args.dim_size)
    df = spectral_histogram(P, args.N, args.trials, args.bins, args.kind, rng_from(args), args.workers)
    output = Path(args.output_dir) / 'spectra'
    output.mkdir(parents=True, exist_ok=True)
    df.to_csv(output / f"histogram_{args.kind.lower()}.csv", index=False)
    emit(df, args, f"spectral histogram {args.kind.upper()}", 'MT19937')


def run_bounds(args):
    """Laplace transforms, thresholds and inequality checks"""
    from pipelines import bounds

    params = parse_kv(args.args, args.dim_size)
    action = args.action
    if action == 'eps':
        eps, v = bounds.eps_v(int(params['n']), int(params['N']))
        emit({'eps': eps, 'v': v}, args, 'eps_n(N), v_n')
    elif action == 'laplace':
        emit(bounds.laplace(args.kind, params), args, f"Laplace {args.kind.upper()}")
    elif action == 'legendre':
        emit(bounds.legendre(args.kind, params), args, f"Legendre {args.kind.upper()}")
    elif action == 'threshold':
        emit(bounds.concentration_threshold(args.kind, params), args, f"threshold {args.kind.upper()}")
    elif action == 'coverage':
        report = bounds.coverage_experiment(args.kind, params, args.trials, rng_from(args), args.workers)
        emit(report, args, f"coverage {args.kind.upper()}", 'MT19937')
    elif action == 'moment-norms':
        emit(bounds.moment_norm_check(params['P'], int(params['n']), int(params['N'])), args, 'moment norm bounds')
    elif action == 'matrix-laplace':
        emit(bounds.matrix_laplace_ineq(params['P'], float(params['t'])), args, 'matrix Laplace inequalities')
    elif action == 'rank1':
        x = np.asarray(params['x'], dtype=float)
        y = np.asarray(params['y'], dtype=float)
        emit(bounds.rank1_trace_power(x, y, params['P'], int(params['n'])), args, 'rank-one trace power')
    elif action == 'trace-moments':
        reports = bounds.trace_moment_check(params['A'], params['P'], int(params['N']), int(params['n']),
                                            float(params['alpha']), float(params['beta']))
        emit(reports, args, 'trace moment gaps')
    elif action == 'subgaussian':
        emit(bounds.subgaussian_check(params['A'], params['P'], int(params['N']), float(params['t'])), args,
             'sub-Gaussian log-Laplace bounds')
    elif action == 'hyperbolic':
        reports = bounds.hyperbolic_moment_check(params['P'], float(params['t']), int(params['N']), args.trials,
                                                 rng_from(args), args.workers)
        emit(reports, args, 'cosh/sinh moment bounds', 'MT19937')
    elif action == 'opnorm-expectation':
        reports = bounds.opnorm_expectation_check(params['P'], int(params['N']), args.trials, rng_from(args),
                                                  args.workers)
        emit(reports, args, 'expected operator norm bounds', 'MT19937')
    elif action == 'sweep':
        stats = bounds.CoverageSweep(params['P'], params['A'], int(params.get('N', 400)), args.trials,
                                     rng=rng_from(args), workers=args.workers,
                                     output_dir=os.path.join(args.output_dir, 'bounds')).generate()
        emit(stats, args, 'coverage sweep', 'MT19937')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Wishart Moments - exact moment formulae, limit laws and concentration bounds",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Available commands:
  partitions              - Enumerate set partitions of [n] by class
  counts                  - Counting sequences (Catalan, Narayana, Riordan, ...)
  moment                  - Moment polynomials M, M+, M°, E(H_N^n), E(P_N^n)
  sigma                   - Leading trace polynomials Sigma_n and Sigma°_{n,m}
  iso                     - Isotropic (P = I) values
  limits                  - Marchenko-Pastur and semicircle limits
  verify                  - Cross-route and oracle verification suites
  sample                  - Monte Carlo moment estimates
  spectra                 - Pooled eigenvalue histograms
  bounds                  - Laplace transforms, thresholds and inequality checks

Examples:
  python main.py counts catalan 3
  python main.py moment --kind mplus 2 --eval I --dim r
  python main.py sigma 4 --circ 2 --route CLOSED_FORM
  python main.py limits MP_MOMENT_ISO n=4 rho=1/2
  python main.py verify sigma-routes --n 6
  python main.py bounds legendre --kind LSTAR u=3
  python main.py bounds threshold --kind OPNORM P=I delta=1 N=1000 --dim-size 2
        """
    )
    parser.add_argument('--format', default=CONFIG['format'], type=str.upper, choices=FORMATS, help='Output format')
    parser.add_argument('--seed', type=int, default=CONFIG['seed'], help='Random seed')
    parser.add_argument('--stream', type=int, default=CONFIG['stream'], help='Random stream index')
    parser.add_argument('--workers', type=int, default=None, help='Parallel workers for Monte Carlo trials')
    parser.add_argument('--output-dir', default=CONFIG['output_dir'], help='Directory for generated files')

    subparsers = parser.add_subparsers(dest='command', help='Command to run')

    partitions_parser = subparsers.add_parser('partitions', help='Enumerate set partitions')
    partitions_parser.add_argument('n', type=int)
    partitions_parser.add_argument('m', type=int, nargs='?')
    partitions_parser.add_argument('--class', dest='cls', default='ALL', type=str.upper, help='Partition class')
    partitions_parser.add_argument('--method', default='recursion', choices=('recursion', 'filter', 'check'))

    counts_parser = subparsers.add_parser('counts', help='Evaluate a counting sequence')
    counts_parser.add_argument('kind')
    counts_parser.add_argument('args', nargs='*')

    moment_parser = subparsers.add_parser('moment', help='Moment polynomials')
    moment_parser.add_argument('--kind', required=True, choices=MOMENT_KINDS)
    moment_parser.add_argument('n', type=int)
    moment_parser.add_argument('extra', type=int, nargs='?', help='m for m/mcirc, N for hn/pn')
    moment_parser.add_argument('--centered', action='store_true')
    moment_parser.add_argument('--route', type=str.upper)
    moment_parser.add_argument('--convention', default='falling', choices=('falling', 'binomial'))
    moment_parser.add_argument('--eval', help="'I' or a matrix JSON file")
    moment_parser.add_argument('--dim', help="dimension for --eval I: 'r' keeps it symbolic")

    sigma_parser = subparsers.add_parser('sigma', help='Leading trace polynomials')
    sigma_parser.add_argument('n', type=int)
    sigma_parser.add_argument('--circ', type=int, metavar='M')
    sigma_parser.add_argument('--route', type=str.upper)
    sigma_parser.add_argument('--trace', action='store_true', help='Multinomial trace formula with its table')
    sigma_parser.add_argument('--eval', help="'I' or a matrix JSON file")
    sigma_parser.add_argument('--dim', help="dimension for --eval I: 'r' keeps it symbolic")

    iso_parser = subparsers.add_parser('iso', help='Isotropic values')
    iso_parser.add_argument('kind')
    iso_parser.add_argument('args', nargs='*', help='key=value arguments')

    limits_parser = subparsers.add_parser('limits', help='Limit laws')
    limits_parser.add_argument('kind')
    limits_parser.add_argument('args', nargs='*', help='key=value arguments (tau as a comma list)')

    verify_parser = subparsers.add_parser('verify', help='Verification suites')
    verify_parser.add_argument('suite')
    verify_parser.add_argument('--n', type=int, help='Largest order to check')
    verify_parser.add_argument('--trials', type=int, default=10000)
    verify_parser.add_argument('--instances', type=int, default=100)

    sample_parser = subparsers.add_parser('sample', help='Monte Carlo moment estimates')
    sample_parser.add_argument('--matrix', default='I', help="'I' or a matrix JSON file")
    sample_parser.add_argument('--dim-size', type=int, default=3)
    sample_parser.add_argument('--N', type=int, required=True)
    sample_parser.add_argument('--n', type=int, required=True)
    sample_parser.add_argument('--target', default='PN_POWER')
    sample_parser.add_argument('--trials', type=int, default=10000)

    spectra_parser = subparsers.add_parser('spectra', help='Eigenvalue histograms')
    spectra_parser.add_argument('--matrix', default='I', help="'I' or a matrix JSON file")
    spectra_parser.add_argument('--dim-size', type=int, default=200)
    spectra_parser.add_argument('--N', type=int, default=200)
    spectra_parser.add_argument('--trials', type=int, default=20)
    spectra_parser.add_argument('--bins', type=int, default=40)
    spectra_parser.add_argument('--kind', default='MP', type=str.upper, choices=('MP', 'SC'))

    bounds_parser = subparsers.add_parser('bounds', help='Bounds and inequality checks')
    bounds_parser.add_argument('action', choices=('eps', 'laplace', 'legendre', 'threshold', 'coverage',
                                                  'moment-norms', 'matrix-laplace', 'rank1', 'trace-moments',
                                                  'subgaussian', 'hyperbolic', 'opnorm-expectation', 'sweep'))
    bounds_parser.add_argument('args', nargs='*', help='key=value arguments; P, A as matrix files or I')
    bounds_parser.add_argument('--kind', default='', type=str.upper)
    bounds_parser.add_argument('--dim-size', type=int, help='Dimension for P=I or A=I')
    bounds_parser.add_argument('--trials', type=int, default=10000)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 2

    problems = validate_config(CONFIG)
    if problems:
        print("Invalid configuration:\n  " + "\n  ".join(problems), file=sys.stderr)
        return 2
    CONFIG.update(load_config({'workers': args.workers, 'seed': args.seed, 'stream': args.stream}))

    # Ensure logs and generated directories exist
    setup_logging(CONFIG['log_dir'])
    os.makedirs(args.output_dir, exist_ok=True)

    handlers = {
        'partitions': run_partitions,
        'counts': run_counts,
        'moment': run_moment,
        'sigma': run_sigma,
        'iso': run_iso,
        'limits': run_limits,
        'verify': run_verify,
        'sample': run_sample,
        'spectra': run_spectra,
        'bounds': run_bounds,
    }
    try:
        handlers[args.command](args)
    except WishartError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except (KeyError, ValueError, ZeroDivisionError) as e:
        logger.error(f"{args.command} failed on bad input: {e}")
        print(f"error: bad input: {e}", file=sys.stderr)
        return BadInputError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
