#!/usr/bin/env python3
"""
Trace polynomials in a generic covariance matrix P

A monomial is coeff * prod_i Tr(P^i)^{v[i]} * P^w with an exact rational
coefficient. Tr(P^0) is the dimension symbol r. Scalar trace factors commute
with everything, so the monomials form a commutative ring and all moment
recursions reduce to bookkeeping on (v, w) keys.
"""

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

from utils.errors import BadInputError

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]
TraceKey = Tuple[Tuple[int, int], ...]
Key = Tuple[TraceKey, int]

GAMMA_KINDS = ('GAMMA', 'OMEGA', 'GAMMABAR', 'GAMMA_UNCENTERED')

_SUPERSCRIPTS = str.maketrans('-0123456789', '⁻⁰¹²³⁴⁵⁶⁷⁸⁹')


def _fraction_text(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def _parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def _merge_traces(a: TraceKey, b: TraceKey) -> TraceKey:
    if not a:
        return b
    if not b:
        return a
    merged: Dict[int, int] = dict(a)
    for i, e in b:
        merged[i] = merged.get(i, 0) + e
    return tuple(sorted(merged.items()))


def _add_trace(v: TraceKey, i: int, e: int = 1) -> TraceKey:
    return _merge_traces(v, ((i, e),))


def _sort_key(key: Key):
    v, w = key
    return (-w, v)


class RLaurent:
    """Laurent polynomial in the dimension symbol r with rational coefficients"""

    __slots__ = ('_coeffs',)

    def __init__(self, coeffs: Optional[Mapping[int, Scalar]] = None):
        cleaned = {}
        for power, c in (coeffs or {}).items():
            c = Fraction(c)
            if c:
                cleaned[int(power)] = c
        self._coeffs = cleaned

    @classmethod
    def one(cls) -> 'RLaurent':
        return cls({0: 1})

    @classmethod
    def r(cls, power: int = 1) -> 'RLaurent':
        return cls({power: 1})

    @classmethod
    def constant(cls, c: Scalar) -> 'RLaurent':
        return cls({0: c})

    @property
    def coeffs(self) -> Dict[int, Fraction]:
        return dict(self._coeffs)

    def coefficient(self, power: int) -> Fraction:
        return self._coeffs.get(power, Fraction(0))

    def top_power(self) -> Optional[int]:
        return max(self._coeffs) if self._coeffs else None

    def _coerce(self, other) -> 'RLaurent':
        if isinstance(other, RLaurent):
            return other
        if isinstance(other, (int, Fraction)):
            return RLaurent.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        result = dict(self._coeffs)
        for p, c in other._coeffs.items():
            result[p] = result.get(p, 0) + c
        return RLaurent(result)

    __radd__ = __add__

    def __neg__(self):
        return RLaurent({p: -c for p, c in self._coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        result: Dict[int, Fraction] = {}
        for p, c in self._coeffs.items():
            for q, d in other._coeffs.items():
                result[p + q] = result.get(p + q, 0) + c * d
        return RLaurent(result)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self._coeffs) != 1:
                raise BadInputError("only monomials in r can be inverted")
            (p, c), = self._coeffs.items()
            return RLaurent({p * k: c ** k})
        result = RLaurent.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(tuple(sorted(self._coeffs.items())))

    def __bool__(self):
        return bool(self._coeffs)

    def evaluate(self, r: Scalar) -> Fraction:
        return sum((c * Fraction(r) ** p for p, c in self._coeffs.items()), Fraction(0))

    def __repr__(self):
        return f"RLaurent({self.pretty()})"

    def pretty(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for power in sorted(self._coeffs):
            c = self._coeffs[power]
            magnitude = abs(c)
            if power == 0:
                body = str(magnitude)
            else:
                symbol = "r" if power == 1 else "r" + str(power).translate(_SUPERSCRIPTS)
                body = symbol if magnitude == 1 else f"{magnitude}{symbol}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    __str__ = pretty

    def to_json(self) -> Dict[str, str]:
        return {str(p): _fraction_text(self._coeffs[p]) for p in sorted(self._coeffs)}


@dataclass(frozen=True)
class TraceMonomial:
    coeff: Fraction
    v: TraceKey
    w: int

    @property
    def degree(self) -> int:
        return sum(i * e for i, e in self.v) + self.w

    @property
    def trace_factors(self) -> int:
        return sum(e for _, e in self.v)


class TracePolynomial:
    """Exact linear combination of trace monomials, kept in canonical form"""

    __slots__ = ('_terms',)

    def __init__(self, terms: Optional[Mapping[Key, Scalar]] = None):
        cleaned = {}
        for key, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                cleaned[key] = c
        self._terms = cleaned

    # constructors

    @classmethod
    def zero(cls) -> 'TracePolynomial':
        return cls()

    @classmethod
    def one(cls) -> 'TracePolynomial':
        return cls({((), 0): 1})

    @classmethod
    def identity(cls) -> 'TracePolynomial':
        return cls.one()

    @classmethod
    def P(cls, power: int = 1) -> 'TracePolynomial':
        return cls({((), power): 1})

    @classmethod
    def tr(cls, power: int = 1, exponent: int = 1) -> 'TracePolynomial':
        """The scalar Tr(P^power)^exponent (times I)"""
        if exponent == 0:
            return cls.one()
        return cls({(((power, exponent),), 0): 1})

    @classmethod
    def monomial(cls, coeff: Scalar, v: Mapping[int, int], w: int) -> 'TracePolynomial':
        key = tuple(sorted((i, e) for i, e in v.items() if e))
        return cls({(key, w): coeff})

    @classmethod
    def scalar(cls, c: Scalar) -> 'TracePolynomial':
        return cls({((), 0): c})

    # access

    @property
    def terms(self) -> List[TraceMonomial]:
        return [TraceMonomial(self._terms[k], k[0], k[1]) for k in sorted(self._terms, key=_sort_key)]

    def items(self) -> Iterable[Tuple[Key, Fraction]]:
        return self._terms.items()

    def coefficient(self, v: Mapping[int, int], w: int) -> Fraction:
        key = tuple(sorted((i, e) for i, e in v.items() if e))
        return self._terms.get((key, w), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_scalar(self) -> bool:
        return all(w == 0 for _, w in self._terms)

    def __len__(self):
        return len(self._terms)

    # ring operations

    def _coerce(self, other) -> 'TracePolynomial':
        if isinstance(other, TracePolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return TracePolynomial.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        result = dict(self._terms)
        for key, c in other._terms.items():
            result[key] = result.get(key, 0) + c
        return TracePolynomial(result)

    __radd__ = __add__

    def __neg__(self):
        return TracePolynomial({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TracePolynomial({k: c * other for k, c in self._terms.items()})
        if not isinstance(other, TracePolynomial):
            return NotImplemented
        result: Dict[Key, Fraction] = {}
        for (v1, w1), c1 in self._terms.items():
            for (v2, w2), c2 in other._terms.items():
                key = (_merge_traces(v1, v2), w1 + w2)
                result[key] = result.get(key, 0) + c1 * c2
        return TracePolynomial(result)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise BadInputError("negative powers of trace polynomials are not defined")
        result = TracePolynomial.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(sorted(self._terms.items(), key=lambda kv: _sort_key(kv[0]))))

    def __bool__(self):
        return bool(self._terms)

    # structural maps

    def mul_P(self, power: int = 1) -> 'TracePolynomial':
        return TracePolynomial({(v, w + power): c for (v, w), c in self._terms.items()})

    def trace(self) -> 'TracePolynomial':
        """Move the matrix part into the traces: P^w -> Tr(P^w), with Tr(I) = r"""
        result: Dict[Key, Fraction] = {}
        for (v, w), c in self._terms.items():
            key = (_add_trace(v, w), 0)
            result[key] = result.get(key, 0) + c
        return TracePolynomial(result)

    def gamma(self, which: str = 'GAMMA') -> 'TracePolynomial':
        """
        The linear maps driving the Catalan-type recursions, applied per term:
        OMEGA(Q) = 2PQP, GAMMABAR(Q) = Tr(PQ)P, GAMMA = OMEGA/2 + GAMMABAR,
        GAMMA_UNCENTERED(Q) = E[XQX] = 2PQP + Tr(PQ)P for symmetric Q.
        """
        which = which.upper()
        if which not in GAMMA_KINDS:
            raise BadInputError(f"unknown operator {which}, expected one of {GAMMA_KINDS}")
        square = {'GAMMA': 1, 'OMEGA': 2, 'GAMMABAR': 0, 'GAMMA_UNCENTERED': 2}[which]
        with_trace = which != 'OMEGA'
        result: Dict[Key, Fraction] = {}
        for (v, w), c in self._terms.items():
            if square:
                key = (v, w + 2)
                result[key] = result.get(key, 0) + square * c
            if with_trace:
                key = (_add_trace(v, w + 1), 1)
                result[key] = result.get(key, 0) + c
        return TracePolynomial(result)

    def divide_trace(self, power: int) -> 'TracePolynomial':
        """Exact division by Tr(P^power); every term must carry that factor"""
        result: Dict[Key, Fraction] = {}
        for (v, w), c in self._terms.items():
            exponents = dict(v)
            if exponents.get(power, 0) < 1:
                raise BadInputError(f"term {v} is not divisible by Tr(P^{power})")
            exponents[power] -= 1
            key = (tuple(sorted((i, e) for i, e in exponents.items() if e)), w)
            result[key] = result.get(key, 0) + c
        return TracePolynomial(result)

    def substitute_traces(self, values: Mapping[int, Scalar]) -> Dict[int, Fraction]:
        """Replace each Tr(P^i) by values[i]; returns the coefficient of each P^w"""
        result: Dict[int, Fraction] = {}
        for (v, w), c in self._terms.items():
            value = Fraction(c)
            for i, e in v:
                if i not in values:
                    raise BadInputError(f"no value supplied for Tr(P^{i})")
                value *= Fraction(values[i]) ** e
            result[w] = result.get(w, 0) + value
        return {w: c for w, c in result.items() if c}

    # evaluation

    def eval_numeric(self, P: np.ndarray) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 1:
            raise BadInputError(f"expected a square matrix, got shape {P.shape}")
        dim = P.shape[0]
        max_power = 0
        for v, w in self._terms:
            max_power = max([max_power, w] + [i for i, _ in v])
        powers = [np.eye(dim)]
        for _ in range(max_power):
            powers.append(powers[-1] @ P)
        traces = [float(np.trace(Pk)) for Pk in powers]
        traces[0] = float(dim)

        result = np.zeros((dim, dim))
        for (v, w), c in self._terms.items():
            factor = float(c)
            for i, e in v:
                factor *= traces[i] ** e
            result += factor * powers[w]
        return result

    def eval_isotropic(self) -> RLaurent:
        """Value at P = I_r: every Tr(P^i) becomes r, every P^w becomes I"""
        result: Dict[int, Fraction] = {}
        for (v, _), c in self._terms.items():
            power = sum(e for _, e in v)
            result[power] = result.get(power, 0) + c
        return RLaurent(result)

    def class_check(self, p: int, q: int, strict: bool = False) -> bool:
        """Degree at most p and at most (strict: exactly) q trace factors in every term"""
        for term in self.terms:
            if term.degree > p:
                return False
            if strict and term.trace_factors != q:
                return False
            if not strict and term.trace_factors > q:
                return False
        return True

    # serialization

    def to_json_obj(self) -> Dict[str, list]:
        terms = []
        for term in self.terms:
            terms.append({
                'c': _fraction_text(term.coeff),
                'v': {str(i): e for i, e in term.v},
                'w': term.w,
            })
        return {'terms': terms}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(',', ':'))

    @classmethod
    def from_json(cls, data: Union[str, Mapping]) -> 'TracePolynomial':
        if isinstance(data, str):
            data = json.loads(data)
        terms: Dict[Key, Fraction] = {}
        try:
            for term in data['terms']:
                v = tuple(sorted((int(i), int(e)) for i, e in term['v'].items() if int(e)))
                key = (v, int(term['w']))
                terms[key] = terms.get(key, 0) + _parse_fraction(term['c'])
        except (KeyError, TypeError, ValueError) as e:
            raise BadInputError(f"malformed trace polynomial JSON: {e}")
        return cls(terms)

    def pretty(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for term in self.terms:
            factors = []
            for i, e in term.v:
                base = "r" if i == 0 else ("Tr(P)" if i == 1 else f"Tr(P^{i})")
                factors.append(base if e == 1 else f"{base}^{e}")
            if term.w == 1:
                factors.append("P")
            elif term.w > 1:
                factors.append(f"P^{term.w}")
            elif not factors:
                factors.append("I")
            magnitude = abs(term.coeff)
            body = " ".join(factors)
            if magnitude != 1:
                body = f"{magnitude} {body}"
            if not parts:
                parts.append(body if term.coeff > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if term.coeff > 0 else f"- {body}")
        return " ".join(parts)

    __str__ = pretty

    def __repr__(self):
        return f"TracePolynomial({self.pretty()})"


def arith(a: TracePolynomial, b: Union[TracePolynomial, Scalar], op: str) -> TracePolynomial:
    op = op.upper()
    if op == 'ADD':
        return a + b
    if op == 'SUB':
        return a - b
    if op == 'MUL':
        return a * b
    if op == 'SCALE':
        if not isinstance(b, (int, Fraction)):
            raise BadInputError("SCALE takes a rational scalar")
        return a * Fraction(b)
    raise BadInputError(f"unknown operation {op}")


def mul_P(a: TracePolynomial) -> TracePolynomial:
    return a.mul_P()


def trace(a: TracePolynomial) -> TracePolynomial:
    return a.trace()


def gamma_ops(a: TracePolynomial, which: str) -> TracePolynomial:
    return a.gamma(which)


def gamma_matrix(Q: np.ndarray, P: np.ndarray, which: str = 'GAMMA') -> np.ndarray:
    """
    Numeric versions for a general (not necessarily symmetric) Q:
    GAMMA(Q) = E[(X-P) Q (X-P)] = P Q' P + Tr(PQ) P and
    GAMMA_UNCENTERED(Q) = E[X Q X] = P Q P + P Q' P + Tr(PQ) P.
    """
    Q = np.asarray(Q, dtype=float)
    P = np.asarray(P, dtype=float)
    if Q.shape != P.shape:
        raise BadInputError(f"dimension mismatch {Q.shape} vs {P.shape}")
    which = which.upper()
    if which == 'OMEGA':
        return P @ Q @ P + P @ Q.T @ P
    if which == 'GAMMABAR':
        return np.trace(P @ Q) * P
    if which == 'GAMMA':
        return P @ Q.T @ P + np.trace(P @ Q) * P
    if which == 'GAMMA_UNCENTERED':
        return P @ Q @ P + P @ Q.T @ P + np.trace(P @ Q) * P
    raise BadInputError(f"unknown operator {which}, expected one of {GAMMA_KINDS}")


def load_matrix(data: Union[str, Mapping]) -> np.ndarray:
    """Read a matrix in the {"dim": r, "rows": [[...], ...]} layout"""
    if isinstance(data, str):
        data = json.loads(data)
    try:
        rows = np.asarray(data['rows'], dtype=float)
        dim = int(data.get('dim', rows.shape[0]))
    except (KeyError, TypeError, ValueError) as e:
        raise BadInputError(f"malformed matrix JSON: {e}")
    if rows.ndim != 2 or rows.shape != (dim, dim):
        raise BadInputError(f"matrix rows have shape {rows.shape}, expected ({dim}, {dim})")
    return rows


def dump_matrix(M: np.ndarray) -> Dict[str, object]:
    M = np.asarray(M, dtype=float)
    return {'dim': int(M.shape[0]), 'rows': M.tolist()}
