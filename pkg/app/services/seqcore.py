"""Exact rational scalars and eventually periodic sequences.

Every numeric value handled by the services is a ``fractions.Fraction``; an
infinite sequence is stored as a finite transient followed by a repeating
period and is kept in a canonical form so that structural equality is
semantic equality.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import lcm
from typing import Iterable, List, Tuple, Union

from app.exceptions import DomainError

logger = logging.getLogger(__name__)

Rational = Fraction
RationalLike = Union[Fraction, int, str]


@total_ordering
class Omega:
    """The index ω, above every natural number."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return 'ω'

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash('omega')

    def __lt__(self, other):
        if isinstance(other, (int, Omega)):
            return False
        return NotImplemented


OMEGA = Omega()
IndexOrOmega = Union[int, Omega]


def to_rational(value: RationalLike) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise DomainError(f"exact rational expected, got {value!r}")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"not a rational literal: {value!r}")
    raise DomainError(f"exact rational expected, got {type(value).__name__}")


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: RationalLike) -> Fraction:
    return to_rational(text)


def to_decimal(q: Fraction, places: int = 6) -> str:
    """Approximate display only; rounds half to even at ``places`` digits."""
    scaled = round(q * 10 ** places)
    sign = '-' if scaled < 0 else ''
    digits = str(abs(scaled)).rjust(places + 1, '0')
    return f"{sign}{digits[:-places]}.{digits[-places:]}" if places else f"{sign}{digits}"


@dataclass(frozen=True, eq=False)
class EPSeq:
    """n -> transient[n] below len(transient), period[(n - len(transient)) % len(period)] above."""
    transient: Tuple[Fraction, ...]
    period: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, 'transient', tuple(to_rational(v) for v in self.transient))
        object.__setattr__(self, 'period', tuple(to_rational(v) for v in self.period))
        if not self.period:
            raise DomainError("period must be nonempty")

    @classmethod
    def of(cls, transient: Iterable[RationalLike] = (), period: Iterable[RationalLike] = (0,)):
        return normalize(cls(tuple(transient), tuple(period)))

    def __getitem__(self, n: int) -> Fraction:
        return entry(self, n)

    def prefix(self, n: int) -> List[Fraction]:
        return [entry(self, i) for i in range(n)]

    def values(self) -> Tuple[Fraction, ...]:
        return self.transient + self.period

    @property
    def is_finitely_supported(self) -> bool:
        return all(v == 0 for v in self.period)

    def __eq__(self, other):
        if not isinstance(other, EPSeq):
            return NotImplemented
        return self.transient == other.transient and self.period == other.period

    def __hash__(self):
        return hash((self.transient, self.period))

    def __neg__(self):
        return add_scaled(self, self, -1, 0)

    def __add__(self, other):
        return add_scaled(self, other, 1, 1)

    def __sub__(self, other):
        return add_scaled(self, other, 1, -1)

    def __repr__(self):
        head = ', '.join(format_rational(v) for v in self.transient)
        tail = ', '.join(format_rational(v) for v in self.period)
        return f"{type(self).__name__}([{head}] + ([{tail}])*)"


@dataclass(frozen=True, eq=False, repr=False)
class UPoint(EPSeq):
    """A point of the sequence model of the Urysohn sphere: [0, 1]-valued, liminf 0."""

    def __post_init__(self):
        super().__post_init__()
        if any(v < 0 or v > 1 for v in self.values()):
            raise DomainError("U-point entries must lie in [0, 1]")
        if min(self.period) != 0:
            raise DomainError("U-point must have liminf 0 (a zero in its period)")


def entry(x: EPSeq, n: int) -> Fraction:
    if n < 0:
        raise DomainError(f"negative index {n}")
    if n < len(x.transient):
        return x.transient[n]
    return x.period[(n - len(x.transient)) % len(x.period)]


def normalize(x: EPSeq) -> EPSeq:
    period = list(x.period)
    size = len(period)
    for d in range(1, size + 1):
        if size % d == 0 and all(period[i] == period[i + d] for i in range(size - d)):
            period = period[:d]
            break
    transient = list(x.transient)
    while transient and transient[-1] == period[-1]:
        transient.pop()
        period = [period[-1]] + period[:-1]
    return type(x)(tuple(transient), tuple(period))


def horizon(*seqs: EPSeq) -> int:
    """Common transient length plus common period: past it every sequence repeats."""
    return max(len(s.transient) for s in seqs) + lcm(*(len(s.period) for s in seqs))


def sup_abs(x: EPSeq) -> Fraction:
    return max(abs(v) for v in x.values())


def add_scaled(x: EPSeq, y: EPSeq, alpha: RationalLike, beta: RationalLike) -> EPSeq:
    alpha, beta = to_rational(alpha), to_rational(beta)
    start = max(len(x.transient), len(y.transient))
    size = lcm(len(x.period), len(y.period))
    values = [alpha * entry(x, n) + beta * entry(y, n) for n in range(start + size)]
    return EPSeq.of(values[:start], values[start:])


def shift(x: EPSeq, j: int) -> EPSeq:
    if j < 0:
        raise DomainError(f"shift amount must be natural, got {j}")
    return type(x).of((0,) * j + x.transient, x.period)


def upoint(x: EPSeq) -> UPoint:
    return UPoint.of(x.transient, x.period)


def zero() -> EPSeq:
    return EPSeq.of((), (0,))


def seq_to_json(x: EPSeq) -> dict:
    return {
        'transient': [format_rational(v) for v in x.transient],
        'period': [format_rational(v) for v in x.period],
    }


def seq_from_json(data: dict, cls=EPSeq) -> EPSeq:
    if not isinstance(data, dict) or 'period' not in data:
        raise DomainError("sequence JSON needs 'transient' and 'period' lists")
    transient = data.get('transient', [])
    period = data['period']
    if not isinstance(transient, list) or not isinstance(period, list):
        raise DomainError("'transient' and 'period' must be lists")
    return cls.of(transient, period)
