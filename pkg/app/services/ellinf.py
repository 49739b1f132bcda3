"""Orbit approximation in ℓ∞ by the staircase vector x_k.

The action of rigid surjections on sequences is by composition, x -> x∘p.
``build_p`` finds, for a nonnegative disjoint sum of shifted copies of x_k,
a p with x_k∘p equal to the entrywise rounding of that sum; ``approximate_in_orbit``
uses it to put every T(a) within 2/k of the orbit of x_k.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Dict, List, Optional, Sequence

from app.exceptions import DomainError, PropertyViolation
from app.services.rigidsurj import EARigidSurjection, apply, ea_to_json
from app.services.seqcore import (
    EPSeq, add_scaled, entry, format_rational, horizon, normalize, shift, sup_abs, to_rational, zero,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class XkVector:
    k: int
    seq: EPSeq


@dataclass(frozen=True)
class ApproximationCertificate:
    p: EARigidSurjection
    distance: Fraction
    bound: Fraction
    k: int
    intermediate: Fraction = field(default=Fraction(0))

    def __post_init__(self):
        if self.distance > self.bound:
            raise PropertyViolation(
                f"distance {format_rational(self.distance)} exceeds bound {format_rational(self.bound)}")


def _require_k(k: int):
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")


def make_xk(k: int) -> XkVector:
    _require_k(k)
    up = [Fraction(j, k) for j in range(1, k + 1)]
    down = [Fraction(j, k) for j in range(k - 1, 0, -1)]
    values = [Fraction(0)]
    for u in up + down:
        values += [u, -u]
    return XkVector(k, EPSeq.of(values, (0,)))


def has_xk_properties(x: EPSeq, k: int) -> bool:
    """(i) |x(n)| moves by at most 1/k per step; (ii) every -u < 0 is preceded by u."""
    step = Fraction(1, k)
    values = x.prefix(horizon(x) + 1)
    for n in range(len(values) - 1):
        if abs(abs(values[n + 1]) - abs(values[n])) > step:
            return False
    for n, v in enumerate(values):
        if v < 0 and (n == 0 or values[n - 1] != -v):
            return False
    return True


def round_h(u, k: int) -> Fraction:
    """Snap u in [-1, 1] to a multiple of 1/k, brackets as (2l+1)/2k < u <= (2l+3)/2k."""
    _require_k(k)
    u = to_rational(u)
    if abs(u) > 1:
        raise DomainError(f"h is defined on [-1, 1], got {format_rational(u)}")
    if u < 0:
        return -round_h(-u, k)
    if u <= Fraction(1, 2 * k):
        return Fraction(0)
    level = max(0, ceil((2 * k * u - 3) / 2))
    return Fraction(level + 1, k)


def h_table(k: int) -> Dict[Fraction, Fraction]:
    _require_k(k)
    return {Fraction(j, 4 * k): round_h(Fraction(j, 4 * k), k) for j in range(-4 * k, 4 * k + 1)}


def _finite_support(a: EPSeq) -> EPSeq:
    if not a.is_finitely_supported:
        raise DomainError("a must be finitely supported (period [0])")
    return normalize(a)


def _disjoint_sum(coeffs: Sequence[Fraction], offsets: Sequence[int], xk: EPSeq) -> EPSeq:
    total = zero()
    for coeff, offset in zip(coeffs, offsets):
        if coeff != 0:
            total = add_scaled(total, shift(xk, offset), 1, coeff)
    return total


def _lookup(values: Sequence[Fraction], target: Fraction, lo: int, hi: int) -> Optional[int]:
    for m in range(lo, hi + 1):
        if values[m] == target:
            return m
    return None


def build_p(a: EPSeq, offsets: Sequence[int], k: int) -> ApproximationCertificate:
    """p with x_k∘p = h∘x for x = Σ a(i)·S^{n_i}(x_k); distance at most 1/2k."""
    _require_k(k)
    a = _finite_support(a)
    coeffs = list(a.transient)
    if any(v < 0 for v in coeffs):
        raise DomainError("a must be nonnegative")
    if sup_abs(a) != 1:
        raise DomainError(f"sup of a must be 1 and attained, got {format_rational(sup_abs(a))}")
    offsets = list(offsets)
    if len(offsets) != len(coeffs):
        raise DomainError(f"need one offset per index up to the last support index ({len(coeffs)}), "
                          f"got {len(offsets)}")
    if any(o < 0 for o in offsets):
        raise DomainError("offsets must be natural numbers")
    for i in range(len(offsets) - 1):
        if offsets[i + 1] - offsets[i] < 4 * k - 1:
            raise DomainError(f"gap n_{i + 1} - n_{i} = {offsets[i + 1] - offsets[i]} is below 4k - 1 = {4 * k - 1}")

    xk = make_xk(k).seq
    x = _disjoint_sum(coeffs, offsets, xk)
    y = EPSeq.of([round_h(v, k) for v in x.transient], (0,))
    if not has_xk_properties(y, k):
        raise PropertyViolation("h∘x lost the staircase properties of x_k")

    threshold = Fraction(2 * k - 1, 2 * k)
    i0 = next(i for i, v in enumerate(coeffs) if v > threshold)
    anchor = offsets[i0] + 2 * k
    run_end = anchor + 2 * k - 1
    start = max(len(y.transient), run_end)
    table = xk.prefix(4 * k)
    prefix: List[int] = []

    # first appearances of 0, 1/k, -1/k, ..., 1, -1 up to the anchor
    for n in range(anchor + 1):
        m = _lookup(table, entry(y, n), 0, 2 * k)
        if m is None:
            raise PropertyViolation(f"y({n}) = {format_rational(entry(y, n))} not among x_k(0..2k)")
        prefix.append(m)
    # forced descent after -1
    for n in range(1, 2 * k - 1):
        if entry(y, anchor + n) != table[2 * k + n]:
            raise PropertyViolation(f"y({anchor + n}) breaks the forced descent after -1")
        prefix.append(2 * k + n)
    for n in range(run_end, start):
        v = entry(y, n)
        if v != 0:
            m = _lookup(table, v, 1, 2 * k)
            if m is None:
                raise PropertyViolation(f"y({n}) = {format_rational(v)} not among x_k(1..2k)")
            prefix.append(m)
        else:
            prefix.append(max(prefix) + 1)

    # past ``start`` y vanishes, so every new index takes a fresh value
    p = EARigidSurjection.of(prefix, start - (max(prefix) + 1))
    image = apply(xk, p)
    if image != y:
        raise PropertyViolation("x_k∘p differs from h∘x")
    distance = sup_abs(x - image)
    logger.debug(f"build_p k={k} i0={i0} anchor={anchor} distance={format_rational(distance)}")
    return ApproximationCertificate(p=p, distance=distance, bound=Fraction(1, 2 * k), k=k)


def embed_T(a: EPSeq, k: int) -> EPSeq:
    """T(a) = Σ a(i)·S^{4ki}(x_k), a linear isometry."""
    _require_k(k)
    a = _finite_support(a)
    if sup_abs(a) > 1:
        raise DomainError("embed_T expects sup |a| <= 1")
    xk = make_xk(k).seq
    return _disjoint_sum(a.transient, [4 * k * i for i in range(len(a.transient))], xk)


def orbit_offsets(a: EPSeq, k: int) -> List[int]:
    return [4 * k * i + (1 if v < 0 else 0) for i, v in enumerate(a.transient)]


def unsigned_sum(a: EPSeq, offsets: Sequence[int], k: int) -> EPSeq:
    return _disjoint_sum([abs(v) for v in a.transient], offsets, make_xk(k).seq)


def sup_distance(x: EPSeq, y: EPSeq) -> Fraction:
    return sup_abs(x - y)


def in_sup_fattening(y: EPSeq, centers: Sequence[EPSeq], eps) -> bool:
    """y lies within sup distance eps of some centre."""
    eps = to_rational(eps)
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    return any(sup_distance(c, y) <= eps for c in centers)


def shift_pair_norm(k: int) -> Fraction:
    xk = make_xk(k).seq
    return sup_abs(xk + shift(xk, 1))


def approximate_in_orbit(a: EPSeq, k: int) -> ApproximationCertificate:
    """p with ||T(a) - x_k∘p|| <= 2/k."""
    _require_k(k)
    a = _finite_support(a)
    if sup_abs(a) != 1:
        raise DomainError(f"sup |a| must be 1 and attained, got {format_rational(sup_abs(a))}")
    offsets = orbit_offsets(a, k)
    magnitudes = EPSeq.of([abs(v) for v in a.transient], (0,))
    rounded = build_p(magnitudes, offsets, k)

    target = embed_T(a, k)
    x = unsigned_sum(a, offsets, k)
    intermediate = sup_abs(target - x)
    if intermediate > Fraction(1, k):
        raise PropertyViolation(f"||T(a) - x|| = {format_rational(intermediate)} exceeds 1/k")
    distance = sup_abs(target - apply(make_xk(k).seq, rounded.p))
    logger.debug(f"approximate_in_orbit k={k} distance={format_rational(distance)}")
    return ApproximationCertificate(p=rounded.p, distance=distance, bound=Fraction(2, k), k=k,
                                    intermediate=intermediate)


def certificate_to_json(cert: ApproximationCertificate) -> dict:
    return {
        'p': ea_to_json(cert.p),
        'distance': format_rational(cert.distance),
        'bound': format_rational(cert.bound),
        'intermediate': format_rational(cert.intermediate),
        'k': cert.k,
    }
