"""The sequence model of the Urysohn sphere.

Points are [0, 1]-valued eventually periodic sequences with liminf 0. The
pseudometric d(x, y) is read off where the running sup of |x - y| (m) meets
the running inf of x + y (M). Rigid surjections act by isometries, and every
finite metric space of diameter at most 1 embeds isometrically into the
1/2r-fattened orbit of the staircase w_r.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import ceil, floor
from typing import List, Sequence, Tuple, Union

from app.exceptions import DomainError, PropertyViolation
from app.services.rigidsurj import EARigidSurjection, apply, ea_to_json
from app.services.seqcore import (
    OMEGA, EPSeq, IndexOrOmega, Omega, UPoint, entry, format_rational, horizon, seq_to_json,
    to_rational, upoint,
)

logger = logging.getLogger(__name__)

HullPoint = Tuple[Fraction, ...]


class DistanceCase(Enum):
    EQUAL = "equal"
    SUP_CONSTANT = "m_constant"
    INF_CONSTANT = "M_constant"


@dataclass(frozen=True)
class PrefixBounds:
    m_val: Fraction
    M_val: Fraction
    n: IndexOrOmega


@dataclass(frozen=True)
class DistanceResult:
    d: Fraction
    crossing: IndexOrOmega
    case_tag: DistanceCase
    witness_t: Union[Fraction, Omega]


@dataclass(frozen=True)
class FiniteMetricSpace:
    names: Tuple[str, ...]
    dist: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        object.__setattr__(self, 'names', names)
        size = len(names)
        if size == 0:
            raise DomainError("metric space must have at least one point")
        if len(set(names)) != size:
            raise DomainError("point names must be distinct")
        if len(self.dist) != size or any(len(row) != size for row in self.dist):
            raise DomainError(f"distance matrix must be {size}x{size}")
        matrix = tuple(tuple(to_rational(v) for v in row) for row in self.dist)
        object.__setattr__(self, 'dist', matrix)
        for i in range(size):
            if matrix[i][i] != 0:
                raise DomainError(f"d({names[i]}, {names[i]}) must be 0")
            for j in range(size):
                if matrix[i][j] != matrix[j][i]:
                    raise DomainError(f"d({names[i]}, {names[j]}) is not symmetric")
                if not 0 <= matrix[i][j] <= 1:
                    raise DomainError(f"d({names[i]}, {names[j]}) outside [0, 1]: diameter must be at most 1")
                for l in range(size):
                    if matrix[i][l] > matrix[i][j] + matrix[j][l]:
                        raise DomainError(
                            f"triangle inequality fails for {names[i]}, {names[j]}, {names[l]}")

    def __len__(self):
        return len(self.names)


@dataclass(frozen=True)
class PointEmbedding:
    name: str
    f: UPoint
    p: EARigidSurjection
    membership_distance: Fraction


@dataclass(frozen=True)
class EmbeddingReport:
    r: int
    points: Tuple[PointEmbedding, ...]
    tour_transient: Tuple[HullPoint, ...]
    tour_cycle: Tuple[HullPoint, ...]


def _require_r(r: int):
    if not isinstance(r, int) or isinstance(r, bool) or r < 1:
        raise DomainError(f"r must be a positive integer, got {r!r}")


def _as_upoint(x: EPSeq) -> UPoint:
    return x if isinstance(x, UPoint) else upoint(x)


def _scan(x: EPSeq, y: EPSeq, last: int) -> Tuple[List[Fraction], List[Fraction]]:
    """Running m and M at 0..last."""
    ms, Ms = [], []
    for k in range(last + 1):
        a, b = entry(x, k), entry(y, k)
        ms.append(max(ms[-1], abs(a - b)) if ms else abs(a - b))
        Ms.append(min(Ms[-1], a + b) if Ms else a + b)
    return ms, Ms


def prefix_bounds(x: EPSeq, y: EPSeq, n: IndexOrOmega) -> PrefixBounds:
    if n is not OMEGA and n < 0:
        raise DomainError(f"negative index {n}")
    x, y = _as_upoint(x), _as_upoint(y)
    # past the horizon both running values are frozen
    stable = horizon(x, y) - 1
    last = stable if n is OMEGA else min(n, stable)
    ms, Ms = _scan(x, y, last)
    return PrefixBounds(m_val=ms[-1], M_val=Ms[-1], n=n)


def affine_bounds(x: EPSeq, y: EPSeq, t: Union[Fraction, Omega]) -> Tuple[Fraction, Fraction]:
    """m and M extended affinely on each [n, n + 1]."""
    if t is OMEGA:
        b = prefix_bounds(x, y, OMEGA)
        return b.m_val, b.M_val
    t = to_rational(t)
    if t < 0:
        raise DomainError("t must be nonnegative")
    base = floor(t)
    frac = t - base
    lo = prefix_bounds(x, y, base)
    if frac == 0:
        return lo.m_val, lo.M_val
    hi = prefix_bounds(x, y, base + 1)
    return (lo.m_val + frac * (hi.m_val - lo.m_val),
            lo.M_val + frac * (hi.M_val - lo.M_val))


def crossing_index(x: EPSeq, y: EPSeq) -> int:
    """Least n with M(x, y, n) <= m(x, y, n)."""
    x, y = _as_upoint(x), _as_upoint(y)
    ms, Ms = _scan(x, y, horizon(x, y) - 1)
    for n, (m, M) in enumerate(zip(ms, Ms)):
        if M <= m:
            return n
    # m and M are stable past the horizon and liminf 0 forces M <= m there
    raise PropertyViolation("m and M never crossed before stabilizing")


def dist(x: EPSeq, y: EPSeq) -> DistanceResult:
    x, y = _as_upoint(x), _as_upoint(y)
    n = crossing_index(x, y)
    ms, Ms = _scan(x, y, n)
    if ms[n] == Ms[n]:
        return DistanceResult(d=ms[n], crossing=n, case_tag=DistanceCase.EQUAL, witness_t=Fraction(n))
    k = n - 1
    if ms[k] == ms[n]:
        d = ms[k]
        t = k + (Ms[k] - d) / (Ms[k] - Ms[n])
        return DistanceResult(d=d, crossing=n, case_tag=DistanceCase.SUP_CONSTANT, witness_t=t)
    if Ms[k] == Ms[n]:
        d = Ms[k]
        t = k + (d - ms[k]) / (ms[n] - ms[k])
        return DistanceResult(d=d, crossing=n, case_tag=DistanceCase.INF_CONSTANT, witness_t=t)
    raise PropertyViolation(f"neither m nor M constant across the crossing step {k} -> {n}")


def oscillation(points: Sequence[EPSeq]) -> Fraction:
    """sup of pairwise distances over the sample."""
    if not points:
        raise DomainError("oscillation needs at least one point")
    return max((dist(a, b).d for a, b in combinations(points, 2)), default=Fraction(0))


def in_fattening(y: EPSeq, centers: Sequence[EPSeq], eps) -> bool:
    eps = to_rational(eps)
    return any(dist(c, y).d <= eps for c in centers)


def make_wr(r: int) -> UPoint:
    _require_r(r)
    return UPoint.of([Fraction(r - n, r) for n in range(r + 1)], (0,))


def _bucket(value: Fraction, r: int) -> int:
    """The k <= r with value in ((2(r-k)-1)/2r, (2(r-k)+1)/2r]."""
    level = ceil((2 * r * value - 1) / 2)
    return r - level


def orbit_projection(y: EPSeq, r: int) -> Tuple[EARigidSurjection, Fraction]:
    """p with d(w_r∘p, y) <= 1/2r, for y starting at 1 with steps of at most 1/r."""
    _require_r(r)
    y = _as_upoint(y)
    if entry(y, 0) != 1:
        raise DomainError(f"orbit projection needs y(0) = 1, got {format_rational(entry(y, 0))}")
    span = horizon(y)
    step = Fraction(1, r)
    for n in range(span):
        if abs(entry(y, n + 1) - entry(y, n)) > step:
            raise DomainError(f"step |y({n + 1}) - y({n})| exceeds 1/r = {format_rational(step)}")
    half = Fraction(1, 2 * r)
    start = next((n for n in range(span) if entry(y, n) <= half), None)
    if start is None:
        raise DomainError(f"y never drops to 1/2r = {format_rational(half)}")

    prefix = [_bucket(entry(y, n), r) for n in range(start)]
    p = EARigidSurjection.of(prefix, start - r)
    distance = dist(apply(make_wr(r), p), y).d
    if distance > half:
        raise PropertyViolation(f"d(w_r∘p, y) = {format_rational(distance)} exceeds 1/2r")
    return p, distance


def _sup_distance(u: HullPoint, v: HullPoint) -> Fraction:
    return max(abs(a - b) for a, b in zip(u, v))


def _segment(u: HullPoint, v: HullPoint, r: int) -> List[HullPoint]:
    """Points after u on [u, v], in ceil(r·|u - v|) equal steps of length at most 1/r."""
    steps = ceil(r * _sup_distance(u, v))
    return [tuple(a + Fraction(j, steps) * (b - a) for a, b in zip(u, v)) for j in range(1, steps + 1)]


def kuratowski_images(space: FiniteMetricSpace) -> List[HullPoint]:
    """y -> d(x, y) over X ⊔ {*}, with d(x, *) = 1; the last image is *."""
    size = len(space)
    images = [tuple(space.dist[i]) + (Fraction(1),) for i in range(size)]
    images.append(tuple(Fraction(1) for _ in range(size)) + (Fraction(0),))
    return images


def embed_metric(space: FiniteMetricSpace, r: int) -> EmbeddingReport:
    _require_r(r)
    images = kuratowski_images(space)
    star, size = images[-1], len(space)

    transient: List[HullPoint] = [star] + _segment(star, images[0], r)
    cycle: List[HullPoint] = []
    for i in range(size):
        cycle += _segment(images[i], images[(i + 1) % size], r)
    if not cycle:
        cycle = [images[0]]

    points = []
    for i, name in enumerate(space.names):
        f = UPoint.of([_sup_distance(images[i], y) for y in transient],
                      [_sup_distance(images[i], y) for y in cycle])
        p, distance = orbit_projection(f, r)
        points.append(PointEmbedding(name=name, f=f, p=p, membership_distance=distance))
    logger.debug(f"embedded {size} points at r={r} with tour {len(transient)} + {len(cycle)}")
    return EmbeddingReport(r=r, points=tuple(points), tour_transient=tuple(transient), tour_cycle=tuple(cycle))


def space_from_json(data: dict) -> FiniteMetricSpace:
    if not isinstance(data, dict) or not isinstance(data.get('points'), list) \
            or not isinstance(data.get('dist'), list):
        raise DomainError("metric space JSON needs 'points' and 'dist' lists")
    if any(not isinstance(row, list) for row in data['dist']):
        raise DomainError("'dist' must be a list of rows")
    return FiniteMetricSpace(tuple(data['points']), tuple(tuple(row) for row in data['dist']))


def space_to_json(space: FiniteMetricSpace) -> dict:
    return {
        'points': list(space.names),
        'dist': [[format_rational(v) for v in row] for row in space.dist],
    }


def _index_to_json(n: Union[int, Fraction, Omega]):
    if n is OMEGA:
        return 'ω'
    if isinstance(n, Fraction):
        return format_rational(n)
    return n


def bounds_to_json(b: PrefixBounds) -> dict:
    return {'m': format_rational(b.m_val), 'M': format_rational(b.M_val), 'n': _index_to_json(b.n)}


def distance_to_json(res: DistanceResult) -> dict:
    return {
        'd': format_rational(res.d),
        'crossing': _index_to_json(res.crossing),
        'case': res.case_tag.value,
        'witness_t': _index_to_json(res.witness_t),
    }


def embedding_to_json(report: EmbeddingReport) -> dict:
    return {
        'r': report.r,
        'points': [
            {
                'name': pt.name,
                'f': seq_to_json(pt.f),
                'p': ea_to_json(pt.p),
                'membership_distance': format_rational(pt.membership_distance),
            }
            for pt in report.points
        ],
        'tour': {
            'transient': [[format_rational(v) for v in y] for y in report.tour_transient],
            'cycle': [[format_rational(v) for v in y] for y in report.tour_cycle],
        },
    }
