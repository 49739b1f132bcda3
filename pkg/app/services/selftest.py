"""Seeded property suites over every construction.

Each suite draws its instances from its own ``numpy.random.default_rng([seed, index])``
stream, so a report depends only on (seed, cases) and never on suite order.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np

from app.exceptions import OscillabError
from app.services import dualramsey, ellinf, rigidsurj, urysohn
from app.services.rigidsurj import EARigidSurjection
from app.services.seqcore import OMEGA, EPSeq, UPoint, horizon, normalize, shift, sup_abs, zero

logger = logging.getLogger(__name__)


@dataclass
class SuiteResult:
    """``cases`` counts drawn instances, ``checks`` the properties tested on them."""
    name: str
    cases: int = 0
    checks: int = 0
    violations: int = 0
    first_violation: Optional[str] = None

    def instances(self, items: Union[int, Iterable]) -> Iterator:
        for item in (range(items) if isinstance(items, int) else items):
            self.cases += 1
            yield item

    def check(self, ok: bool, message: str):
        self.checks += 1
        if not ok:
            self.violations += 1
            if self.first_violation is None:
                self.first_violation = message
            logger.warning(f"[{self.name}] violation: {message}")

    @property
    def passed(self) -> bool:
        return self.violations == 0


@dataclass
class SelftestReport:
    seed: int
    cases: int
    suites: List[SuiteResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def to_json(self) -> dict:
        return {
            'seed': self.seed,
            'cases': self.cases,
            'passed': self.passed,
            'suites': [
                {'name': s.name, 'cases': s.cases, 'checks': s.checks, 'violations': s.violations,
                 'first_violation': s.first_violation}
                for s in self.suites
            ],
        }


class InstanceGenerator:
    """Random instances with bounded denominators, drawn from a PCG64 stream."""

    def __init__(self, rng: np.random.Generator, max_den: int = 12, max_transient: int = 6,
                 max_period: int = 4):
        self.rng = rng
        self.max_den = max_den
        self.max_transient = max_transient
        self.max_period = max_period

    def integer(self, lo: int, hi: int) -> int:
        return int(self.rng.integers(lo, hi, endpoint=True))

    def unit(self, max_den: Optional[int] = None) -> Fraction:
        den = self.integer(1, max_den or self.max_den)
        return Fraction(self.integer(0, den), den)

    def signed_unit(self, max_den: Optional[int] = None) -> Fraction:
        value = self.unit(max_den)
        return -value if self.integer(0, 1) else value

    def upoint(self) -> UPoint:
        transient = [self.unit() for _ in range(self.integer(0, self.max_transient))]
        period = [self.unit() for _ in range(self.integer(1, self.max_period))]
        period[self.integer(0, len(period) - 1)] = Fraction(0)
        return UPoint.of(transient, period)

    def signed_seq(self) -> EPSeq:
        transient = [self.signed_unit() for _ in range(self.integer(0, self.max_transient))]
        period = [self.signed_unit() for _ in range(self.integer(1, self.max_period))]
        return EPSeq.of(transient, period)

    def growth(self, length: int, start: Tuple[int, ...] = ()) -> List[int]:
        values = list(start)
        for _ in range(length):
            top = max(values, default=-1)
            values.append(self.integer(0, top + 1) if values else 0)
        return values

    def ea_surjection(self, max_prefix: int = 6, start: Tuple[int, ...] = ()) -> EARigidSurjection:
        prefix = self.growth(self.integer(0, max_prefix), start)
        size, top = len(prefix), max(prefix, default=-1)
        offset = self.integer(max(0, size - top - 1), size)
        return EARigidSurjection.of(prefix, offset)

    def finitely_supported(self, signed: bool, max_support: int = 4, max_den: int = 10) -> EPSeq:
        size = self.integer(1, max_support)
        draw = self.signed_unit if signed else self.unit
        values = [draw(max_den) for _ in range(size)]
        values[self.integer(0, size - 1)] = Fraction(-1 if signed and self.integer(0, 1) else 1)
        return EPSeq.of(values, (0,))

    def metric_space(self, max_points: int = 5, den: int = 8) -> urysohn.FiniteMetricSpace:
        size = self.integer(1, max_points)
        d = [[Fraction(0)] * size for _ in range(size)]
        for i in range(size):
            for j in range(i + 1, size):
                d[i][j] = d[j][i] = Fraction(self.integer(1, den), den)
        # shortest-path closure turns any weights into a metric
        for mid, i, j in product(range(size), repeat=3):
            if d[i][mid] + d[mid][j] < d[i][j]:
                d[i][j] = d[i][mid] + d[mid][j]
        names = [chr(ord('A') + i) for i in range(size)]
        return urysohn.FiniteMetricSpace(tuple(names), tuple(tuple(row) for row in d))


def suite_sequences(gen: InstanceGenerator, cases: int) -> SuiteResult:
    res = SuiteResult('sequences')
    for _ in res.instances(cases):
        x, y = gen.signed_seq(), gen.signed_seq()
        i, j = gen.integer(0, 4), gen.integer(0, 4)
        raw = EPSeq(x.transient + x.period, x.period + x.period)
        span = horizon(x, raw) + 2
        res.check(normalize(x) == x, f"normalize not idempotent on {x!r}")
        res.check(normalize(raw) == x and raw.prefix(span) == x.prefix(span),
                  f"unrolled copy of {x!r} normalizes elsewhere")
        res.check(shift(shift(x, i), j) == shift(x, i + j), f"shift not additive on {x!r} by {i}, {j}")
        res.check(sup_abs(shift(x, j)) == sup_abs(x), f"shift by {j} moved the sup of {x!r}")
        res.check(sup_abs(x + y) <= sup_abs(x) + sup_abs(y), f"sup triangle fails on {x!r}, {y!r}")
        res.check(x - x == zero(), f"x - x != 0 for {x!r}")
    return res


def suite_monoid(gen: InstanceGenerator, cases: int) -> SuiteResult:
    res = SuiteResult('monoid')
    ident = EARigidSurjection.identity()
    for _ in res.instances(cases):
        p, q, r = gen.ea_surjection(), gen.ea_surjection(), gen.ea_surjection()
        x = gen.signed_seq()
        res.check(rigidsurj.compose(rigidsurj.compose(r, q), p) == rigidsurj.compose(r, rigidsurj.compose(q, p)),
                  f"composition not associative on {p!r}, {q!r}, {r!r}")
        res.check(rigidsurj.compose(ident, p) == p == rigidsurj.compose(p, ident), f"identity law fails on {p!r}")
        rp = rigidsurj.compose(r, p)
        res.check(all(rp(n) == r(p(n)) for n in range(len(rp.prefix) + 8)), f"r∘p not pointwise for {p!r}, {r!r}")
        res.check(rigidsurj.apply(x, ident) == x, f"identity moved {x!r}")
        res.check(rigidsurj.apply(x, rp) == rigidsurj.apply(rigidsurj.apply(x, r), p),
                  f"x∘(r∘p) != (x∘r)∘p for {x!r}, {p!r}, {r!r}")
    return res


def suite_pseudometric(gen: InstanceGenerator, cases: int) -> SuiteResult:
    res = SuiteResult('pseudometric')
    for _ in res.instances(cases):
        x, y, z = gen.upoint(), gen.upoint(), gen.upoint()
        dxy, dyz, dxz = urysohn.dist(x, y).d, urysohn.dist(y, z).d, urysohn.dist(x, z).d
        res.check(dxy == urysohn.dist(y, x).d, f"asymmetric on {x!r}, {y!r}")
        res.check(urysohn.dist(x, x).d == 0, f"d(x, x) != 0 for {x!r}")
        res.check(dxz <= dxy + dyz, f"triangle fails on {x!r}, {y!r}, {z!r}")
        res.check(0 <= dxy <= 1, f"d outside [0, 1] on {x!r}, {y!r}")
    return res


def suite_bounds(gen: InstanceGenerator, cases: int) -> SuiteResult:
    res = SuiteResult('bounds')
    for _ in res.instances(cases):
        x, y, z = gen.upoint(), gen.upoint(), gen.upoint()
        last = horizon(x, y, z)
        xy = [urysohn.prefix_bounds(x, y, n) for n in range(last + 1)] + [urysohn.prefix_bounds(x, y, OMEGA)]
        yz = [urysohn.prefix_bounds(y, z, n) for n in range(last + 1)] + [urysohn.prefix_bounds(y, z, OMEGA)]
        xz = [urysohn.prefix_bounds(x, z, n) for n in range(last + 1)] + [urysohn.prefix_bounds(x, z, OMEGA)]
        res.check(all(a.m_val <= b.m_val for a, b in zip(xy, xy[1:])), f"m not nondecreasing on {x!r}, {y!r}")
        res.check(all(a.M_val >= b.M_val for a, b in zip(xy, xy[1:])), f"M not nonincreasing on {x!r}, {y!r}")
        res.check(xy[0].m_val <= xy[0].M_val, f"m(0) > M(0) on {x!r}, {y!r}")
        res.check(xy[-1].M_val <= xy[-1].m_val, f"M(ω) > m(ω) on {x!r}, {y!r}")
        res.check(all(c.m_val <= a.m_val + b.m_val for a, b, c in zip(xy, yz, xz)),
                  f"m triangle fails on {x!r}, {y!r}, {z!r}")
        res.check(all(c.M_val <= a.M_val + b.m_val for a, b, c in zip(xy, yz, xz)),
                  f"M triangle fails on {x!r}, {y!r}, {z!r}")
        steps = zip(xy[:last], xy[1:last + 1])
        res.check(all(a.m_val == b.m_val or a.M_val == b.M_val or b.m_val <= b.M_val for a, b in steps),
                  f"no constant bound at some step on {x!r}, {y!r}")
    return res


def suite_witness(gen: InstanceGenerator, cases: int) -> SuiteResult:
    res = SuiteResult('witness')
    for _ in res.instances(cases):
        x, y = gen.upoint(), gen.upoint()
        result = urysohn.dist(x, y)
        m, M = urysohn.affine_bounds(x, y, result.witness_t)
        res.check(m == M == result.d, f"witness t={result.witness_t} fails on {x!r}, {y!r}")
        res.check(result.d <= urysohn.prefix_bounds(x, y, result.crossing).m_val,
                  f"d exceeds m at the crossing on {x!r}, {y!r}")
    return res


def suite_isometry(gen: InstanceGenerator, cases: int) -> SuiteResult:
    res = SuiteResult('isometry')
    for _ in res.instances(cases):
        x, y, p = gen.upoint(), gen.upoint(), gen.ea_surjection()
        xp, yp = rigidsurj.apply(x, p), rigidsurj.apply(y, p)
        res.check(urysohn.dist(xp, yp).d == urysohn.dist(x, y).d, f"action not isometric: {p!r}")
        s = gen.signed_seq()
        res.check(sup_abs(rigidsurj.apply(s, p)) == sup_abs(s), f"sup norm moved by {p!r}")
        transported = True
        for k in range(horizon(x, y) + 1):
            lo, hi = p.first_preimage(k), p.first_preimage(k + 1)
            base = urysohn.prefix_bounds(x, y, k)
            for n in range(lo, hi):
                moved = urysohn.prefix_bounds(xp, yp, n)
                transported &= (moved.m_val, moved.M_val) == (base.m_val, base.M_val)
        res.check(transported, f"index transport fails for {p!r}")
    return res


def suite_staircase(gen: InstanceGenerator, cases: int) -> SuiteResult:
    res = SuiteResult('staircase')
    for _ in res.instances(cases):
        k = gen.integer(1, 4)
        a = gen.finitely_supported(signed=False)
        offsets = [gen.integer(0, 3)]
        for _ in range(len(a.transient) - 1):
            offsets.append(offsets[-1] + 4 * k - 1 + gen.integer(0, 3))
        cert = ellinf.build_p(a, offsets, k)
        x = ellinf.unsigned_sum(a, offsets, k)
        y = EPSeq.of([ellinf.round_h(v, k) for v in x.transient], (0,))
        image = rigidsurj.apply(ellinf.make_xk(k).seq, cert.p)
        res.check(image == y, f"x_k∘p != h∘x for a={a!r}, offsets={offsets}, k={k}")
        res.check(sup_abs(x - image) == cert.distance <= Fraction(1, 2 * k),
                  f"distance {cert.distance} above 1/2k for a={a!r}, k={k}")
    return res


def suite_embedding_T(gen: InstanceGenerator, cases: int) -> SuiteResult:
    res = SuiteResult('embedding_T')
    for k in range(1, 7):
        res.check(ellinf.shift_pair_norm(k) == Fraction(1, k), f"||x_k + S(x_k)|| != 1/k at k={k}")
    for _ in res.instances(cases):
        k = gen.integer(1, 4)
        a = gen.finitely_supported(signed=True)
        target = ellinf.embed_T(a, k)
        res.check(sup_abs(target) == sup_abs(a), f"T not isometric on {a!r}")
        cert = ellinf.approximate_in_orbit(a, k)
        image = rigidsurj.apply(ellinf.make_xk(k).seq, cert.p)
        res.check(sup_abs(target - image) == cert.distance <= Fraction(2, k), f"bound 2/k fails on {a!r}, k={k}")
        x = ellinf.unsigned_sum(a, ellinf.orbit_offsets(a, k), k)
        res.check(sup_abs(target - x) <= Fraction(1, k), f"||T(a) - x|| above 1/k on {a!r}, k={k}")
    return res


def suite_embedding(gen: InstanceGenerator, cases: int) -> SuiteResult:
    res = SuiteResult('embedding')
    for _ in res.instances(cases):
        space, r = gen.metric_space(), gen.integer(1, 4)
        report = urysohn.embed_metric(space, r)
        pts = report.points
        iso = all(urysohn.dist(pts[i].f, pts[j].f).d == space.dist[i][j]
                  for i in range(len(pts)) for j in range(len(pts)))
        res.check(iso, f"embedding not isometric for {space.names} at r={r}")
        res.check(all(pt.membership_distance <= Fraction(1, 2 * r) for pt in pts),
                  f"membership above 1/2r for {space.names} at r={r}")
        shape = all(pt.f[0] == 1 and all(abs(pt.f[n + 1] - pt.f[n]) <= Fraction(1, r)
                                         for n in range(horizon(pt.f)))
                    for pt in pts)
        res.check(shape, f"f_x(0) != 1 or a step exceeds 1/r for {space.names} at r={r}")
    return res


def suite_prefix_agreement(gen: InstanceGenerator, cases: int) -> SuiteResult:
    res = SuiteResult('prefix_agreement')
    for _ in res.instances(cases):
        r = gen.integer(1, 4)
        p = gen.ea_surjection()
        n = p.first_preimage(r)
        q = gen.ea_surjection(start=tuple(p(i) for i in range(n + 1)))
        wr = urysohn.make_wr(r)
        d = urysohn.dist(rigidsurj.apply(wr, p), rigidsurj.apply(wr, q)).d
        res.check(d == 0, f"d(w_r∘p, w_r∘q) = {d} for p={p!r}, q={q!r}, r={r}")
    return res


def suite_combinatorics(gen: InstanceGenerator, cases: int) -> SuiteResult:
    res = SuiteResult('combinatorics')
    for n in range(1, 9):
        for m in res.instances(range(1, n + 1)):
            found = rigidsurj.enumerate_rigid(n, m)
            res.check(len(found) == rigidsurj.stirling2(n, m), f"count of [{n}] -> [{m}] is {len(found)}")
            res.check(len(set(found)) == len(found), f"duplicates in [{n}] -> [{m}]")
    for n in res.instances(range(1, 7)):
        every = [f for m in range(1, n + 1) for f in rigidsurj.enumerate_rigid(n, m)]
        parts = {f: rigidsurj.to_ordered_partition(f) for f in every}
        for f in every:
            res.check(rigidsurj.from_ordered_partition(parts[f]) == f, f"partition round trip fails on {f!r}")
        agree = True
        for q, p in product(every, repeat=2):
            r = rigidsurj.factorize(q, p)
            agree &= (r is not None) == rigidsurj.is_coarsening(parts[q], parts[p])
            if r is not None:
                agree &= rigidsurj.compose_finite(r, p) == q
        res.check(agree, f"factorization and coarsening disagree on [{n}]")
    return res


def suite_ramsey(gen: InstanceGenerator, cases: int) -> SuiteResult:
    res = SuiteResult('ramsey')
    for _ in res.instances(cases):
        n = gen.integer(2, 5)
        k = gen.integer(1, min(2, n))
        m = gen.integer(k, n)
        kind = gen.integer(0, 2)
        if kind == 0:
            table = dualramsey.position_mod_coloring(n, k, gen.integer(0, n - 1), gen.integer(1, 3))
        elif kind == 1:
            colors = {f.values: gen.integer(0, 1) for f in rigidsurj.enumerate_rigid(n, k)}
            table = dualramsey.table_coloring(n, k, 2, colors)
        else:
            table = dualramsey.xk_orbit_coloring(n, k, gen.signed_seq(), gen.integer(1, 2), gen.integer(2, 3))
        w = dualramsey.search_monochromatic(table, m)
        if w is None:
            continue
        outer = rigidsurj.enumerate_rigid(m, k)
        res.check(all(table[rigidsurj.compose_finite(r, w.p)] == w.color for r in outer),
                  f"witness {list(w.p.values)} not monochromatic")
        res.check(all(rigidsurj.factorize(rigidsurj.compose_finite(r, w.p), w.p) == r for r in outer),
                  f"factorize does not recover r through {list(w.p.values)}")
    return res


# (name, suite, share of the requested case count)
SUITES: List[Tuple[str, Callable[[InstanceGenerator, int], SuiteResult], Fraction]] = [
    ('sequences', suite_sequences, Fraction(1, 2)),
    ('monoid', suite_monoid, Fraction(1, 2)),
    ('pseudometric', suite_pseudometric, Fraction(1)),
    ('bounds', suite_bounds, Fraction(1)),
    ('witness', suite_witness, Fraction(1, 2)),
    ('isometry', suite_isometry, Fraction(1, 2)),
    ('staircase', suite_staircase, Fraction(1, 5)),
    ('embedding_T', suite_embedding_T, Fraction(1, 5)),
    ('embedding', suite_embedding, Fraction(1, 5)),
    ('prefix_agreement', suite_prefix_agreement, Fraction(1, 5)),
    ('combinatorics', suite_combinatorics, Fraction(0)),
    ('ramsey', suite_ramsey, Fraction(1, 20)),
]


def run_selftest(seed: int, cases: int, only: Optional[List[str]] = None, **bounds) -> SelftestReport:
    report = SelftestReport(seed=seed, cases=cases)
    for index, (name, suite, share) in enumerate(SUITES):
        if only and name not in only:
            continue
        gen = InstanceGenerator(np.random.default_rng([seed, index]), **bounds)
        count = max(1, int(cases * share)) if share else 0
        try:
            result = suite(gen, count)
        except OscillabError as e:
            logger.error(f"suite {name} aborted: {e}")
            result = SuiteResult(name, cases=1, checks=1, violations=1, first_violation=f"{type(e).__name__}: {e}")
        logger.info(f"suite {name}: {result.cases} cases, {result.checks} checks, {result.violations} violations")
        report.suites.append(result)
    return report
