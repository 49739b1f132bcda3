"""Finite dual Ramsey search.

Colour the rigid surjections [n] -> [k] and look for a rigid p: [n] -> [m]
such that every r∘p, r rigid [m] -> [k], gets the same colour.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from math import floor
from typing import Dict, List, Optional, Tuple

from app.exceptions import DomainError, PropertyViolation
from app.services.ellinf import in_sup_fattening, make_xk, sup_distance
from app.services.rigidsurj import (
    FiniteRigidSurjection, apply, compose_finite, enumerate_rigid, extend_finite, finite_from_json,
    finite_to_json, is_rigid, iter_rigid,
)
from app.services.seqcore import EPSeq, seq_from_json, sup_abs, to_rational, UPoint
from app.services.urysohn import dist, make_wr

logger = logging.getLogger(__name__)


class ColoringKind(Enum):
    TABLE = "table"
    POSITION_MOD = "position_mod"
    ORBIT = "orbit"
    XK_ORBIT = "xk_orbit"
    XK_FATTENING = "xk_fattening"


@dataclass(frozen=True)
class ColoringTable:
    n: int
    k: int
    num_colors: int
    colors: Dict[FiniteRigidSurjection, int] = field(hash=False)
    kind: ColoringKind = ColoringKind.TABLE

    def __post_init__(self):
        if self.num_colors < 1:
            raise DomainError("a colouring needs at least one colour")
        expected = enumerate_rigid(self.n, self.k)
        missing = [f for f in expected if f not in self.colors]
        if missing:
            raise DomainError(f"colouring is not total: {list(missing[0].values)} has no colour")
        if len(self.colors) != len(expected):
            raise DomainError(f"colouring has entries outside [{self.n}] -> [{self.k}]")
        bad = [c for c in self.colors.values() if not 0 <= c < self.num_colors]
        if bad:
            raise DomainError(f"colour {bad[0]} outside 0..{self.num_colors - 1}")

    def __getitem__(self, f: FiniteRigidSurjection) -> int:
        return self.colors[f]


@dataclass(frozen=True)
class MonochromaticWitness:
    p: FiniteRigidSurjection
    color: int


def table_coloring(n: int, k: int, num_colors: int,
                   entries: Dict[Tuple[int, ...], int]) -> ColoringTable:
    colors = {FiniteRigidSurjection(tuple(values)): c for values, c in entries.items()}
    return ColoringTable(n, k, num_colors, colors, ColoringKind.TABLE)


def position_mod_coloring(n: int, k: int, position: int, modulus: int) -> ColoringTable:
    """colour(f) = f(position) mod modulus."""
    if not 0 <= position < n:
        raise DomainError(f"position {position} outside [{n}]")
    if modulus < 1:
        raise DomainError("modulus must be positive")
    colors = {f: f.values[position] % modulus for f in enumerate_rigid(n, k)}
    return ColoringTable(n, k, modulus, colors, ColoringKind.POSITION_MOD)


def orbit_coloring(n: int, k: int, target: EPSeq, r: int, buckets: int) -> ColoringTable:
    """colour(f) = bucket of d(w_r∘f, target), f continued by its affine tail."""
    if buckets < 1:
        raise DomainError("need at least one bucket")
    wr = make_wr(r)
    colors = {}
    for f in enumerate_rigid(n, k):
        d = dist(apply(wr, extend_finite(f)), target).d
        colors[f] = min(buckets - 1, floor(buckets * d))
    return ColoringTable(n, k, buckets, colors, ColoringKind.ORBIT)


def _xk_orbit_points(n: int, k: int, xk: int) -> Dict[FiniteRigidSurjection, EPSeq]:
    """f -> x_k∘f, f continued by its affine tail."""
    seq = make_xk(xk).seq
    return {f: apply(seq, extend_finite(f)) for f in enumerate_rigid(n, k)}


def xk_orbit_coloring(n: int, k: int, target: EPSeq, xk: int, buckets: int) -> ColoringTable:
    """colour(f) = bucket of ||x_k∘f - target|| on [0, 2]."""
    if buckets < 1:
        raise DomainError("need at least one bucket")
    if sup_abs(target) > 1:
        raise DomainError("target must lie in the unit ball")
    colors = {f: min(buckets - 1, floor(buckets * sup_distance(point, target) / 2))
              for f, point in _xk_orbit_points(n, k, xk).items()}
    return ColoringTable(n, k, buckets, colors, ColoringKind.XK_ORBIT)


def xk_fattening_coloring(n: int, k: int, centers: List[EPSeq], xk: int, eps) -> ColoringTable:
    """colour(f) = 1 when x_k∘f lies in the eps-fattening of the centres, else 0."""
    if not centers:
        raise DomainError("fattening needs at least one centre")
    eps = to_rational(eps)
    colors = {f: int(in_sup_fattening(point, centers, eps)) for f, point in _xk_orbit_points(n, k, xk).items()}
    return ColoringTable(n, k, 2, colors, ColoringKind.XK_FATTENING)


def verify_witness(table: ColoringTable, w: MonochromaticWitness) -> bool:
    if not is_rigid(w.p.values):
        return False
    if w.p.domain != table.n or w.p.codomain < table.k:
        return False
    return all(table[compose_finite(r, w.p)] == w.color for r in enumerate_rigid(w.p.codomain, table.k))


def search_monochromatic(table: ColoringTable, m: int) -> Optional[MonochromaticWitness]:
    """Lexicographically first p: [n] -> [m] whose family {r∘p} is monochromatic."""
    if not table.k <= m <= table.n:
        raise DomainError(f"need k <= m <= n, got k={table.k}, m={m}, n={table.n}")
    outer = enumerate_rigid(m, table.k)
    scanned = 0
    for p in iter_rigid(table.n, m):
        scanned += 1
        color = None
        for r in outer:
            c = table[compose_finite(r, p)]
            if color is None:
                color = c
            elif c != color:
                break
        else:
            witness = MonochromaticWitness(p, color)
            if not verify_witness(table, witness):
                raise PropertyViolation(f"witness {list(p.values)} failed recomputation")
            logger.debug(f"monochromatic witness after {scanned} candidates")
            return witness
    logger.debug(f"no monochromatic witness among {scanned} candidates")
    return None


def instance_from_json(data: dict) -> Tuple[ColoringTable, int]:
    try:
        n, k, m = int(data['n']), int(data['k']), int(data['m'])
        coloring = data['coloring']
        kind = ColoringKind(coloring['kind'])
        if not 1 <= k <= m <= n:
            raise DomainError(f"need 1 <= k <= m <= n, got k={k}, m={m}, n={n}")
        if kind is ColoringKind.TABLE:
            entries = {tuple(finite_from_json(item).values): int(item['color'])
                       for item in coloring.get('entries', [])}
            num_colors = int(coloring.get('num_colors', max(entries.values(), default=0) + 1))
            table = table_coloring(n, k, num_colors, entries)
        elif kind is ColoringKind.POSITION_MOD:
            table = position_mod_coloring(n, k, int(coloring['position']), int(coloring['modulus']))
        elif kind is ColoringKind.ORBIT:
            target = seq_from_json(coloring['target'], cls=UPoint)
            table = orbit_coloring(n, k, target, int(coloring['r']), int(coloring['buckets']))
        elif kind is ColoringKind.XK_ORBIT:
            target = seq_from_json(coloring['target'])
            table = xk_orbit_coloring(n, k, target, int(coloring['xk']), int(coloring['buckets']))
        else:
            centers = [seq_from_json(c) for c in coloring['centers']]
            table = xk_fattening_coloring(n, k, centers, int(coloring['xk']), coloring['eps'])
    except DomainError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise DomainError(f"malformed ramsey instance: {e!r}")
    return table, m


def witness_to_json(w: Optional[MonochromaticWitness]) -> Optional[dict]:
    if w is None:
        return None
    return {'p': finite_to_json(w.p), 'color': w.color}


def table_to_json(table: ColoringTable) -> dict:
    """Any colouring as an explicit ``table`` colouring accepted by ``instance_from_json``."""
    entries = [{'values': list(f.values), 'color': c}
               for f, c in sorted(table.colors.items(), key=lambda item: item[0].values)]
    return {'kind': ColoringKind.TABLE.value, 'num_colors': table.num_colors, 'entries': entries}
