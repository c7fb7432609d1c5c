"""Persistence modules over finite posets."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import backend as bk
from .errors import ModuleError, NotAGrid, NotComparable, ShapeMismatch
from .poset import FinitePoset, Interval
from .report import ValidationReport

__all__ = [
    "PersModule", "CriticalData", "validate_module", "map_between",
    "is_constant_on", "critical_values", "critical_coordinates",
]


class PersModule:
    """A functor from a finite poset to FinSet or VecF.

    ``edge_maps`` gives one morphism per Hasse edge ``(p, q)``; composites for
    arbitrary ``p <= q`` come from :meth:`map_between` and are memoized.
    """

    def __init__(self, poset: FinitePoset, backend, objects: dict, edge_maps: dict):
        self.poset = poset
        self.backend = backend
        self.objects = {}
        for p in poset.elements:
            if p not in objects:
                raise ModuleError(f"no object given at {p!r}")
            obj = objects[p]
            if not backend.owns(obj):
                raise ModuleError(f"object at {p!r} does not belong to {backend!r}")
            self.objects[p] = obj
        extra = set(objects) - set(poset.elements)
        if extra:
            raise ModuleError(f"objects given at unknown elements {sorted(map(repr, extra))}")
        hasse = set(poset.hasse_edges)
        self.edge_maps = {}
        for e in poset.hasse_edges:
            if e not in edge_maps:
                raise ModuleError(f"no map given on Hasse edge {e!r}")
            m = edge_maps[e]
            if m.source != self.objects[e[0]] or m.target != self.objects[e[1]]:
                raise ModuleError(f"map on {e!r} has the wrong source or target")
            self.edge_maps[e] = m
        for e in edge_maps:
            if e not in hasse:
                raise ModuleError(f"{e!r} is not a Hasse edge")
        self._memo: dict = {}

    def __repr__(self):
        return f"PersModule({self.backend!r}, {len(self.poset)} elements)"

    def obj(self, p):
        return self.objects[p]

    def __call__(self, p, q=None):
        """``F(p)`` or ``F[p <= q]``."""
        if q is None:
            return self.objects[p]
        return self.map_between(p, q)

    def map_between(self, p, q):
        P = self.poset
        if not P.leq(p, q):
            raise NotComparable(p, q)
        if p == q:
            return bk.identity(self.objects[p])
        key = (p, q)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        # walk down from q along Hasse edges that stay above p
        path, cur, base = [], q, None
        while cur != p:
            hit = self._memo.get((p, cur))
            if hit is not None:
                base = hit
                break
            r = next(r for r in P.predecessors(cur) if P.leq(p, r))
            path.append((r, cur))
            cur = r
        if base is None:
            base = bk.identity(self.objects[p])
        for r, s in reversed(path):
            base = bk.compose(base, self.edge_maps[(r, s)])
            self._memo[(p, s)] = base
        return base


def map_between(F: PersModule, p, q):
    return F.map_between(p, q)


def validate_module(F: PersModule) -> ValidationReport:
    """Check that all Hasse paths between comparable elements compose equally.

    For each source p the composite to q is built from one predecessor and
    compared against every other predecessor route; by induction this covers
    all paths. A failure carries ``(p, r1, r2, q)``.
    """
    P = F.poset
    rep = ValidationReport()
    witness = None
    order = P.linear_extension()
    for p in order:
        comp = {p: bk.identity(F.objects[p])}
        for q in order:
            if q == p or not P.leq(p, q):
                continue
            preds = [r for r in P.predecessors(q) if r in comp]
            first = bk.compose(comp[preds[0]], F.edge_maps[(preds[0], q)])
            for r in preds[1:]:
                other = bk.compose(comp[r], F.edge_maps[(r, q)])
                if other != first:
                    witness = (p, preds[0], r, q)
                    break
            if witness:
                break
            comp[q] = first
        if witness:
            break
    rep.add("path_independent", witness is None, witness)
    return rep


def is_constant_on(F: PersModule, interval: Interval | set | list) -> bool:
    """True iff every comparable pair inside the interval maps isomorphically.

    Convexity puts every maximal chain between members inside the interval,
    so checking the Hasse edges it contains is enough.
    """
    members = interval.members if isinstance(interval, Interval) else set(interval)
    for p, q in F.poset.hasse_edges:
        if p in members and q in members and not bk.is_iso(F.edge_maps[(p, q)]):
            return False
    return True


@dataclass
class CriticalData:
    """Sorted critical values; ``provenance`` maps a grid coordinate to the slices that flag it."""

    values: tuple
    provenance: dict = field(default_factory=dict)
    tame: bool = True

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __contains__(self, x):
        return x in self.values


def _scan(order, edge_iso):
    crit = []
    n = len(order)
    for i, t in enumerate(order):
        below = i > 0 and not edge_iso(order[i - 1], t)
        above = i < n - 1 and not edge_iso(t, order[i + 1])
        if below or above:
            crit.append(t)
    return crit


def critical_values(F: PersModule) -> CriticalData:
    """Critical elements of a module over a finite linear order.

    t is critical iff one of its adjacent structure maps is not an
    isomorphism; endpoints consult only the side that exists.
    """
    order = F.poset.chain_order()
    crit = _scan(order, lambda a, b: bk.is_iso(F.edge_maps[(a, b)]))
    return CriticalData(tuple(crit))


def critical_coordinates(F: PersModule, axis: int) -> CriticalData:
    """Union over all axis-``axis`` lines of the 1-D critical values."""
    P = F.poset
    if not P.is_grid:
        raise NotAGrid("critical coordinates need a grid module")
    shape = P.grid_shape
    if not 0 <= axis < len(shape):
        raise ShapeMismatch(f"axis {axis} out of range for {len(shape)} axes")
    others = [range(n) for a, n in enumerate(shape) if a != axis]
    prov: dict = {}
    for rest in itertools.product(*others):
        def pt(t, rest=rest):
            c = list(rest)
            c.insert(axis, t)
            return P.at(c)
        line = [pt(t) for t in range(shape[axis])]
        crit = _scan(line, lambda a, b: bk.is_iso(F.edge_maps[(a, b)]))
        for q in crit:
            prov.setdefault(P.coords(q)[axis], []).append(tuple(rest))
    return CriticalData(tuple(sorted(prov)), prov)
