"""Translations and step flows on finite posets.

A step flow stores one translation per breakpoint; ``T_eps`` is the
translation at the largest breakpoint ``<= eps``. All breakpoints are exact
``Fraction`` values.
"""

from __future__ import annotations

import bisect
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import FlowError, NotAGrid, NotATranslation
from .poset import FinitePoset, chain
from .report import ValidationReport, Verdict

__all__ = [
    "Translation", "StepFlow", "GridFlow", "floor_shift", "translation_at",
    "validate_flow", "is_archimedean", "is_line_preserving", "compose_translations",
    "as_rational",
]


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


class Translation:
    """A total self-map of a poset, stored as an index table.

    Order preservation and inflation are not enforced here so that invalid
    flows can still be inspected; call :meth:`check` or :meth:`validated`.
    """

    __slots__ = ("poset", "img")

    def __init__(self, poset: FinitePoset, mapping):
        self.poset = poset
        if isinstance(mapping, np.ndarray):
            img = mapping.astype(np.int64)
        elif callable(mapping):
            img = np.array([poset.index(mapping(p)) for p in poset.elements], dtype=np.int64)
        else:
            missing = [p for p in poset.elements if p not in mapping]
            if missing:
                raise NotATranslation(f"map is undefined at {missing[0]!r}")
            try:
                img = np.array([poset.index(mapping[p]) for p in poset.elements], dtype=np.int64)
            except Exception as e:
                raise NotATranslation(f"map leaves the poset: {e}") from None
        if img.shape != (len(poset),):
            raise NotATranslation("table length differs from poset size")
        img.setflags(write=False)
        self.img = img

    @classmethod
    def identity(cls, poset: FinitePoset) -> "Translation":
        return cls(poset, np.arange(len(poset)))

    def __call__(self, p):
        return self.poset.elements[self.img[self.poset.index(p)]]

    def as_dict(self) -> dict:
        els = self.poset.elements
        return {p: els[i] for p, i in zip(els, self.img)}

    def __eq__(self, other):
        return (isinstance(other, Translation) and other.poset is self.poset
                and np.array_equal(self.img, other.img))

    def __hash__(self):
        return hash(self.img.tobytes())

    def __le__(self, other: "Translation") -> bool:
        L = self.poset.leq_matrix
        return bool(L[self.img, other.img].all())

    def __matmul__(self, other: "Translation") -> "Translation":
        return compose_translations(self, other)

    def __repr__(self):
        return f"Translation({self.as_dict()!r})"

    def is_identity(self) -> bool:
        return bool((self.img == np.arange(len(self.poset))).all())

    def check(self) -> ValidationReport:
        L = self.poset.leq_matrix
        els = self.poset.elements
        rep = ValidationReport()
        n = len(els)
        bad = np.flatnonzero(~L[np.arange(n), self.img])
        rep.add("inflationary", bad.size == 0,
                None if bad.size == 0 else (els[bad[0]], els[self.img[bad[0]]]))
        viol = np.argwhere(L & ~L[self.img][:, self.img])
        rep.add("order_preserving", viol.size == 0,
                None if viol.size == 0 else (els[viol[0][0]], els[viol[0][1]]))
        return rep

    def validated(self) -> "Translation":
        rep = self.check()
        if not rep.ok:
            name, v = next(iter(rep.failures().items()))
            raise NotATranslation(f"{name} fails at {v.witness!r}")
        return self


def compose_translations(s: Translation, s2: Translation) -> Translation:
    """Pointwise ``s ∘ s2`` (apply s2 first)."""
    if s.poset is not s2.poset:
        raise FlowError("translations live on different posets")
    return Translation(s.poset, s.img[s2.img])


class StepFlow:
    """A right-continuous step function ``[0, inf) -> Trans(P)``."""

    def __init__(self, poset: FinitePoset, breakpoints: Sequence, translations: Sequence[Translation]):
        bps = [as_rational(b) for b in breakpoints]
        if not bps or bps[0] != 0:
            raise FlowError("breakpoints must start at 0")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise FlowError("breakpoints must be strictly increasing")
        if len(translations) != len(bps):
            raise FlowError("need exactly one translation per breakpoint")
        for t in translations:
            if t.poset is not poset:
                raise FlowError("translation defined on a different poset")
        self.poset = poset
        self.breakpoints: tuple[Fraction, ...] = tuple(bps)
        self.translations: tuple[Translation, ...] = tuple(translations)

    def __len__(self):
        return len(self.breakpoints)

    def __repr__(self):
        return f"StepFlow(breakpoints={[str(b) for b in self.breakpoints]})"

    def index_at(self, eps) -> int:
        eps = as_rational(eps)
        if eps < 0:
            raise ValueError("flow parameter must be nonnegative")
        return bisect.bisect_right(self.breakpoints, eps) - 1

    def __call__(self, eps) -> Translation:
        return self.translations[self.index_at(eps)]

    def is_breakpoint(self, eps) -> bool:
        eps = as_rational(eps)
        i = self.index_at(eps)
        return self.breakpoints[i] == eps

    @property
    def horizon(self) -> Fraction:
        return self.breakpoints[-1]


def translation_at(flow: StepFlow, eps) -> Translation:
    return flow(eps)


def floor_shift(poset: FinitePoset, horizon: int | None = None, step=1) -> StepFlow:
    """``T_eps(m) = m + floor(eps / step)`` on a chain, clamped at the top.

    Breakpoints are ``0, step, 2 step, ..., horizon step``; the default
    horizon is the chain length, one past the point where every element has
    reached the top.
    """
    order = poset.chain_order()
    n = len(order)
    if horizon is None:
        horizon = n
    step = as_rational(step)
    bps, ts = [], []
    for k in range(horizon + 1):
        table = np.empty(n, dtype=np.int64)
        for i, p in enumerate(order):
            table[poset.index(p)] = poset.index(order[min(i + k, n - 1)])
        bps.append(k * step)
        ts.append(Translation(poset, table))
    return StepFlow(poset, bps, ts)


class GridFlow(StepFlow):
    """Product flow on a grid from one StepFlow per axis chain."""

    def __init__(self, poset: FinitePoset, per_axis: Sequence[StepFlow]):
        if not poset.is_grid:
            raise NotAGrid("GridFlow needs a grid poset")
        if len(per_axis) != len(poset.grid_shape):
            raise FlowError("need one axis flow per grid axis")
        for f, n in zip(per_axis, poset.grid_shape):
            if len(f.poset) != n or f.poset.elements != tuple(range(n)):
                raise FlowError("axis flow must live on the chain 0..n-1 of that axis")
        self.per_axis = tuple(per_axis)
        bps = sorted(set().union(*(f.breakpoints for f in per_axis)))
        coords = np.array([poset.coords(p) for p in poset.elements], dtype=np.int64)
        shape = poset.grid_shape
        slot = np.empty(len(poset), dtype=np.int64)
        slot[np.ravel_multi_index(coords.T, shape)] = np.arange(len(poset))
        ts = []
        for b in bps:
            new = coords.copy()
            for ax, f in enumerate(per_axis):
                new[:, ax] = f(b).img[coords[:, ax]]
            ts.append(Translation(poset, slot[np.ravel_multi_index(new.T, shape)]))
        super().__init__(poset, bps, ts)


def grid_flow(poset: FinitePoset, axis_flows: Sequence[Callable[[FinitePoset], StepFlow]] | None = None,
              horizon: int | None = None) -> GridFlow:
    """Per-axis floor_shift flows by default."""
    if not poset.is_grid:
        raise NotAGrid("grid_flow needs a grid poset")
    flows = []
    for ax, n in enumerate(poset.grid_shape):
        c = chain(n)
        if axis_flows is None:
            h = horizon if horizon is not None else max(poset.grid_shape)
            flows.append(floor_shift(c, h))
        else:
            flows.append(axis_flows[ax](c))
    return GridFlow(poset, flows)


def validate_flow(flow: StepFlow, poset: FinitePoset | None = None) -> ValidationReport:
    """Run each flow axiom and the commutativity check as a named entry."""
    poset = poset or flow.poset
    if poset is not flow.poset:
        raise FlowError("flow is defined on a different poset")
    els = poset.elements
    L = poset.leq_matrix
    ts = flow.translations
    bps = flow.breakpoints
    rep = ValidationReport()

    rep.add("identity_at_zero", ts[0].is_identity(),
            None if ts[0].is_identity() else next(
                p for p in els if flow(0)(p) != p))

    w = None
    for b, t in zip(bps, ts):
        viol = np.argwhere(L & ~L[t.img][:, t.img])
        if viol.size:
            w = (b, els[viol[0][0]], els[viol[0][1]])
            break
    rep.add("order_preserving", w is None, w)

    w = None
    for (b1, t1), (b2, t2) in zip(zip(bps, ts), zip(bps[1:], ts[1:])):
        bad = np.flatnonzero(~L[t1.img, t2.img])
        if bad.size:
            w = (b1, b2, els[bad[0]])
            break
    rep.add("monotone", w is None, w)

    w = None
    n = len(els)
    for b, t in zip(bps, ts):
        bad = np.flatnonzero(~L[np.arange(n), t.img])
        if bad.size:
            w = (b, els[bad[0]])
            break
    rep.add("inflationary", w is None, w)

    w = None
    for a, ta in zip(bps, ts):
        for b, tb in zip(bps, ts):
            lhs = ta.img[tb.img]
            rhs = flow(a + b).img
            bad = np.flatnonzero(~L[lhs, rhs])
            if bad.size:
                w = (a, b, els[bad[0]])
                break
        if w:
            break
    rep.add("superadditive", w is None, w)

    w = None
    for i, ta in enumerate(ts):
        for j in range(i + 1, len(ts)):
            tb = ts[j]
            bad = np.flatnonzero(ta.img[tb.img] != tb.img[ta.img])
            if bad.size:
                w = (bps[i], bps[j], els[bad[0]])
                break
        if w:
            break
    rep.add("commutative", w is None, w)
    return rep


def is_archimedean(flow: StepFlow, poset: FinitePoset | None = None) -> Verdict:
    """True iff for all p < q some T_delta p >= q.

    Flows are monotone, so the last translation is the strongest and it
    suffices to test it.
    """
    poset = poset or flow.poset
    L = poset.leq_matrix
    last = flow.translations[-1].img
    # need L[q, last[p]] for every p <= q
    reach = L[:, last].T  # reach[p, q] = q <= T p
    bad = np.argwhere(L & ~reach)
    if bad.size:
        p, q = bad[0]
        return Verdict(False, (poset.elements[p], poset.elements[q]))
    return Verdict(True)


def is_line_preserving(t: Translation, grid: FinitePoset | None = None) -> Verdict:
    """Decompose ``t`` into per-axis maps or return a witness pair.

    On success ``detail`` is a list with one tuple per axis, entry ``x``
    being the image of coordinate ``x``.
    """
    grid = grid or t.poset
    if not grid.is_grid:
        raise NotAGrid("line preservation is defined on grids only")
    shape = grid.grid_shape
    k = len(shape)
    coords = np.array([grid.coords(p) for p in grid.elements], dtype=np.int64)
    img = coords[t.img]
    for ax in range(k):
        others = [a for a in range(k) if a != ax]
        # points on a common axis-ax line must keep their other coordinates together
        keys = {}
        for i in range(len(coords)):
            key = tuple(coords[i, others])
            target = tuple(img[i, others])
            if key in keys:
                j, prev = keys[key]
                if prev != target:
                    return Verdict(False, (grid.elements[j], grid.elements[i]))
            else:
                keys[key] = (i, target)
    per_axis = []
    for ax, n in enumerate(shape):
        base = [0] * k
        row = []
        for x in range(n):
            base[ax] = x
            row.append(int(img[grid.index(grid.at(base)), ax]))
        per_axis.append(tuple(row))
    # the product of the axis maps must reproduce t
    for i in range(len(coords)):
        for ax in range(k):
            if img[i, ax] != per_axis[ax][coords[i, ax]]:
                j = grid.index(grid.at([coords[i, a] if a == ax else 0 for a in range(k)]))
                return Verdict(False, (grid.elements[j], grid.elements[i]))
    return Verdict(True, None, per_axis)
