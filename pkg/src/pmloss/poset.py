"""Finite posets, grid products of chains, and interval checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import (
    CycleError,
    DuplicateElement,
    EmptyAxis,
    NotAGrid,
    NotConnected,
    NotConvex,
    NotLinear,
    UnknownElement,
)

Element = Hashable


def _closure(rel: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of a boolean adjacency matrix (Warshall)."""
    reach = rel.copy()
    np.fill_diagonal(reach, True)
    for k in range(reach.shape[0]):
        reach |= np.outer(reach[:, k], reach[k, :])
    return reach


class FinitePoset:
    """A finite poset with its order materialized as a dense boolean matrix.

    Elements are opaque hashable ids. ``grid_shape`` is set when the poset is
    a product of chains, in which case ``coords(p)`` gives the k-tuple of
    axis positions of ``p``.
    """

    def __init__(self, elements: Sequence[Element], leq: np.ndarray,
                 grid_shape: tuple[int, ...] | None = None,
                 coords: dict | None = None):
        self.elements = tuple(elements)
        self._index = {}
        for i, e in enumerate(self.elements):
            if e in self._index:
                raise DuplicateElement(e)
            self._index[e] = i
        self._leq = leq
        self._leq.setflags(write=False)
        n = len(self.elements)
        for i in range(n):
            for j in range(i + 1, n):
                if leq[i, j] and leq[j, i]:
                    raise CycleError(self.elements[i], self.elements[j])
        self.grid_shape = tuple(grid_shape) if grid_shape is not None else None
        self._coords = coords
        self._coord_index = {c: e for e, c in coords.items()} if coords else None
        self._compute_hasse()
        self._order = tuple(sorted(range(n), key=lambda i: (int(leq[:, i].sum()), i)))

    def _compute_hasse(self):
        lt = self._leq.copy()
        np.fill_diagonal(lt, False)
        # p covers-below q iff p < q and there is no r with p < r < q
        two_step = (lt.astype(np.int64) @ lt.astype(np.int64)) > 0
        cover = lt & ~two_step
        n = len(self.elements)
        self._preds = tuple(tuple(int(i) for i in np.flatnonzero(cover[:, j])) for j in range(n))
        self._succs = tuple(tuple(int(j) for j in np.flatnonzero(cover[i, :])) for i in range(n))
        self.hasse_edges = tuple(
            (self.elements[i], self.elements[j]) for i in range(n) for j in self._succs[i]
        )
        self.max_predecessors = max((len(p) for p in self._preds), default=0)

    # -- lookups ---------------------------------------------------------
    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, p):
        try:
            return p in self._index
        except TypeError:
            return False

    def __repr__(self):
        if self.grid_shape:
            return f"FinitePoset(grid={list(self.grid_shape)})"
        return f"FinitePoset({len(self)} elements, {len(self.hasse_edges)} Hasse edges)"

    def index(self, p) -> int:
        try:
            return self._index[p]
        except (KeyError, TypeError):
            raise UnknownElement(f"{p!r} is not an element of the poset") from None

    def leq(self, p, q) -> bool:
        return bool(self._leq[self.index(p), self.index(q)])

    def lt(self, p, q) -> bool:
        return p != q and self.leq(p, q)

    def comparable(self, p, q) -> bool:
        return self.leq(p, q) or self.leq(q, p)

    @property
    def leq_matrix(self) -> np.ndarray:
        return self._leq

    def predecessors(self, q) -> list:
        return [self.elements[i] for i in self._preds[self.index(q)]]

    def successors(self, p) -> list:
        return [self.elements[j] for j in self._succs[self.index(p)]]

    def up_set(self, p) -> list:
        return [self.elements[j] for j in np.flatnonzero(self._leq[self.index(p)])]

    def down_set(self, q) -> list:
        return [self.elements[i] for i in np.flatnonzero(self._leq[:, self.index(q)])]

    def linear_extension(self) -> list:
        """Elements sorted so that p < q implies p comes first."""
        return [self.elements[i] for i in self._order]

    def comparable_pairs(self, strict: bool = True):
        """Yield all (p, q) with p <= q (p < q when strict)."""
        idx = np.argwhere(self._leq)
        for i, j in idx:
            if strict and i == j:
                continue
            yield self.elements[i], self.elements[j]

    def is_linear(self) -> bool:
        return bool((self._leq | self._leq.T).all())

    def chain_order(self) -> list:
        if not self.is_linear():
            raise NotLinear("poset is not a linear order")
        return self.linear_extension()

    def minimal(self, subset: Iterable) -> list:
        sub = list(subset)
        return [p for p in sub if not any(self.lt(q, p) for q in sub)]

    def minimum(self, subset: Iterable):
        """The least element of ``subset`` or ``None`` when there is none."""
        sub = list(subset)
        for p in sub:
            if all(self.leq(p, q) for q in sub):
                return p
        return None

    # -- grid structure --------------------------------------------------
    def coords(self, p) -> tuple[int, ...]:
        if self._coords is None:
            raise NotAGrid("poset has no grid structure")
        return self._coords[p]

    def at(self, coords: Sequence[int]):
        if self._coord_index is None:
            raise NotAGrid("poset has no grid structure")
        return self._coord_index[tuple(coords)]

    @property
    def is_grid(self) -> bool:
        return self.grid_shape is not None


def build_poset(elements: Sequence[Element], relation_pairs: Iterable[tuple]) -> FinitePoset:
    """Poset generated by ``relation_pairs`` (reflexive-transitive closure)."""
    elements = list(elements)
    index = {}
    for i, e in enumerate(elements):
        if e in index:
            raise DuplicateElement(e)
        index[e] = i
    rel = np.zeros((len(elements), len(elements)), dtype=bool)
    for p, q in relation_pairs:
        if p not in index or q not in index:
            raise UnknownElement(f"relation ({p!r}, {q!r}) mentions an unknown element")
        rel[index[p], index[q]] = True
    return FinitePoset(elements, _closure(rel))


def grid(axis_lengths: Sequence[int]) -> FinitePoset:
    """Product of chains ``0 < 1 < ... < n-1``; elements are k-tuples."""
    shape = tuple(int(n) for n in axis_lengths)
    if not shape or any(n < 1 for n in shape):
        raise EmptyAxis(f"every axis needs length >= 1, got {list(shape)}")
    pts = list(itertools.product(*(range(n) for n in shape)))
    arr = np.array(pts, dtype=np.int64)
    leq = (arr[:, None, :] <= arr[None, :, :]).all(axis=2)
    return FinitePoset(pts, leq, grid_shape=shape, coords={p: p for p in pts})


def chain(n: int) -> FinitePoset:
    """The linear order ``0 < 1 < ... < n-1`` with integer elements."""
    if n < 1:
        raise EmptyAxis("a chain needs at least one element")
    idx = np.arange(n)
    return FinitePoset(list(range(n)), idx[:, None] <= idx[None, :],
                       grid_shape=(n,), coords={i: (i,) for i in range(n)})


@dataclass(frozen=True)
class Interval:
    poset: FinitePoset
    members: frozenset

    def __contains__(self, p):
        return p in self.members

    def __len__(self):
        return len(self.members)


def _components(poset: FinitePoset, members: list) -> list[list]:
    seen, comps = set(), []
    for start in members:
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            p = stack.pop()
            comp.append(p)
            for q in members:
                if q not in seen and poset.comparable(p, q):
                    seen.add(q)
                    stack.append(q)
        comps.append(comp)
    return comps


def interval_check(poset: FinitePoset, subset: Iterable) -> Interval:
    """Return ``subset`` as an Interval, raising NotConvex or NotConnected."""
    members = list(dict.fromkeys(subset))
    if not members:
        raise ValueError("an interval must be nonempty")
    for p in members:
        poset.index(p)
    mset = set(members)
    idx = [poset.index(p) for p in members]
    L = poset.leq_matrix
    for i in idx:
        for j in idx:
            if i == j or not L[i, j]:
                continue
            between = np.flatnonzero(L[i, :] & L[:, j])
            for r in between:
                e = poset.elements[r]
                if e not in mset:
                    raise NotConvex((poset.elements[i], e, poset.elements[j]))
    comps = _components(poset, members)
    if len(comps) > 1:
        raise NotConnected(comps)
    return Interval(poset, frozenset(members))
