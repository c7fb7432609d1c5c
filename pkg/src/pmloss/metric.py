"""Merging distance, morphism distance, and reducing constants."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from . import backend as bk
from .errors import ElementNotInObject, ShapeMismatch
from .flow import StepFlow, as_rational
from .pmodule import PersModule

__all__ = [
    "INF", "ExtDistance", "ext", "ext_max", "orbit", "orbit_map",
    "merging_distance", "morphism_distance", "reducing_constants", "ReducingSet",
]


class _Infinity:
    """The extended value +inf; absorbs addition and exceeds every rational."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("pmloss.INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__


INF = _Infinity()
ExtDistance = Union[Fraction, _Infinity]


def ext(x) -> ExtDistance:
    if x is INF or (isinstance(x, str) and x.strip().lower() in ("inf", "infinity")):
        return INF
    if isinstance(x, float) and x == float("inf"):
        return INF
    return as_rational(x)


def ext_max(values, default=Fraction(0)) -> ExtDistance:
    out = default
    for v in values:
        if v > out:
            out = v
    return out


def orbit(flow: StepFlow, q) -> list:
    """``T_b q`` for every breakpoint b."""
    return [t(q) for t in flow.translations]


def orbit_map(F: PersModule, flow: StepFlow, q, eps):
    """``F[q <= T_eps q]``."""
    return F.map_between(q, flow(eps)(q))


def _vec(obj, v):
    arr = np.asarray(v, dtype=np.int64)
    if arr.shape != (obj.dim,):
        raise ElementNotInObject(f"vector of shape {arr.shape} is not in a {obj.dim}-dim space")
    return np.mod(arr, obj.field_char)


def merging_distance(F: PersModule, flow: StepFlow, p, a, b) -> ExtDistance:
    """Least breakpoint at which a and b have equal images along the flow, else INF.

    The set of such breakpoints is upward closed, so a scan from below
    returns the infimum.
    """
    obj = F.obj(p)
    if isinstance(obj, bk.FinSetObj):
        obj.index(a), obj.index(b)
        for eps, t in zip(flow.breakpoints, flow.translations):
            h = F.map_between(p, t(p))
            if h(a) == h(b):
                return eps
        return INF
    d = np.mod(_vec(obj, a) - _vec(obj, b), obj.field_char)
    for eps, t in zip(flow.breakpoints, flow.translations):
        h = F.map_between(p, t(p))
        if not h(d).any():
            return eps
    return INF


def morphism_distance(f, g, F: PersModule, flow: StepFlow, q) -> ExtDistance:
    """``sup_a d_q(f(a), g(a))`` for two maps into ``F(q)``.

    Both backends reduce to the least breakpoint with ``h∘f = h∘g`` for
    ``h = F[q <= T q]``: for sets this is the sup over source elements, for
    vector spaces it is the vanishing time of ``h∘(f - g)``. An empty source
    gives 0.
    """
    if f.source != g.source or f.target != g.target:
        raise ShapeMismatch("maps must share source and target")
    if f.target != F.obj(q):
        raise ShapeMismatch(f"maps do not land in F({q!r})")
    if isinstance(f, bk.VecMap):
        diff = bk.difference(f, g).matrix
        if not diff.any():
            return Fraction(0)
        for eps, t in zip(flow.breakpoints, flow.translations):
            h = F.map_between(q, t(q))
            if not np.mod(h.matrix @ diff, f.p).any():
                return eps
        return INF
    pairs = {(a, b) for a, b in zip(f.table, g.table) if a != b}
    if not pairs:
        return Fraction(0)
    for eps, t in zip(flow.breakpoints, flow.translations):
        h = F.map_between(q, t(q)).table
        if all(h[a] == h[b] for a, b in pairs):
            return eps
    return INF


@dataclass(frozen=True)
class ReducingSet:
    point: object
    constants: tuple

    def __iter__(self):
        return iter(self.constants)

    def __len__(self):
        return len(self.constants)

    def __contains__(self, x):
        return x in self.constants


def reducing_constants(F: PersModule, flow: StepFlow, q) -> ReducingSet:
    """Breakpoints b_i > 0 with ``F[T_bj q <= T_bk q]`` non-injective for all j < i <= k.

    Non-injectivity propagates forward under composition, so k = i is the
    binding case; it does not propagate backward, so every j < i is checked.
    Values strictly between breakpoints never qualify: the map across them
    is an identity.
    """
    pts = orbit(flow, q)
    out = []
    for i in range(1, len(pts)):
        if all(not bk.is_mono(F.map_between(pts[j], pts[i])) for j in range(i)):
            out.append(flow.breakpoints[i])
    return ReducingSet(q, tuple(out))
