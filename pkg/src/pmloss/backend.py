"""Target categories: finite sets with functions and GF(p) vector spaces.

``compose(f, g)`` applies ``f`` first, i.e. it is ``g ∘ f``; the same
composite is spelled ``g @ f``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import gfp
from .errors import ElementNotInObject, NotInvertible, ShapeMismatch, WrongBackend

__all__ = [
    "FinSet", "VecF", "FINSET",
    "FinSetObj", "FinSetMap", "VecObj", "VecMap",
    "compose", "identity", "is_mono", "is_iso", "inverse",
    "image_basis", "restrict_image", "difference",
]


# -- finite sets --------------------------------------------------------

@dataclass(frozen=True)
class FinSetObj:
    labels: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in {labels!r}")
        object.__setattr__(self, "_pos", {x: i for i, x in enumerate(labels)})

    def __len__(self):
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self._pos[label]
        except (KeyError, TypeError):
            raise ElementNotInObject(f"{label!r} is not an element of {list(self.labels)}") from None

    def __contains__(self, label):
        try:
            return label in self._pos
        except TypeError:
            return False


@dataclass(frozen=True)
class FinSetMap:
    """A function between finite sets; ``table[i]`` is the target index of source index i."""

    source: FinSetObj
    target: FinSetObj
    table: tuple

    def __post_init__(self):
        table = tuple(int(t) for t in self.table)
        object.__setattr__(self, "table", table)
        if len(table) != len(self.source):
            raise ShapeMismatch(f"table has {len(table)} entries, source has {len(self.source)}")
        n = len(self.target)
        if any(t < 0 or t >= n for t in table):
            raise ShapeMismatch("table points outside the target")

    @classmethod
    def from_dict(cls, source: FinSetObj, target: FinSetObj, mapping: dict) -> "FinSetMap":
        table = []
        for x in source.labels:
            if x not in mapping:
                raise ShapeMismatch(f"no image given for {x!r}")
            table.append(target.index(mapping[x]))
        return cls(source, target, tuple(table))

    def __call__(self, label):
        return self.target.labels[self.table[self.source.index(label)]]

    def as_dict(self) -> dict:
        return {x: self.target.labels[t] for x, t in zip(self.source.labels, self.table)}

    def __matmul__(self, other):
        return compose(other, self)


# -- vector spaces ------------------------------------------------------

@dataclass(frozen=True)
class VecObj:
    dim: int
    field_char: int = 2

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("dimension must be nonnegative")
        if not gfp.is_prime(self.field_char):
            raise ValueError(f"{self.field_char} is not prime")


@dataclass(frozen=True, eq=False)
class VecMap:
    """A linear map; ``matrix`` is dim(target) x dim(source) over GF(p)."""

    source: VecObj
    target: VecObj
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.source.field_char != self.target.field_char:
            raise ShapeMismatch("source and target live over different fields")
        p = self.source.field_char
        m = np.asarray(self.matrix, dtype=np.int64)
        if m.size == 0:
            m = m.reshape(self.target.dim, self.source.dim)
        if m.shape != (self.target.dim, self.source.dim):
            raise ShapeMismatch(
                f"matrix shape {m.shape} does not match {self.target.dim}x{self.source.dim}")
        m = np.mod(m, p)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def p(self) -> int:
        return self.source.field_char

    def __call__(self, v):
        v = np.asarray(v, dtype=np.int64)
        if v.shape != (self.source.dim,):
            raise ElementNotInObject(f"vector of shape {v.shape} is not in a {self.source.dim}-dim space")
        return np.mod(self.matrix @ v, self.p)

    def __eq__(self, other):
        return (isinstance(other, VecMap) and self.source == other.source
                and self.target == other.target and np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.source, self.target, self.matrix.tobytes()))

    def __matmul__(self, other):
        return compose(other, self)

    def rank(self) -> int:
        return gfp.rank(self.matrix, self.p)


# -- backends -----------------------------------------------------------

class FinSet:
    """The category of finite sets; objects are label lists."""

    name = "finset"

    def __eq__(self, other):
        return isinstance(other, FinSet)

    def __hash__(self):
        return hash("finset")

    def __repr__(self):
        return "FinSet()"

    def make_object(self, labels: Iterable) -> FinSetObj:
        return FinSetObj(tuple(labels))

    def make_map(self, source, target, data) -> FinSetMap:
        if isinstance(data, dict):
            return FinSetMap.from_dict(source, target, data)
        return FinSetMap(source, target, tuple(data))

    def owns(self, obj) -> bool:
        return isinstance(obj, FinSetObj)


@dataclass(frozen=True)
class VecF:
    """Finite-dimensional vector spaces over GF(p)."""

    p: int = 2
    name = "vec"

    def __post_init__(self):
        if not gfp.is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def make_object(self, dim: int) -> VecObj:
        return VecObj(int(dim), self.p)

    def make_map(self, source, target, data) -> VecMap:
        return VecMap(source, target, np.asarray(data, dtype=np.int64))

    def owns(self, obj) -> bool:
        return isinstance(obj, VecObj) and obj.field_char == self.p


FINSET = FinSet()


def backend_of(obj):
    if isinstance(obj, (FinSetObj, FinSetMap)):
        return FINSET
    if isinstance(obj, VecObj):
        return VecF(obj.field_char)
    if isinstance(obj, VecMap):
        return VecF(obj.p)
    raise WrongBackend(f"{type(obj).__name__} belongs to no known backend")


# -- operations ---------------------------------------------------------

def identity(obj):
    if isinstance(obj, FinSetObj):
        return FinSetMap(obj, obj, tuple(range(len(obj))))
    if isinstance(obj, VecObj):
        return VecMap(obj, obj, np.eye(obj.dim, dtype=np.int64))
    raise WrongBackend(f"no identity for {obj!r}")


def compose(f, g):
    """``g ∘ f``: apply f, then g."""
    if f.target != g.source:
        raise ShapeMismatch(f"cannot compose: target {f.target!r} != source {g.source!r}")
    if isinstance(f, FinSetMap) and isinstance(g, FinSetMap):
        return FinSetMap(f.source, g.target, tuple(g.table[t] for t in f.table))
    if isinstance(f, VecMap) and isinstance(g, VecMap):
        return VecMap(f.source, g.target, np.mod(g.matrix @ f.matrix, f.p))
    raise WrongBackend("cannot compose maps from different backends")


def compose_all(maps: Sequence):
    """Compose a path of maps in application order."""
    it = iter(maps)
    out = next(it)
    for m in it:
        out = compose(out, m)
    return out


def is_mono(f) -> bool:
    if isinstance(f, FinSetMap):
        return len(set(f.table)) == len(f.table)
    return f.rank() == f.source.dim


def is_iso(f) -> bool:
    if isinstance(f, FinSetMap):
        return len(f.source) == len(f.target) and is_mono(f)
    return f.source.dim == f.target.dim and f.rank() == f.source.dim


def inverse(f):
    if isinstance(f, FinSetMap):
        if not is_iso(f):
            raise NotInvertible("function is not a bijection")
        inv = [0] * len(f.table)
        for i, t in enumerate(f.table):
            inv[t] = i
        return FinSetMap(f.target, f.source, tuple(inv))
    m = gfp.inverse(f.matrix, f.p)
    if m is None:
        raise NotInvertible("matrix is singular")
    return VecMap(f.target, f.source, m)


def difference(f: VecMap, g: VecMap) -> VecMap:
    if not isinstance(f, VecMap) or not isinstance(g, VecMap):
        raise WrongBackend("difference needs linear maps")
    if f.source != g.source or f.target != g.target:
        raise ShapeMismatch("maps have different source or target")
    return VecMap(f.source, f.target, np.mod(f.matrix - g.matrix, f.p))


def image_basis(f: VecMap) -> np.ndarray:
    """Row-reduced basis of Im(f), one basis vector per row; zero rows means {0}."""
    if not isinstance(f, VecMap):
        raise WrongBackend("image_basis needs a linear map")
    if f.source.dim == 0:
        return np.zeros((0, f.target.dim), dtype=np.int64)
    return gfp.column_space(f.matrix, f.p)


def restrict_image(f: VecMap, basis) -> np.ndarray:
    """Row-reduced basis of f(span(basis)); ``basis`` holds vectors as rows."""
    if not isinstance(f, VecMap):
        raise WrongBackend("restrict_image needs a linear map")
    b = np.asarray(basis, dtype=np.int64)
    if b.size == 0:
        return np.zeros((0, f.target.dim), dtype=np.int64)
    if b.ndim != 2 or b.shape[1] != f.source.dim:
        raise ShapeMismatch(f"basis of shape {b.shape} does not live in the source")
    imgs = np.mod(f.matrix @ b.T, f.p).T
    return gfp.row_space(imgs, f.p, f.target.dim)


def maps_equal(f, g) -> bool:
    return f == g
