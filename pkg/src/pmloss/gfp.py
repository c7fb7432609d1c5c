"""Exact Gaussian elimination over GF(p).

Matrices are numpy int64 arrays with entries reduced into ``range(p)``.
"""

from __future__ import annotations

import numpy as np

__all__ = ["is_prime", "reduce_mod", "rref", "rank", "inverse", "column_space", "row_space"]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def reduce_mod(a, p: int) -> np.ndarray:
    return np.mod(np.asarray(a, dtype=np.int64), p)


def rref(a, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p and the pivot columns."""
    m = reduce_mod(a, p).copy()
    if m.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            m[[r, k]] = m[[k, r]]
        inv = pow(int(m[r, c]), -1, p)
        m[r] = (m[r] * inv) % p
        others = np.flatnonzero(m[:, c])
        for i in others:
            if i != r:
                m[i] = (m[i] - m[i, c] * m[r]) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def inverse(a, p: int) -> np.ndarray | None:
    """Inverse mod p, or None when the matrix is singular or not square."""
    a = reduce_mod(a, p)
    n, m = a.shape
    if n != m:
        return None
    if n == 0:
        return a.copy()
    aug = np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1)
    red, piv = rref(aug, p)
    if piv[:n] != list(range(n)):
        return None
    return red[:, n:].copy()


def row_space(vectors, p: int, dim: int) -> np.ndarray:
    """Canonical basis (rref rows, zero rows dropped) of the span of ``vectors``."""
    v = np.asarray(vectors, dtype=np.int64)
    if v.size == 0 or dim == 0:
        return np.zeros((0, dim), dtype=np.int64)
    v = v.reshape(-1, dim)
    if v.shape[0] == 0:
        return np.zeros((0, dim), dtype=np.int64)
    red, piv = rref(v, p)
    return red[: len(piv)].copy()


def column_space(a, p: int) -> np.ndarray:
    """Canonical basis of the column space, returned as rows."""
    a = reduce_mod(a, p)
    return row_space(a.T, p, a.shape[0])
