"""Exact linear algebra over prime fields on small dense integer matrices."""
from __future__ import annotations

import numpy as np


def _inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, -1, p)
    return inv


_INV: dict[int, np.ndarray] = {}


def inverse_table(p: int) -> np.ndarray:
    if p not in _INV:
        _INV[p] = _inverse_table(p)
    return _INV[p]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


def rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod ``p`` and the pivot columns."""
    m = np.array(a, dtype=np.int64) % p
    rows, cols = m.shape
    inv = inverse_table(p)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            m[[r, k]] = m[[k, r]]
        m[r] = m[r] * inv[m[r, c]] % p
        f = m[:, c].copy()
        f[r] = 0
        if f.any():
            m = (m - np.outer(f, m[r])) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: np.ndarray, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def kernel(a: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the right kernel, shape ``(cols, nullity)``."""
    a = np.asarray(a, dtype=np.int64)
    rows, cols = a.shape
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    m, pivots = rref(a, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, pc in enumerate(pivots):
            basis[pc, k] = (-m[i, f]) % p
    return basis


def left_annihilator(a: np.ndarray, p: int) -> np.ndarray:
    """Rows spanning ``{v : v a = 0}``, shape ``(nullity, rows)``."""
    return kernel(np.asarray(a).T, p).T


def solve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution of ``a x = b`` mod ``p``, or ``None`` if inconsistent."""
    a = np.asarray(a, dtype=np.int64)
    rows, cols = a.shape
    if rows == 0:
        return np.zeros(cols, dtype=np.int64)
    aug = np.concatenate([a, np.asarray(b, dtype=np.int64).reshape(rows, 1)], axis=1)
    m, pivots = rref(aug, p)
    if pivots and pivots[-1] == cols:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = m[i, cols]
    return x


def batched_rank(a: np.ndarray, p: int) -> np.ndarray:
    """Ranks mod ``p`` of a stack of matrices with shape ``(batch, rows, cols)``."""
    a = np.array(a, dtype=np.int64) % p
    batch, rows, cols = a.shape
    rk = np.zeros(batch, dtype=np.int64)
    if rows == 0 or cols == 0 or batch == 0:
        return rk
    inv = inverse_table(p)
    row_ids = np.arange(rows)
    for c in range(cols):
        cand = (a[:, :, c] != 0) & (row_ids[None, :] >= rk[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = np.flatnonzero(has)
        piv = cand[b].argmax(axis=1)
        top = rk[b]
        pivot_rows = a[b, piv].copy()
        a[b, piv] = a[b, top]
        pivot_rows = pivot_rows * inv[pivot_rows[:, c]][:, None] % p
        a[b, top] = pivot_rows
        f = a[b, :, c].copy()
        f[np.arange(b.size), top] = 0
        a[b] = (a[b] - f[:, :, None] * pivot_rows[:, None, :]) % p
        rk[b] += 1
        if (rk == rows).all():
            break
    return rk
