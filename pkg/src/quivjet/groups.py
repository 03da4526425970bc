"""Counting solutions of ``prod [x_i, y_i] = z`` in small finite matrix groups.

Groups are enumerated outright and stored with a multiplication table.
Counts are exact Python integers held in numpy object arrays.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import is_prime
from .quiver import DomainError

DEFAULT_GROUP_CAP = 2000


class GroupCapError(RuntimeError):
    pass


def gl_order(p: int, n: int) -> int:
    return math.prod(p**n - p**k for k in range(n))


def group_order(p: int, n: int, variant: str) -> int:
    order = gl_order(p, n)
    return order // (p - 1) if variant == "SL" else order


def _det_mod(mats: np.ndarray, p: int) -> np.ndarray:
    """Determinants of a stack of small integer matrices, mod ``p``."""
    n = mats.shape[-1]
    if n == 1:
        return mats[:, 0, 0] % p
    total = np.zeros(mats.shape[0], dtype=np.int64)
    for c in range(n):
        minor = np.delete(mats[:, 1:, :], c, axis=2)
        sign = 1 if c % 2 == 0 else -1
        total = (total + sign * mats[:, 0, c] * _det_mod(minor, p)) % p
    return total


@dataclass
class FiniteMatrixGroup:
    p: int
    n: int
    variant: str
    elements: np.ndarray
    mult: np.ndarray
    inv: np.ndarray
    identity: int

    @property
    def order(self) -> int:
        return len(self.elements)

    def index_of(self, mat: Sequence[Sequence[int]]) -> int:
        key = np.asarray(mat, dtype=np.int64).reshape(-1) % self.p
        hits = np.flatnonzero((self.elements.reshape(self.order, -1) == key).all(axis=1))
        if hits.size != 1:
            raise KeyError("matrix is not in the group")
        return int(hits[0])

    def conjugacy_classes(self) -> list[list[int]]:
        seen = np.full(self.order, -1, dtype=np.int64)
        classes = []
        for z in range(self.order):
            if seen[z] >= 0:
                continue
            orbit = np.unique(self.mult[self.mult[:, z], self.inv])
            seen[orbit] = len(classes)
            classes.append([int(x) for x in orbit])
        return classes


def enumerate_group(p: int, n: int, variant: str = "GL", cap: int = DEFAULT_GROUP_CAP) -> FiniteMatrixGroup:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if variant not in ("GL", "SL"):
        raise DomainError(f"unknown variant {variant!r}")
    order = group_order(p, n, variant)
    if order > cap:
        raise GroupCapError(f"|{variant}_{n}(F_{p})| = {order} exceeds the cap {cap}")
    cells = n * n
    grid = np.array(list(itertools.product(range(p), repeat=cells)), dtype=np.int64)
    mats = grid.reshape(-1, n, n)
    det = _det_mod(mats, p)
    keep = det == 1 if variant == "SL" else det != 0
    mats = mats[keep]
    codes = mats.reshape(len(mats), -1) @ (p ** np.arange(cells - 1, -1, -1, dtype=np.int64))
    lookup = np.full(p**cells, -1, dtype=np.int64)
    lookup[codes] = np.arange(len(mats))
    prod = np.einsum("aij,bjk->abik", mats, mats) % p
    mult = lookup[prod.reshape(len(mats), len(mats), -1) @ (p ** np.arange(cells - 1, -1, -1, dtype=np.int64))]
    identity = int(lookup[int(np.eye(n, dtype=np.int64).reshape(-1) @ (p ** np.arange(cells - 1, -1, -1)))])
    inv = np.argmax(mult == identity, axis=1)
    assert len(mats) == order
    return FiniteMatrixGroup(p, n, variant, mats, mult, inv, identity)


def _as_table(values) -> np.ndarray:
    out = np.empty(len(values), dtype=object)
    out[:] = [int(v) for v in values]
    return out


def commutator_distribution(group: FiniteMatrixGroup) -> np.ndarray:
    """``c[z] = #{(x, y) : x y x^-1 y^-1 = z}``."""
    m, inv = group.mult, group.inv
    xy = m
    comm = m[m[xy, inv[:, None]], inv[None, :]]
    return _as_table(np.bincount(comm.ravel(), minlength=group.order))


def convolve(a: np.ndarray, b: np.ndarray, group: FiniteMatrixGroup) -> np.ndarray:
    """``(a * b)[z] = sum_{xy = z} a[x] b[y]``."""
    out = np.zeros(group.order, dtype=object)
    for x in range(group.order):
        if a[x]:
            # b[x^-1 z] as a vector over z
            out = out + a[x] * b[group.mult[group.inv[x]]]
    return out


def convolve_power(c: np.ndarray, g: int, group: FiniteMatrixGroup) -> np.ndarray:
    if g < 1:
        raise DomainError("need g >= 1")
    out = c
    for _ in range(g - 1):
        out = convolve(out, c, group)
    return out


@dataclass
class FiberReport:
    p: int
    n: int
    variant: str
    g: int
    order: int
    classes: list[dict]
    total: int
    min_ratio: float
    max_ratio: float
    note: str = "fibre spread is a heuristic probe; no threshold is applied"


def fiber_report(group: FiniteMatrixGroup, g: int) -> FiberReport:
    fib = convolve_power(commutator_distribution(group), g, group)
    scale = group.order ** (2 * g)
    rows = []
    for cls in group.conjugacy_classes():
        z = cls[0]
        count = int(fib[z])
        rows.append(
            {
                "representative": z,
                "size": len(cls),
                "identity": group.identity in cls,
                "count": count,
                "ratio": count * group.order / scale,
            }
        )
    ratios = [r["ratio"] for r in rows]
    return FiberReport(
        group.p, group.n, group.variant, g, group.order, rows, int(sum(fib)), min(ratios), max(ratios)
    )
