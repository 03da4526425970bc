"""Representation types and the local quivers they determine."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .quiver import (
    DimensionMismatchError,
    DomainError,
    Quiver,
    check_dims,
    p_value,
    quiver_from_counts,
    sym_form,
)

Pair = tuple[int, tuple[int, ...]]


class InvalidTypeError(ValueError):
    """Raised when a type would need a negative number of loops or arrows."""


def _sort_key(pair: Pair) -> tuple:
    mult, dim = pair
    return (dim, mult)


@dataclass(frozen=True)
class RepType:
    """A multiset of ``(multiplicity, dimension vector)`` pairs.

    Pairs are kept sorted by dimension vector, then multiplicity, both
    descending.  Equal pairs may repeat: distinct simples can share a
    dimension vector.
    """

    pairs: tuple[Pair, ...]

    def __post_init__(self) -> None:
        pairs = tuple((int(m), tuple(int(x) for x in d)) for m, d in self.pairs)
        if not pairs:
            raise DomainError("empty representation type")
        for m, d in pairs:
            if m < 1:
                raise DomainError(f"multiplicity {m} < 1")
            if any(x < 0 for x in d) or not any(d):
                raise DomainError(f"bad dimension vector {d}")
        if len({len(d) for _, d in pairs}) != 1:
            raise DimensionMismatchError("dimension vectors of unequal length")
        object.__setattr__(self, "pairs", tuple(sorted(pairs, key=_sort_key, reverse=True)))

    @classmethod
    def of(cls, *pairs: tuple[int, int | Sequence[int]]) -> "RepType":
        """Shorthand: ``RepType.of((2, 1), (1, 3))`` for one-vertex types."""
        return cls(tuple((m, (d,) if isinstance(d, int) else tuple(d)) for m, d in pairs))

    @property
    def mults(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self.pairs)

    @property
    def dims(self) -> tuple[tuple[int, ...], ...]:
        return tuple(d for _, d in self.pairs)

    @property
    def total(self) -> tuple[int, ...]:
        width = len(self.pairs[0][1])
        return tuple(sum(m * d[k] for m, d in self.pairs) for k in range(width))

    def __len__(self) -> int:
        return len(self.pairs)

    def is_simple(self) -> bool:
        return len(self.pairs) == 1 and self.pairs[0][0] == 1

    def encode(self) -> str:
        """``e1xb1,e2xb2`` for one-vertex types; vectors joined by ``:``."""
        return ",".join(f"{m}x{':'.join(map(str, d))}" for m, d in self.pairs)

    @classmethod
    def decode(cls, text: str) -> "RepType":
        pairs = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            try:
                m, d = chunk.split("x")
                pairs.append((int(m), tuple(int(x) for x in d.split(":"))))
            except ValueError as exc:
                raise DomainError(f"cannot parse type component {chunk!r}") from exc
        return cls(tuple(pairs))

    def __str__(self) -> str:
        return "{" + ", ".join(f"({m},{d[0] if len(d) == 1 else d})" for m, d in self.pairs) + "}"


@dataclass(frozen=True)
class LocalQuiverData:
    quiver: Quiver
    dims: tuple[int, ...]
    vertex_labels: tuple[tuple[int, ...], ...] = field(default=())


def _vector_pairs(target: tuple[int, ...]) -> list[Pair]:
    pairs = []
    for vec in itertools.product(*(range(x + 1) for x in target)):
        if not any(vec):
            continue
        m = 1
        while all(m * v <= t for v, t in zip(vec, target)):
            pairs.append((m, vec))
            m += 1
    return sorted(pairs, key=_sort_key, reverse=True)


def enumerate_vector_types(target: Sequence[int]) -> list[RepType]:
    """All multisets of pairs ``(m, v)`` with ``sum m*v == target``."""
    target = tuple(int(x) for x in target)
    if any(x < 0 for x in target) or not any(target):
        raise DomainError(f"bad target {target}")
    candidates = _vector_pairs(target)
    out: list[RepType] = []

    def rec(start: int, remaining: tuple[int, ...], chosen: list[Pair]) -> None:
        if not any(remaining):
            out.append(RepType(tuple(chosen)))
            return
        for k in range(start, len(candidates)):
            m, v = candidates[k]
            if all(m * x <= r for x, r in zip(v, remaining)):
                chosen.append((m, v))
                rec(k, tuple(r - m * x for x, r in zip(v, remaining)), chosen)
                chosen.pop()

    rec(0, target, [])
    return out


def enumerate_rep_types(g: int, n: int) -> list[RepType]:
    """Types occurring in the zero locus for one vertex with ``g`` loops.

    With ``g >= 2`` every positive dimension carries simples, so a type
    occurs exactly when ``sum e_i * beta_i == n``.
    """
    if g < 2:
        raise DomainError("need g >= 2")
    if n < 1:
        raise DomainError("need n >= 1")
    return enumerate_vector_types((n,))


def _local_quiver_ordered(q: Quiver, pairs: Sequence[Pair]) -> LocalQuiverData:
    betas = [check_dims(q, d, allow_zero=False) for _, d in pairs]
    loops = []
    for i, b in enumerate(betas):
        c = p_value(q, b)
        if c < 0:
            raise InvalidTypeError(f"p_Q({b}) = {c} < 0 at vertex {i}")
        loops.append(c)
    cross = {}
    for i in range(len(betas)):
        for j in range(i + 1, len(betas)):
            c = -sym_form(q, betas[i], betas[j])
            if c < 0:
                raise InvalidTypeError(f"negative arrow count {c} between {i} and {j}")
            cross[(i, j)] = c
    return LocalQuiverData(
        quiver_from_counts(loops, cross),
        tuple(m for m, _ in pairs),
        tuple(betas),
    )


def local_quiver(q: Quiver, tau: RepType) -> LocalQuiverData:
    """The quiver whose vertex ``i`` stands for the ``i``-th simple summand.

    Vertex ``i`` carries ``p_Q(beta_i)`` loops and vertices ``i != j`` are
    joined by ``-(beta_i, beta_j)_Q`` arrows, oriented from ``min`` to ``max``.
    """
    return _local_quiver_ordered(q, tau.pairs)


def trivial_type(dims: Sequence[int]) -> RepType:
    dims = tuple(int(x) for x in dims)
    if any(x < 0 for x in dims) or not any(dims):
        raise DomainError("trivial type of a zero or negative vector")
    r = len(dims)
    return RepType(
        tuple((a, tuple(int(k == i) for k in range(r))) for i, a in enumerate(dims) if a > 0)
    )


def _compose_pairs(tau: RepType, tau_prime: RepType) -> list[Pair]:
    r = len(tau)
    if any(len(d) != r for d in tau_prime.dims):
        raise DimensionMismatchError(
            f"tau' lives on {len(tau_prime.dims[0])} vertices but tau has {r} pairs"
        )
    width = len(tau.dims[0])
    out = []
    for mult, coeffs in tau_prime.pairs:
        vec = tuple(sum(coeffs[i] * tau.dims[i][k] for i in range(r)) for k in range(width))
        out.append((mult, vec))
    return out


def compose_types(tau: RepType, tau_prime: RepType) -> RepType:
    """The type on ``(Q, alpha)`` obtained by iterating the construction."""
    return RepType(tuple(_compose_pairs(tau, tau_prime)))


@dataclass
class IterationReport:
    consistent: bool
    iterated: tuple[tuple[int, ...], ...]
    direct: tuple[tuple[int, ...], ...]
    dims_iterated: tuple[int, ...]
    dims_direct: tuple[int, ...]
    composed: RepType


def check_iteration_consistency(q: Quiver, tau: RepType, tau_prime: RepType) -> IterationReport:
    """Compare ``(Q_tau)_tau'`` with ``Q_nu`` for the composed type ``nu``.

    Vertex ``j`` of both sides is the ``j``-th pair of ``tau'``; the
    comparison is by double adjacency so arrow orientation is ignored.
    """
    inner = local_quiver(q, tau)
    iterated = local_quiver(inner.quiver, tau_prime)
    pairs = _compose_pairs(tau, tau_prime)
    direct = _local_quiver_ordered(q, pairs)
    a = iterated.quiver.double_adjacency()
    b = direct.quiver.double_adjacency()
    return IterationReport(
        consistent=(a == b and iterated.dims == direct.dims),
        iterated=a,
        direct=b,
        dims_iterated=iterated.dims,
        dims_direct=direct.dims,
        composed=RepType(tuple(pairs)),
    )


def iteration_pairs(g: int, n_max: int) -> Iterable[tuple[Quiver, RepType, RepType]]:
    """Every ``(Q_g, tau, tau')`` with ``tau`` at ``n <= n_max``."""
    q = Quiver.loops(g)
    for n in range(1, n_max + 1):
        for tau in enumerate_rep_types(g, n):
            for tau_prime in enumerate_vector_types(tau.mults):
                yield q, tau, tau_prime


def random_iteration_pairs(
    g: int, n_max: int, count: int, seed: int = 0
) -> list[tuple[Quiver, RepType, RepType]]:
    rng = random.Random(seed)
    q = Quiver.loops(g)
    types = {n: enumerate_rep_types(g, n) for n in range(1, n_max + 1)}
    out = []
    for _ in range(count):
        n = rng.randint(1, n_max)
        tau = rng.choice(types[n])
        tau_prime = rng.choice(enumerate_vector_types(tau.mults))
        out.append((q, tau, tau_prime))
    return out
