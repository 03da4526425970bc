"""Dimension bounds for nilpotent fibres of local quivers.

A top-type is stored as a tuple of ``(vertex, multiplicity)`` steps with
0-based vertices.  ``loop_p[i]`` always means ``p`` of the local quiver at
the ``i``-th basis vector.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .quiver import DomainError, Quiver, p_loops, p_value
from .reptypes import LocalQuiverData, RepType, local_quiver

DEFAULT_TOP_TYPE_BUDGET = 12


class BudgetExceededError(RuntimeError):
    pass


class ExcludedTypeError(ValueError):
    """The simple type ``{(1, n)}``, where the strict bound is known to fail."""


TopType = tuple[tuple[int, int], ...]


def enumerate_top_types(e: Sequence[int], budget: int = DEFAULT_TOP_TYPE_BUDGET) -> list[TopType]:
    """All step sequences whose per-vertex multiplicities add up to ``e``."""
    e = tuple(int(x) for x in e)
    if not e or any(x < 1 for x in e):
        raise DomainError(f"top-types need positive multiplicities, got {e}")
    if sum(e) > budget:
        raise BudgetExceededError(
            f"sum(e) = {sum(e)} exceeds the top-type budget {budget}"
        )
    out: list[TopType] = []
    steps: list[tuple[int, int]] = []

    def rec(rest: list[int]) -> None:
        if not any(rest):
            out.append(tuple(steps))
            return
        for j, left in enumerate(rest):
            for m in range(left, 0, -1):
                steps.append((j, m))
                rest[j] -= m
                rec(rest)
                rest[j] += m
                steps.pop()

    rec(list(e))
    return out


def z_sequence(t: TopType, loop_p: Sequence[int]) -> list[int]:
    z = []
    last: dict[int, int] = {}
    for j, m in t:
        z.append(0 if loop_p[j] == 0 or j not in last else last[j])
        last[j] = m
    return z


def _check_top_type(t: TopType, dims: Sequence[int]) -> None:
    sums = [0] * len(dims)
    for j, m in t:
        if not 0 <= j < len(dims) or m < 1:
            raise DomainError(f"bad step ({j}, {m})")
        sums[j] += m
    if tuple(sums) != tuple(dims):
        raise DomainError(f"top-type {t} does not match dims {tuple(dims)}")


def basis_p_values(lq: LocalQuiverData) -> list[int]:
    r = lq.quiver.vertex_count
    return [p_value(lq.quiver, [int(k == i) for k in range(r)]) for i in range(r)]


def cb_dimension_bound(t: TopType, lq: LocalQuiverData) -> int:
    _check_top_type(t, lq.dims)
    e = lq.dims
    loop_p = basis_p_values(lq)
    z = z_sequence(t, loop_p)
    value = sum(x * x for x in e) - 1 + p_value(lq.quiver, e)
    value += sum(m * zs for (_, m), zs in zip(t, z))
    value -= sum(m * m * loop_p[j] for j, m in t)
    return value


def _betas(tau: RepType) -> list[int]:
    if any(len(d) != 1 for d in tau.dims):
        raise DomainError("expected a type for the one-vertex quiver")
    return [d[0] for d in tau.dims]


def _check_type(n: int, tau: RepType) -> None:
    if tau.total != (n,):
        raise DomainError(f"type {tau} does not add up to n = {n}")


def nilpotent_target(g: int, n: int, tau: RepType) -> int:
    """Right-hand side ``2(g-1)(n^2 - sum beta_i^2)``.

    This is the closed form used to establish the strict bound.  It agrees
    with ``p_form_target`` only for single-pair types; see that function.
    """
    _check_type(n, tau)
    return 2 * (g - 1) * (n * n - sum(b * b for b in _betas(tau)))


def p_form_target(g: int, n: int, tau: RepType) -> int:
    """``2 p_Q(n) - 2 sum_i p_Q(beta_i)``, i.e. twice ``p`` minus the loops.

    Equals ``nilpotent_target - 2(r - 1)`` for a type with ``r`` pairs.
    """
    _check_type(n, tau)
    return 2 * p_loops(g, n) - 2 * sum(p_loops(g, b) for b in _betas(tau))


@dataclass
class BoundReport:
    g: int
    n: int
    tau: RepType
    per_top_type: list[tuple[TopType, int]]
    max_bound: int
    target: int
    passed: bool
    p_form_target: int
    p_form_passed: bool
    argmax: TopType = field(default=())


def check_prop_nil(g: int, n: int, tau: RepType, budget: int = DEFAULT_TOP_TYPE_BUDGET) -> BoundReport:
    """Maximum of the top-type bound against the nilpotent target."""
    if g < 2:
        raise DomainError("need g >= 2")
    _check_type(n, tau)
    if tau.is_simple():
        raise ExcludedTypeError(f"{tau} is the simple type; the strict bound does not hold there")
    lq = local_quiver(Quiver.loops(g), tau)
    rows = [(t, cb_dimension_bound(t, lq)) for t in enumerate_top_types(lq.dims, budget)]
    best_t, best = max(rows, key=lambda row: row[1])
    target = nilpotent_target(g, n, tau)
    pf = p_form_target(g, n, tau)
    return BoundReport(
        g=g,
        n=n,
        tau=tau,
        per_top_type=rows,
        max_bound=best,
        target=target,
        passed=best < target,
        p_form_target=pf,
        p_form_passed=best < pf,
        argmax=best_t,
    )


@dataclass
class EqClassReport:
    holds: bool
    z_dim_bound: int
    fiber_bound: int
    loops: int
    p: int
    threshold: int
    certifies_z: bool


def check_eqclass(lq: LocalQuiverData, fiber_dim_bound: int) -> EqClassReport:
    """Criterion ``fiber < 2(p - loops)`` and the implied bound on ``dim Z``.

    The fixed locus has dimension ``2 * loops`` (scalars on each loop and its
    reverse), so ``dim Z <= 2 * loops + fiber``.  ``certifies_z`` reports
    whether that bound is strictly below ``2p``.
    """
    loops = lq.quiver.loop_total()
    p = p_value(lq.quiver, lq.dims)
    threshold = 2 * (p - loops)
    z_bound = 2 * loops + fiber_dim_bound
    return EqClassReport(
        holds=fiber_dim_bound < threshold,
        z_dim_bound=z_bound,
        fiber_bound=fiber_dim_bound,
        loops=loops,
        p=p,
        threshold=threshold,
        certifies_z=z_bound < 2 * p,
    )


def simple_locus_dimension(g: int, n: int) -> int:
    """Dimension ``n^2 - 1 + 2 p_Q(n)`` of the simple locus."""
    return n * n - 1 + 2 * p_loops(g, n)


@dataclass
class InequalitySides:
    lhs: int
    rhs: int

    @property
    def strict(self) -> bool:
        return self.lhs < self.rhs


def check_final_inequality(a: Sequence[int], betas: Sequence[int]) -> InequalitySides:
    """``sum A_i^2 + sum beta_i^2`` against ``(sum beta_i A_i)^2``."""
    if not a or len(a) != len(betas):
        raise DomainError("need two nonempty sequences of equal length")
    lhs = sum(x * x for x in a) + sum(b * b for b in betas)
    rhs = sum(x * b for x, b in zip(a, betas)) ** 2
    return InequalitySides(lhs, rhs)


def reduction_chain(g: int, tau: RepType, t: TopType) -> dict[str, InequalitySides]:
    """The intermediate inequalities for one top-type, as diagnostics.

    ``tt2`` is the bound at general ``g``, ``tt3`` its ``g = 2``
    specialisation, ``tt4`` the final form with ``A_i = e_i``.
    """
    betas = _betas(tau)
    e = tau.mults
    n = sum(m * b for m, b in zip(e, betas))
    _check_top_type(t, e)
    lq = local_quiver(Quiver.loops(g), tau)
    z = z_sequence(t, basis_p_values(lq))
    mz = sum(m * zs for (_, m), zs in zip(t, z))
    sb2 = sum(b * b for b in betas)
    tt2 = InequalitySides(
        sum(x * x for x in e) + mz - sum(m * m * (1 + (g - 1) * betas[j] ** 2) for j, m in t),
        (g - 1) * n * n - 2 * (g - 1) * sb2,
    )
    tt3 = InequalitySides(
        sum(x * x for x in e) + mz + 2 * sb2,
        sum(m * m for _, m in t)
        + sum(m * m * betas[j] ** 2 for j, m in t)
        + sum(m * betas[j] for j, m in t) ** 2,
    )
    return {"tt2": tt2, "tt3": tt3, "tt4": check_final_inequality(e, betas)}
