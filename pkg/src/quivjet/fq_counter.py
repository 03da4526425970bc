"""Exact point counts of moment-map zero loci and their jet schemes over F_p.

The equations are bilinear in forward and reverse arrow variables.  Once
all forward jets are fixed the system is linear in the reverse jets, so a
count is ``sum_x p^(#reverse - rank)`` over forward tuples ``x``, restricted
to consistent systems when pinned values leave constant terms behind.

Forward tuples are split into an outer part, enumerated one at a time, and
an inner block handled as a numpy batch.  Rows that do not involve the
inner block are solved once per outer tuple, and the remaining rows are
projected onto the cokernel of their inner-independent columns before the
batched rank, which keeps the batched matrices small.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .linalg import batched_rank, is_prime, kernel, left_annihilator, rank, solve
from .polysys import PolySystem, jet_system
from .quiver import DomainError, Quiver, check_dims, p_value, rep_space_dim

DEFAULT_BUDGET = 2**26
INNER_CAP = 2**14
WORKERS_ENV = "QUIVJET_WORKERS"


class BudgetExceededError(RuntimeError):
    def __init__(self, cost: int, budget: int, what: str = "forward tuples") -> None:
        super().__init__(f"needs {cost} {what}, budget is {budget}")
        self.cost = cost
        self.budget = budget


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return 1


@dataclass
class BilinearSystem:
    """Equations ``sum u_l w_k T[l,k,e] + u Lu + w Lw + c = 0`` over F_p.

    ``u`` are forward variables, ``w`` reverse ones.  ``groups`` labels each
    forward variable (the jet order for jet systems).
    """

    p: int
    t: np.ndarray
    lu: np.ndarray
    lw: np.ndarray
    c: np.ndarray
    groups: np.ndarray

    @property
    def n_forward(self) -> int:
        return self.t.shape[0]

    @property
    def n_reverse(self) -> int:
        return self.t.shape[1]

    @property
    def n_equations(self) -> int:
        return self.t.shape[2]

    def key(self) -> bytes:
        parts = [np.array(self.t.shape + (self.p,), dtype=np.int64)]
        parts += [a.astype(np.int64).ravel() for a in (self.t, self.lu, self.lw, self.c, self.groups)]
        return b"".join(a.tobytes() for a in parts)

    def matrix(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``(M, b)`` with ``M w = b`` the linear system at forward values ``u``."""
        p = self.p
        u = np.asarray(u, dtype=np.int64)
        m = (np.tensordot(u, self.t, axes=(0, 0)).T + self.lw.T) % p
        b = -(self.c + u @ self.lu) % p
        return m, b

    def slice_count(self, u: np.ndarray) -> int:
        """Reverse solutions at one forward tuple, by a single rank."""
        m, b = self.matrix(u)
        if solve(m, b, self.p) is None:
            return 0
        return self.p ** (self.n_reverse - rank(m, self.p))


def bilinear_from_polysystem(ps: PolySystem, p: int) -> BilinearSystem:
    fwd = [i for i, v in enumerate(ps.variables) if v.direction == "f"]
    rev = [i for i, v in enumerate(ps.variables) if v.direction == "r"]
    fpos = {v: k for k, v in enumerate(fwd)}
    rpos = {v: k for k, v in enumerate(rev)}
    ne = len(ps.equations)
    t = np.zeros((len(fwd), len(rev), ne), dtype=np.int64)
    lu = np.zeros((len(fwd), ne), dtype=np.int64)
    lw = np.zeros((len(rev), ne), dtype=np.int64)
    c = np.zeros(ne, dtype=np.int64)
    for e, poly in enumerate(ps.equations):
        for coef, mono in poly:
            fs = [fpos[v] for v in mono if v in fpos]
            rs = [rpos[v] for v in mono if v in rpos]
            if len(fs) + len(rs) != len(mono) or len(fs) > 1 or len(rs) > 1:
                raise DomainError("system is not bilinear in forward/reverse variables")
            if fs and rs:
                t[fs[0], rs[0], e] += coef
            elif fs:
                lu[fs[0], e] += coef
            elif rs:
                lw[rs[0], e] += coef
            else:
                c[e] += coef
    groups = np.array([ps.variables[i].jet for i in fwd], dtype=np.int64)
    return BilinearSystem(p, t % p, lu % p, lw % p, c % p, groups)


def pin(sys: BilinearSystem, fwd: dict[int, int], rev: dict[int, int]) -> BilinearSystem:
    """Substitute fixed values for some forward and reverse variables."""
    p = sys.p
    pu = np.array(sorted(fwd), dtype=np.int64)
    pw = np.array(sorted(rev), dtype=np.int64)
    vu = np.array([fwd[i] for i in sorted(fwd)], dtype=np.int64)
    vw = np.array([rev[i] for i in sorted(rev)], dtype=np.int64)
    keep_u = np.setdiff1d(np.arange(sys.n_forward), pu)
    keep_w = np.setdiff1d(np.arange(sys.n_reverse), pw)
    t = sys.t
    lu = sys.lu[keep_u] + np.einsum("k,lke->le", vw, t[keep_u][:, pw])
    lw = sys.lw[keep_w] + np.einsum("l,lke->ke", vu, t[pu][:, keep_w])
    c = sys.c + vu @ sys.lu[pu] + vw @ sys.lw[pw] + np.einsum("l,k,lke->e", vu, vw, t[pu][:, pw])
    return BilinearSystem(
        p, t[keep_u][:, keep_w] % p, lu % p, lw % p, c % p, sys.groups[keep_u]
    )


def reduce_system(sys: BilinearSystem) -> tuple[BilinearSystem | None, int]:
    """Drop vanishing equations and unused variables.

    Returns the reduced system (``None`` when some equation is a nonzero
    constant) and the number of unconstrained variables removed.
    """
    t, lu, lw, c = sys.t, sys.lu, sys.lw, sys.c
    live = t.any(axis=(0, 1)) | lu.any(axis=0) | lw.any(axis=0)
    if (c[~live] != 0).any():
        return None, 0
    t, lu, lw, c = t[:, :, live], lu[:, live], lw[:, live], c[live]
    used_u = t.any(axis=(1, 2)) | lu.any(axis=1)
    used_w = t.any(axis=(0, 2)) | lw.any(axis=1)
    free = int((~used_u).sum() + (~used_w).sum())
    reduced = BilinearSystem(
        sys.p, t[used_u][:, used_w], lu[used_u], lw[used_w], c, sys.groups[used_u]
    )
    return reduced, free


def _inner_split(sys: BilinearSystem) -> tuple[np.ndarray, np.ndarray]:
    p = sys.p
    nf = sys.n_forward
    if nf == 0:
        return np.arange(0), np.arange(0)
    cap = max(1, int(math.floor(math.log(INNER_CAP) / math.log(p) + 1e-9)))
    last = np.flatnonzero(sys.groups == sys.groups.max())
    if last.size > cap:
        last = last[-cap:]
    outer = np.setdiff1d(np.arange(nf), last)
    return outer, last


def cost(sys: BilinearSystem) -> int:
    return sys.p ** sys.n_forward


def _tuples(p: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.indices((p,) * k).reshape(k, -1).T
    return grid.astype(np.int64)


def _digits(index: int, p: int, k: int) -> np.ndarray:
    out = np.zeros(k, dtype=np.int64)
    for i in range(k - 1, -1, -1):
        index, out[i] = divmod(index, p)
    return out


@dataclass
class _Plan:
    sys: BilinearSystem
    outer: np.ndarray
    inner: np.ndarray
    rows0: np.ndarray
    rows1: np.ndarray


def _make_plan(sys: BilinearSystem) -> _Plan:
    outer, inner = _inner_split(sys)
    touched = sys.t[inner].any(axis=(0, 1)) | sys.lu[inner].any(axis=0)
    return _Plan(sys, outer, inner, np.flatnonzero(~touched), np.flatnonzero(touched))


def _count_range(plan: _Plan, start: int, stop: int) -> dict[int, int]:
    """Exponent histogram over outer indices ``start..stop-1``."""
    sys = plan.sys
    p = sys.p
    t_out = sys.t[plan.outer]
    lu_out = sys.lu[plan.outer]
    # inner coefficients restricted to touched rows: (I, |R1|, W)
    t_in = np.transpose(sys.t[plan.inner][:, :, plan.rows1], (0, 2, 1))
    lu_in = sys.lu[plan.inner][:, plan.rows1]
    xs = _tuples(p, plan.inner.size)
    hist: dict[int, int] = {}
    for idx in range(start, stop):
        u = _digits(idx, p, plan.outer.size)
        m = (np.tensordot(u, t_out, axes=(0, 0)).T + sys.lw.T) % p
        b = -(sys.c + u @ lu_out) % p
        m0, b0 = m[plan.rows0], b[plan.rows0]
        y0 = solve(m0, b0, p)
        if y0 is None:
            continue
        k = kernel(m0, p)
        m1, b1 = m[plan.rows1], b[plan.rows1]
        n0 = m1 @ k % p
        n_in = t_in @ k % p
        r0 = (b1 - m1 @ y0) % p
        r_in = (-lu_in - t_in @ y0) % p
        dep = n_in.any(axis=(0, 1))
        b_ind = n0[:, ~dep]
        rho = rank(b_ind, p)
        proj = left_annihilator(b_ind, p) if b_ind.shape[1] else np.eye(len(plan.rows1), dtype=np.int64)
        base = int((~dep).sum()) - rho
        pn0 = proj @ n0[:, dep] % p
        pn_in = np.einsum("ij,ljc->lic", proj, n_in[:, :, dep]) % p
        pr0 = proj @ r0 % p
        pr_in = r_in @ proj.T % p
        mx = (pn0[None] + np.einsum("bl,lic->bic", xs, pn_in)) % p
        rx = (pr0[None] + xs @ pr_in) % p
        rk = batched_rank(mx, p)
        if rx.any():
            ok = batched_rank(np.concatenate([mx, rx[:, :, None]], axis=2), p) == rk
        else:
            ok = np.ones(len(xs), dtype=bool)
        exps = base + int(dep.sum()) - rk[ok]
        for e, cnt in zip(*np.unique(exps, return_counts=True)):
            hist[int(e)] = hist.get(int(e), 0) + int(cnt)
    return hist


def _merge(hists: list[dict[int, int]]) -> dict[int, int]:
    out: dict[int, int] = {}
    for h in hists:
        for e, c in h.items():
            out[e] = out.get(e, 0) + c
    return out


def count_bilinear(sys: BilinearSystem, workers: int | None = None) -> int:
    """Exact number of F_p solutions of a bilinear system (no reduction)."""
    plan = _make_plan(sys)
    n_outer = sys.p ** plan.outer.size
    workers = workers or default_workers()
    chunks = min(n_outer, max(1, workers) * 4)
    bounds = [n_outer * i // chunks for i in range(chunks + 1)]
    ranges = [(bounds[i], bounds[i + 1]) for i in range(chunks) if bounds[i] < bounds[i + 1]]
    if workers <= 1 or len(ranges) == 1:
        hists = [_count_range(plan, a, b) for a, b in ranges]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hists = list(pool.map(_count_range, [plan] * len(ranges), *zip(*ranges)))
    hist = _merge(hists)
    return sum(c * sys.p**e for e, c in sorted(hist.items()))


def count_system(
    sys: BilinearSystem, budget: int = DEFAULT_BUDGET, workers: int | None = None
) -> int:
    reduced, free = reduce_system(sys)
    if reduced is None:
        return 0
    c = cost(reduced)
    if c > budget:
        raise BudgetExceededError(c, budget)
    return count_bilinear(reduced, workers) * sys.p**free


@dataclass
class CountResult:
    p: int
    params: dict
    jet_order: int
    count: int
    expected_exponent: int
    ratio: Fraction = field(init=False)

    def __post_init__(self) -> None:
        self.ratio = Fraction(self.count, self.p**self.expected_exponent)


def expected_dimension(q: Quiver, dims: Sequence[int]) -> int:
    """``alpha.alpha - 1 + 2 p_Q(alpha)``, the dimension when simples exist."""
    return sum(a * a for a in dims) - 1 + 2 * p_value(q, dims)


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")


def _params(q: Quiver, dims: Sequence[int]) -> dict:
    return {"vertices": q.vertex_count, "arrows": [list(a) for a in q.arrows], "dims": list(dims)}


def count_jet_points(
    q: Quiver,
    dims: Sequence[int],
    p: int,
    m: int,
    budget: int = DEFAULT_BUDGET,
    workers: int | None = None,
) -> CountResult:
    _check_prime(p)
    dims = check_dims(q, dims, allow_zero=False)
    sys = bilinear_from_polysystem(jet_system(q, dims, m), p)
    count = count_system(sys, budget, workers)
    return CountResult(p, _params(q, dims), m, count, expected_dimension(q, dims) * (m + 1))


def count_moment_points(
    q: Quiver, dims: Sequence[int], p: int, budget: int = DEFAULT_BUDGET, workers: int | None = None
) -> CountResult:
    return count_jet_points(q, dims, p, 0, budget, workers)


def fixed_locus_points(q: Quiver, dims: Sequence[int], p: int) -> list[tuple[dict, dict]]:
    """Base points with scalar matrices on loops and zero elsewhere.

    Each point is returned as ``(forward values, reverse values)`` keyed by
    the positions of the order-0 variables among forward / reverse ones.
    """
    dims = check_dims(q, dims)
    fpos = rpos = 0
    loop_slots = []
    zeros_f: dict[int, int] = {}
    zeros_r: dict[int, int] = {}
    for t, h in q.arrows:
        size = dims[t] * dims[h]
        f_idx = list(range(fpos, fpos + size))
        r_idx = list(range(rpos, rpos + size))
        fpos += size
        rpos += size
        if t == h and dims[t]:
            n = dims[t]
            diag = [k * n + k for k in range(n)]
            loop_slots.append((f_idx, r_idx, diag))
        else:
            zeros_f.update({i: 0 for i in f_idx})
            zeros_r.update({i: 0 for i in r_idx})
    points = []
    for scalars in itertools.product(range(p), repeat=2 * len(loop_slots)):
        fv, rv = dict(zeros_f), dict(zeros_r)
        for s, (f_idx, r_idx, diag) in enumerate(loop_slots):
            lam, mu = scalars[2 * s], scalars[2 * s + 1]
            for k, i in enumerate(f_idx):
                fv[i] = lam if k in diag else 0
            for k, i in enumerate(r_idx):
                rv[i] = mu if k in diag else 0
        points.append((fv, rv))
    return points


def count_jets_over_fixed(
    q: Quiver,
    dims: Sequence[int],
    p: int,
    m: int,
    budget: int = DEFAULT_BUDGET,
    workers: int | None = None,
) -> CountResult:
    """Number of ``m``-jets whose base point lies in the fixed locus.

    Each base point is substituted into the jet system; identical reduced
    systems are counted once.
    """
    if m < 1:
        raise DomainError("jets over the fixed locus need m >= 1")
    _check_prime(p)
    dims = check_dims(q, dims, allow_zero=False)
    sys = bilinear_from_polysystem(jet_system(q, dims, m), p)
    reduced: dict[bytes, tuple[BilinearSystem, int, int]] = {}
    for fv, rv in fixed_locus_points(q, dims, p):
        sub, free = reduce_system(pin(sys, fv, rv))
        if sub is None:
            continue
        key = sub.key() + free.to_bytes(4, "little")
        if key in reduced:
            s, f, mult = reduced[key]
            reduced[key] = (s, f, mult + 1)
        else:
            reduced[key] = (sub, free, 1)
    total_cost = sum(cost(s) for s, _, _ in reduced.values())
    if total_cost > budget:
        raise BudgetExceededError(total_cost, budget)
    total = 0
    for key in sorted(reduced):
        s, free, mult = reduced[key]
        total += mult * count_bilinear(s, workers) * p**free
    return CountResult(p, _params(q, dims), m, total, expected_dimension(q, dims) * (m + 1))


def fixed_locus_prediction(q: Quiver, dims: Sequence[int], p: int, m: int, lower: int | None) -> int:
    """Right-hand side of the product formula for jets over the fixed locus.

    ``lower`` is the count of ``(m-2)``-jets (ignored for ``m == 1``).
    """
    fixed = p ** (2 * sum(1 for t, h in q.arrows if t == h and dims[t]))
    rep = p ** (2 * rep_space_dim(q, dims))
    if m == 1:
        return fixed * rep
    return fixed * int(lower) * rep


def brute_force_count(ps: PolySystem, p: int, chunk: int = 2**16) -> int:
    """Count common zeros by evaluating every assignment of every variable."""
    nv = len(ps.variables)
    total = p**nv
    hits = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        vals = np.zeros((idx.size, nv), dtype=np.int64)
        rest = idx.copy()
        for k in range(nv - 1, -1, -1):
            vals[:, k] = rest % p
            rest //= p
        res = ps.evaluate(vals, p)
        hits += int((~res.any(axis=1)).sum())
    return hits


def brute_force_slice(sys: BilinearSystem, u: np.ndarray) -> int:
    """Reverse solutions at one forward tuple by enumerating all of them."""
    p = sys.p
    m, b = sys.matrix(u)
    ws = _tuples(p, sys.n_reverse)
    res = (ws @ m.T - b[None]) % p
    return int((~res.any(axis=1)).sum())


@dataclass
class DimensionReport:
    jet_order: int
    target: int
    rows: list[dict]
    band: tuple[float, float]
    flagged: list[int]
    note: str = "count ratios are heuristic diagnostics, not dimension proofs"


def estimate_dimension(counts: Sequence[CountResult], band: tuple[float, float] = (0.25, 4.0)) -> DimensionReport:
    if not counts:
        raise DomainError("no counts given")
    if len({(c.jet_order, c.expected_exponent, repr(c.params)) for c in counts}) != 1:
        raise DomainError("inconsistent parameters across counts")
    rows = []
    flagged = []
    for c in counts:
        log_p = math.log(c.count) / math.log(c.p) if c.count else float("-inf")
        ratio = c.ratio
        rows.append(
            {"p": c.p, "count": c.count, "log_p": log_p, "target": c.expected_exponent, "ratio": ratio}
        )
        if not band[0] <= float(ratio) <= band[1]:
            flagged.append(c.p)
    return DimensionReport(counts[0].jet_order, counts[0].expected_exponent, rows, band, flagged)


@dataclass
class JetRatioReport:
    g: int
    n: int
    p: int
    m_max: int
    rows: list[dict]
    identities: list[dict]
    truncated_at: int | None
    note: str = (
        "finite-field count ratios are a heuristic shadow of the jet-dimension "
        "criterion; small-prime counts prove nothing about dimensions"
    )


def jet_ratio_report(
    g: int, n: int, p: int, m_max: int, budget: int = DEFAULT_BUDGET, workers: int | None = None
) -> JetRatioReport:
    q = Quiver.loops(g)
    rows: list[dict] = []
    identities: list[dict] = []
    counts: dict[int, int] = {}
    truncated = None
    for m in range(m_max + 1):
        try:
            res = count_jet_points(q, (n,), p, m, budget, workers)
        except BudgetExceededError as exc:
            truncated = m
            rows.append({"m": m, "truncated": True, "reason": str(exc)})
            break
        counts[m] = res.count
        rows.append(
            {"m": m, "count": res.count, "exponent": res.expected_exponent, "ratio": res.ratio}
        )
    for m in range(1, m_max + 1):
        if m >= 2 and (m - 2) not in counts:
            break
        try:
            lhs = count_jets_over_fixed(q, (n,), p, m, budget, workers).count
        except BudgetExceededError as exc:
            identities.append({"m": m, "truncated": True, "reason": str(exc)})
            truncated = m if truncated is None else min(truncated, m)
            break
        rhs = fixed_locus_prediction(q, (n,), p, m, counts.get(m - 2))
        identities.append({"m": m, "lhs": lhs, "rhs": rhs, "exact": lhs == rhs})
    return JetRatioReport(g, n, p, m_max, rows, identities, truncated)
