from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quivjet.fq_counter import (
    BudgetExceededError,
    CountResult,
    bilinear_from_polysystem,
    brute_force_count,
    brute_force_slice,
    count_bilinear,
    count_jet_points,
    count_jets_over_fixed,
    count_moment_points,
    count_system,
    estimate_dimension,
    expected_dimension,
    fixed_locus_points,
    fixed_locus_prediction,
    jet_ratio_report,
    pin,
    reduce_system,
)
from quivjet.polysys import jet_system, moment_system
from quivjet.quiver import DomainError, Quiver

SMALL_QUIVERS = [
    (Quiver.loops(1), (1,)),
    (Quiver.loops(1), (2,)),
    (Quiver.loops(2), (1,)),
    (Quiver.loops(2), (2,)),
    (Quiver.loops(3), (1,)),
    (Quiver(2, ((0, 1),)), (1, 1)),
    (Quiver(2, ((0, 1),)), (2, 1)),
    (Quiver(2, ((0, 1), (0, 1))), (1, 1)),
    (Quiver(2, ((0, 0), (0, 1))), (1, 1)),
    (Quiver(2, ((0, 0), (0, 1))), (2, 1)),
    (Quiver(3, ((0, 1), (1, 2))), (1, 1, 1)),
]


def _oracle_cases(limit=2**20):
    for q, dims in SMALL_QUIVERS:
        for p in (2, 3, 5):
            for m in range(0, 4):
                nvars = len(jet_system(q, dims, m).variables)
                if p**nvars <= limit:
                    yield q, dims, p, m


@pytest.mark.parametrize("q,dims,p,m", list(_oracle_cases()))
def test_rank_sum_equals_enumeration(q, dims, p, m):
    ps = jet_system(q, dims, m)
    assert count_jet_points(q, dims, p, m).count == brute_force_count(ps, p)


def test_known_counts():
    assert count_moment_points(Quiver.loops(1), (2,), 2).count == 88
    assert count_moment_points(Quiver.loops(2), (2,), 2).count == 11776


@pytest.mark.parametrize("g", [1, 2, 3])
@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_affine_space_for_rank_one(g, p):
    for m in range(4):
        assert count_jet_points(Quiver.loops(g), (1,), p, m).count == p ** (2 * g * (m + 1))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from([(2, 1), (2, 2), (3, 1)]))
def test_slices_against_enumeration(seed, pm):
    p, m = pm
    sys = bilinear_from_polysystem(jet_system(Quiver.loops(2), (2,), m), p)
    rng = np.random.default_rng(seed)
    u = rng.integers(0, p, size=sys.n_forward)
    # pin trailing reverse variables at random values so enumeration stays small
    width = int(math.log(2**16, p))
    rest = {k: int(rng.integers(p)) for k in range(width, sys.n_reverse)}
    sub = pin(sys, {}, rest)
    assert sub.slice_count(u) == brute_force_slice(sub, u)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_pin_and_reduce_preserve_counts(seed):
    p = 3
    ps = jet_system(Quiver(2, ((0, 0), (0, 1))), (1, 1), 1)
    sys = bilinear_from_polysystem(ps, p)
    rng = np.random.default_rng(seed)
    fwd = {int(i): int(rng.integers(p)) for i in rng.choice(sys.n_forward, 2, replace=False)}
    rev = {int(i): int(rng.integers(p)) for i in rng.choice(sys.n_reverse, 1, replace=False)}
    pinned = pin(sys, fwd, rev)
    direct = sum(pinned.slice_count(u) for u in itertools.product(range(p), repeat=pinned.n_forward))
    red, free = reduce_system(pinned)
    via = 0 if red is None else count_bilinear(red) * p**free
    assert direct == via == count_system(pinned)


def test_inconsistent_constant_row():
    sys = bilinear_from_polysystem(moment_system(Quiver.loops(1), (1,)), 2)
    sys.c[0] = 1
    red, _ = reduce_system(sys)
    assert red is None
    assert count_system(sys) == 0


def test_budget_raises():
    with pytest.raises(BudgetExceededError):
        count_jet_points(Quiver.loops(2), (2,), 3, 2, budget=1000)


def test_not_prime():
    with pytest.raises(DomainError):
        count_jet_points(Quiver.loops(2), (2,), 4, 0)


@pytest.mark.parametrize("workers", [1, 2, 3])
def test_worker_count_does_not_change_counts(workers):
    q = Quiver.loops(2)
    assert count_moment_points(q, (2,), 3, workers=workers).count == 2106081
    assert count_jet_points(q, (2,), 2, 1, workers=workers).count == 111149056


def _fixed_jets_by_enumeration(q, dims, p, m):
    ps = jet_system(q, dims, m)
    sys = bilinear_from_polysystem(ps, p)
    fwd_ids = [i for i, v in enumerate(ps.variables) if v.direction == "f"]
    rev_ids = [i for i, v in enumerate(ps.variables) if v.direction == "r"]
    total = 0
    for fv, rv in fixed_locus_points(q, dims, p):
        vals = np.zeros(len(ps.variables), dtype=np.int64)
        for k, x in fv.items():
            vals[fwd_ids[k]] = x
        for k, x in rv.items():
            vals[rev_ids[k]] = x
        free = [i for i, v in enumerate(ps.variables) if v.jet > 0]
        grid = np.array(list(itertools.product(range(p), repeat=len(free))), dtype=np.int64)
        batch = np.repeat(vals[None], len(grid), axis=0)
        batch[:, free] = grid
        total += int((~ps.evaluate(batch, p).any(axis=1)).sum())
    return total


@pytest.mark.parametrize(
    "q,dims,p,m",
    [
        (Quiver.loops(1), (2,), 2, 1),
        (Quiver.loops(1), (2,), 3, 1),
        (Quiver.loops(2), (1,), 3, 2),
        (Quiver(2, ((0, 0), (0, 1))), (1, 1), 3, 1),
        (Quiver(2, ((0, 0), (0, 1))), (1, 1), 2, 2),
    ],
)
def test_jets_over_fixed_locus_by_enumeration(q, dims, p, m):
    assert count_jets_over_fixed(q, dims, p, m).count == _fixed_jets_by_enumeration(q, dims, p, m)


@pytest.mark.parametrize("p", [2, 3])
def test_fixed_locus_product_formula(p):
    q = Quiver.loops(2)
    lower = count_moment_points(q, (2,), p).count
    for m, low in ((1, None), (2, lower)):
        lhs = count_jets_over_fixed(q, (2,), p, m).count
        assert lhs == fixed_locus_prediction(q, (2,), p, m, low)


def test_fixed_locus_points_count():
    assert len(fixed_locus_points(Quiver.loops(2), (2,), 3)) == 3**4
    assert len(fixed_locus_points(Quiver(2, ((0, 1),)), (1, 1), 5)) == 1


def test_count_result_ratio():
    r = CountResult(2, {}, 0, 11776, 13)
    assert r.ratio == Fraction(11776, 2**13)
    assert expected_dimension(Quiver.loops(2), (2,)) == 13


def test_estimate_dimension():
    q = Quiver.loops(2)
    counts = [count_moment_points(q, (2,), p) for p in (2, 3)]
    rep = estimate_dimension(counts)
    assert rep.target == 13
    assert [row["p"] for row in rep.rows] == [2, 3]
    assert math.isclose(rep.rows[0]["log_p"], math.log2(11776))
    assert rep.flagged == []
    with pytest.raises(DomainError):
        estimate_dimension([])
    with pytest.raises(DomainError):
        estimate_dimension(counts + [count_jet_points(q, (2,), 2, 1)])


def test_ratio_report_truncates_on_budget():
    rep = jet_ratio_report(2, 2, 2, 2, budget=2**12)
    assert rep.truncated_at is not None
    assert rep.rows[0]["count"] == 11776
    rep = jet_ratio_report(2, 1, 3, 2)
    assert rep.truncated_at is None
    assert all(row["exact"] for row in rep.identities)
