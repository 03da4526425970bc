from __future__ import annotations

import pytest

from quivjet.bounds import (
    BudgetExceededError,
    ExcludedTypeError,
    cb_dimension_bound,
    check_eqclass,
    check_final_inequality,
    check_prop_nil,
    enumerate_top_types,
    nilpotent_target,
    p_form_target,
    reduction_chain,
    simple_locus_dimension,
    z_sequence,
)
from quivjet.quiver import Quiver, p_loops
from quivjet.reptypes import RepType, enumerate_rep_types, local_quiver


def test_top_types_small():
    assert enumerate_top_types([1]) == [((0, 1),)]
    assert enumerate_top_types([2]) == [((0, 2),), ((0, 1), (0, 1))]
    assert len(enumerate_top_types([1, 1])) == 2


def test_top_type_count_is_compositions():
    # sequences of (vertex, m) for e=(3,): compositions of 3
    assert len(enumerate_top_types([3])) == 4
    with pytest.raises(BudgetExceededError):
        enumerate_top_types([7, 7], budget=12)


def test_z_sequence():
    assert z_sequence(((0, 1), (0, 2), (1, 1), (0, 1)), [2, 0]) == [0, 1, 0, 2]
    assert z_sequence(((0, 1), (0, 1)), [0]) == [0, 0]


def test_bound_by_hand():
    # g=2, tau={(2,1)}: one vertex, 2 loops, e=2
    lq = local_quiver(Quiver.loops(2), RepType.of((2, 1)))
    assert cb_dimension_bound(((0, 2),), lq) == 4 - 1 + 5 - 4 * 2
    assert cb_dimension_bound(((0, 1), (0, 1)), lq) == 4 - 1 + 5 + 1 - 2 * 2


@pytest.mark.parametrize("g", [2, 3])
def test_prop_nil_grid(g):
    for n in range(2, 7):
        for tau in enumerate_rep_types(g, n):
            if tau.is_simple():
                continue
            rep = check_prop_nil(g, n, tau)
            assert rep.passed, (g, n, tau, rep.max_bound, rep.target)


def test_simple_type_excluded():
    with pytest.raises(ExcludedTypeError):
        check_prop_nil(2, 3, RepType.of((1, 3)))


def test_target_forms():
    tau = RepType.of((1, 1), (1, 1))
    assert nilpotent_target(2, 2, tau) == 4
    assert p_form_target(2, 2, tau) == 2 * p_loops(2, 2) - 2 * 2 * p_loops(2, 1)
    rep = check_prop_nil(2, 2, tau)
    assert rep.passed and not rep.p_form_passed


def test_targets_agree_for_one_summand():
    for n, b in ((4, 2), (6, 3), (6, 2)):
        tau = RepType.of((n // b, b))
        assert nilpotent_target(2, n, tau) == p_form_target(2, n, tau)


def test_eqclass_report_fields():
    lq = local_quiver(Quiver.loops(2), RepType.of((2, 1)))
    rep = check_eqclass(lq, 0)
    assert rep.loops == 2 and rep.p == 5
    assert rep.threshold == 6 and rep.holds
    assert rep.z_dim_bound == 4 and rep.certifies_z


def test_final_inequality_edges():
    s = check_final_inequality([1, 1], [1, 1])
    assert (s.lhs, s.rhs, s.strict) == (4, 4, False)
    for n in range(2, 7):
        s = check_final_inequality([n], [1])
        assert (s.lhs, s.rhs) == (n * n + 1, n * n)


def test_reduction_chain_keys():
    tau = RepType.of((2, 1), (1, 1))
    chain = reduction_chain(2, tau, ((0, 2), (1, 1)))
    assert set(chain) == {"tt2", "tt3", "tt4"}


def test_simple_locus():
    assert simple_locus_dimension(2, 2) == 3 + 10
