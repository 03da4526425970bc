from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quivjet.quiver import DomainError, Quiver, p_loops, p_value
from quivjet.reptypes import (
    RepType,
    check_iteration_consistency,
    compose_types,
    enumerate_rep_types,
    enumerate_vector_types,
    iteration_pairs,
    local_quiver,
    random_iteration_pairs,
    trivial_type,
)


def test_type_counts():
    # partitions of n into parts e*b, counted with multiplicity: 1, 3, 5, 11, 17, 34
    assert [len(enumerate_rep_types(2, n)) for n in range(1, 7)] == [1, 3, 5, 11, 17, 34]


def test_types_sum_to_n():
    for n in range(1, 7):
        for tau in enumerate_rep_types(3, n):
            assert tau.total == (n,)


def test_encode_roundtrip_and_order():
    tau = RepType.of((1, 1), (2, 1), (1, 2))
    assert tau.encode() == "1x2,2x1,1x1"
    assert RepType.decode(tau.encode()) == tau
    assert str(RepType.of((1, 1), (1, 1))) == "{(1,1), (1,1)}"
    assert RepType.decode("1x1:0,1x0:1").dims == ((1, 0), (0, 1))


@pytest.mark.parametrize("text", ["", "1x", "x2", "0x1", "1x0", "ax1"])
def test_decode_rejects(text):
    with pytest.raises(DomainError):
        RepType.decode(text)


def test_local_quiver_two_simples():
    lq = local_quiver(Quiver.loops(2), RepType.of((1, 1), (1, 1)))
    assert lq.quiver.loop_counts() == [2, 2]
    assert lq.quiver.arrows.count((0, 1)) == 2
    assert p_value(lq.quiver, lq.dims) == p_loops(2, 2)


@pytest.mark.parametrize("g", [2, 3])
def test_p_invariant_all_types(g):
    for n in range(1, 7):
        for tau in enumerate_rep_types(g, n):
            lq = local_quiver(Quiver.loops(g), tau)
            assert p_value(lq.quiver, lq.dims) == p_loops(g, n)


def test_trivial_type_is_identity_for_iteration():
    q = Quiver.loops(2)
    tau = RepType.of((2, 1), (1, 2))
    triv = trivial_type(tau.mults)
    assert compose_types(tau, triv) == tau
    assert check_iteration_consistency(q, tau, triv).consistent


def test_iteration_exhaustive_small():
    bad = [(t, tp) for q, t, tp in iteration_pairs(2, 4) if not check_iteration_consistency(q, t, tp).consistent]
    assert bad == []


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_iteration_random(seed):
    for q, t, tp in random_iteration_pairs(3, 5, 4, seed):
        rep = check_iteration_consistency(q, t, tp)
        assert rep.consistent
        assert rep.composed.total == t.total


def test_vector_types_two_vertices():
    types = enumerate_vector_types((1, 1))
    assert {t.encode() for t in types} == {"1x1:1", "1x1:0,1x0:1"}
