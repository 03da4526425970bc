from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quivjet.quiver import (
    DimensionMismatchError,
    DomainError,
    Quiver,
    build_class_c_quiver,
    class_c_literal_cross,
    double_quiver,
    euler_form,
    p_loops,
    p_value,
    rep_space_dim,
    reorient,
    sym_form,
)


@st.composite
def quiver_and_dims(draw, max_vertices=3):
    r = draw(st.integers(1, max_vertices))
    arrows = draw(st.lists(st.tuples(st.integers(0, r - 1), st.integers(0, r - 1)), max_size=6))
    dims = draw(st.lists(st.integers(0, 4), min_size=r, max_size=r))
    other = draw(st.lists(st.integers(0, 4), min_size=r, max_size=r))
    return Quiver(r, tuple(arrows)), dims, other


def test_loop_quiver_values():
    q = Quiver.loops(2)
    assert euler_form(q, [2], [2]) == -4
    assert sym_form(q, [2], [2]) == -8
    assert p_value(q, [2]) == 5 == p_loops(2, 2)
    assert p_value(Quiver.loops(3), [3]) == 19


def test_two_vertex_example():
    q = Quiver(2, ((0, 1), (0, 1), (1, 1)))
    assert euler_form(q, [1, 2], [3, 1]) == 3 + 2 - 2 * 1 * 1 - 2 * 1
    assert p_value(q, [1, 1]) == 1 - (1 + 1 - 2 - 1)


@given(quiver_and_dims())
def test_sym_form_symmetric_and_p(data):
    q, a, b = data
    assert sym_form(q, a, b) == sym_form(q, b, a)
    assert p_value(q, a) == 1 - euler_form(q, a, a)


@given(quiver_and_dims(), st.data())
def test_orientation_independence(data, draw):
    q, a, b = data
    flip = draw.draw(st.lists(st.integers(0, max(len(q.arrows) - 1, 0)), max_size=len(q.arrows)))
    q2 = reorient(q, flip if q.arrows else [])
    assert sym_form(q2, a, b) == sym_form(q, a, b)
    assert p_value(q2, a) == p_value(q, a)


@given(quiver_and_dims())
def test_double_quiver_dimension(data):
    q, a, _ = data
    if not any(a):
        return
    dq = double_quiver(q)
    assert len(dq.arrows) == 2 * len(q.arrows)
    dot = sum(x * x for x in a)
    assert rep_space_dim(dq, a) == 2 * (dot - 1 + p_value(q, a))


def test_dimension_checks():
    q = Quiver.loops(2)
    with pytest.raises(DimensionMismatchError):
        euler_form(q, [1, 2], [1])
    with pytest.raises(DomainError):
        p_value(q, [-1])
    with pytest.raises((DomainError, ValueError)):
        Quiver(1, ((0, 1),))


@pytest.mark.parametrize("g", [2, 3, 4])
@pytest.mark.parametrize("betas", [[1], [1, 1], [1, 2], [2, 1, 3]])
def test_class_c_p_invariant(g, betas):
    q = build_class_c_quiver(g, betas)
    for e in ([1] * len(betas), [2] + [1] * (len(betas) - 1)):
        n = sum(x * b for x, b in zip(e, betas))
        assert p_value(q, e) == 1 + (g - 1) * n * n


def test_class_c_literal_formula_breaks_invariant():
    # Halving the cross arrows changes p at e = (1, 1).
    assert class_c_literal_cross(2, 1, 1) * 2 == build_class_c_quiver(2, [1, 1]).arrows.count((0, 1))
    with pytest.raises(DomainError):
        build_class_c_quiver(1, [1])
    with pytest.raises(DomainError):
        build_class_c_quiver(2, [0])
