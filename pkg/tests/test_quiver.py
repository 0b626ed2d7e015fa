import pytest
from hypothesis import given, strategies as st

from dtmotive.dsl import builtin
from dtmotive.quiver import (
    Arrow,
    LinearPotential,
    Quiver,
    ambient_dims,
    arrow_split,
    dimvec,
    dot,
    euler_form,
    framed_dimension,
    validate_potential,
)

ONE_VERTEX = Quiver(("0",), (Arrow("x", "0", "0"), Arrow("y", "0", "0"), Arrow("z", "0", "0")))


def pot(linear, reduced):
    return LinearPotential(tuple((1, a) for a in linear), tuple((c, tuple(p.split("*"))) for c, p in reduced))


def rules(q, w):
    return {v.rule for v in validate_potential(q, w)}


def test_euler_form_examples(z2):
    for m in range(4):
        for n in range(4):
            assert euler_form(ONE_VERTEX, (m,), (n,)) == -2 * m * n
    bare = Quiver(("a", "b"), ())
    assert euler_form(bare, (2, 3), (5, 7)) == 31
    assert euler_form(z2.quiver, (1, 1), (1, 1)) == -4


def test_dot_examples():
    assert dot((1, 0), (1, 1)) == 1
    assert dot((3, 4), (0, 0)) == 0
    assert dot((2, 1), (1, 1)) == 3
    with pytest.raises(ValueError):
        dot((1,), (1, 2))


def test_euler_form_index_mismatch():
    with pytest.raises(ValueError):
        euler_form(ONE_VERTEX, (1, 2), (1,))


def test_validate_examples():
    assert validate_potential(ONE_VERTEX, pot("x", [(1, "y*z"), (-1, "z*y")])) == []
    assert "at most one arrow per vertex pair in L" in rules(ONE_VERTEX, pot("xy", [(1, "z")]))
    assert "arrow of L occurs in R" in rules(ONE_VERTEX, pot("x", [(1, "x*y")]))


def test_validate_composability():
    q = Quiver(("0", "1"), (Arrow("a", "0", "1"), Arrow("b", "0", "1"), Arrow("c", "1", "0")))
    assert "paths compose" in rules(q, pot("c", [(1, "a*b")]))
    # R must run from the head of the L-arrow back to its tail
    assert "L*R is a sum of cycles" in rules(q, pot("a", [(1, "b")]))
    assert validate_potential(q, pot("c", [(1, "a")])) == []


def test_quiver_construction_errors():
    with pytest.raises(ValueError):
        Quiver(("0", "0"), ())
    with pytest.raises(ValueError):
        Quiver(("0",), (Arrow("x", "0", "1"),))
    with pytest.raises(ValueError):
        Quiver(("0",), (Arrow("x", "0", "0"), Arrow("x", "0", "0")))


def test_arrow_split_examples(c3, z2):
    a, b = arrow_split(c3.quiver, c3.potential)
    assert set(a) == {"x"} and set(b) == {"y", "z"}
    a, b = arrow_split(z2.quiver, z2.potential)
    assert set(a) == {"x0", "x1"} and set(b) == {"a0", "a1", "b0", "b1"}


def test_ambient_dims_examples(c3, z2):
    assert ambient_dims(c3.quiver, c3.potential, (2,)) == (4, 8)
    assert ambient_dims(c3.quiver, c3.potential, (0,)) == (0, 0)
    assert ambient_dims(z2.quiver, z2.potential, (0, 0)) == (0, 0)
    assert ambient_dims(z2.quiver, z2.potential, (2, 1)) == (5, 8)


def test_dimvec_mapping(z2):
    assert dimvec(z2.quiver, {"1": 2}) == (0, 2)
    assert dimvec(z2.quiver, [1, 2]) == (1, 2)
    with pytest.raises(ValueError):
        dimvec(z2.quiver, (1, -1))


vecs3 = st.lists(st.integers(0, 5), min_size=3, max_size=3).map(tuple)


@given(vecs3, vecs3, vecs3)
def test_euler_form_bilinear(u, v, w):
    q = builtin("orbifold", 3).quiver
    add = tuple(a + b for a, b in zip(u, v))
    assert euler_form(q, add, w) == euler_form(q, u, w) + euler_form(q, v, w)
    assert euler_form(q, w, add) == euler_form(q, w, u) + euler_form(q, w, v)


@given(vecs3, vecs3)
def test_dimension_identity(v, f):
    # <v,v> = dim GL(v) - dim of representations, and framing adds f.v
    q = builtin("orbifold", 3).quiver
    gl = sum(x * x for x in v)
    reps = sum(v[q.vertex_index(a.tail)] * v[q.vertex_index(a.head)] for a in q.arrows)
    assert euler_form(q, v, v) == gl - reps
    assert framed_dimension(q, v, f) == dot(f, v) - euler_form(q, v, v)
