import pytest

from dtmotive.dsl import builtin
from dtmotive.dt import dt_via_recursion
from dtmotive.motive import L, ONE, S, evaluate_at_prime
from dtmotive.oracles import (
    PluginValidationError,
    colored_partition_counts,
    commuting_series_plugin,
    compare_series,
    orbifold_product_formula,
    orbifold_product_series,
    plane_partitions,
    register_commuting_plugin,
)
from dtmotive.reduced import plugin_for, unregister_plugin
from dtmotive.series import Region

C3 = builtin("c3")


def test_product_formula_examples():
    one = orbifold_product_series(1, (2,))
    assert one.coeff((1,)) == S**3
    assert one.coeff((2,)) == L**3 + L**2 + L
    assert orbifold_product_series(2, (1, 1)).coeff((1, 0)) == S


def test_product_formula_box_zero():
    assert dict(orbifold_product_series(3, (0, 0, 0))) == {(0, 0, 0): ONE}


def test_product_formula_rejects_bad_input():
    with pytest.raises(ValueError):
        orbifold_product_formula(0, ())
    with pytest.raises(ValueError):
        orbifold_product_formula(2, (1,))


def test_factors_have_nonnegative_exponents():
    formula = orbifold_product_formula(3, (3, 3, 3))
    for fac in formula.factors:
        assert min(fac.monomial) >= 0 and sum(fac.monomial) > 0


def test_n1_coefficients_are_positive():
    # for n = 1 each coefficient is a positive combination of powers of L^(1/2)
    series = orbifold_product_series(1, (6,))
    for v in Region((6,)).keys():
        terms = series.coeff(v).laurent_terms()
        assert terms and all(c > 0 for c in terms.values()), v


def test_plane_partition_counts():
    levels = plane_partitions(6)
    assert [len(x) for x in levels] == [1, 1, 3, 6, 13, 24, 48]
    with pytest.raises(ValueError):
        plane_partitions(11)


def test_colored_counts():
    counts = colored_partition_counts(2, 3)
    assert counts[(1, 0)] == 1
    assert counts.get((0, 1), 0) == 0
    assert counts[(1, 1)] == 2
    assert sum(c for v, c in counts.items() if sum(v) == 3) == 6
    assert colored_partition_counts(1, 4)[(4,)] == 13


def test_commuting_plugin_values():
    table = commuting_series_plugin(3)
    assert table[0] == ONE
    assert table[1] == L**2
    for q in (2, 3):
        assert evaluate_at_prime(table[2], q) == {2: 88, 3: 945}[q]


def test_register_validates_and_installs():
    try:
        register_commuting_plugin(4)
        assert plugin_for(C3)[0] == "commuting"
    finally:
        unregister_plugin(C3)
    assert plugin_for(C3) is None


def test_register_refuses_wrong_spec():
    # the closed form is for commuting pairs; on another spec the brute gate trips
    spec = builtin("orbifold", 1)
    other = spec.__class__(spec.quiver, spec.potential.__class__(((1, "x0"),), ((1, ("a0", "b0")),)), None, "bad")
    with pytest.raises(PluginValidationError, match="disabled"):
        register_commuting_plugin(2, other)
    assert plugin_for(other) is None


def test_compare_series():
    res = dt_via_recursion(C3, (1,), (2,))
    assert compare_series(res, orbifold_product_series(1, (2,))) == []
    box0 = dt_via_recursion(C3, (1,), (0,))
    assert compare_series(box0, orbifold_product_series(1, (0,))) == []
    bad = orbifold_product_series(1, (2,))
    bad[(2,)] = L
    (mismatch,) = compare_series(res, bad)
    assert mismatch[0] == (2,)


def test_z2_small_box_matches():
    res = dt_via_recursion(builtin("orbifold", 2), (1, 0), (1, 1))
    assert compare_series(res, orbifold_product_series(2, (1, 1))) == []
