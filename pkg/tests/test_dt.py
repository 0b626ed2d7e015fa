import pytest

from dtmotive.dsl import builtin
from dtmotive.dt import (
    ASSUMPTIONS,
    dt_via_inversion,
    dt_via_recursion,
    r_series,
    raw_is_laurent,
    verify_recursion_identity,
)
from dtmotive.oracles import register_commuting_plugin
from dtmotive.reduced import EngineConfig, unregister_plugin
from dtmotive.motive import L, ONE, S, ZERO, gl_class
from dtmotive.series import Region, series_equal

C3 = builtin("c3")
Z2 = builtin("orbifold", 2)


@pytest.fixture(scope="module")
def c3_reduced():
    # box 3 is out of reach of counting; use the validated closed form
    register_commuting_plugin(3, C3)
    try:
        yield r_series(C3, (3,))
    finally:
        unregister_plugin(C3)


def test_r_series_coefficients(c3_reduced):
    r = c3_reduced.series
    assert r[(0,)] == ONE
    assert r[(1,)] == L**3 / gl_class(1)
    assert c3_reduced.provenance[(0,)] == "trivial"
    assert c3_reduced.provenance[(1,)] == "plugin:commuting"


def test_counting_and_plugin_agree(c3_reduced):
    counted = r_series(C3, (2,), EngineConfig(engine="fiber"))
    assert counted.provenance[(2,)] == "counting:fiber"
    for v in ((1,), (2,)):
        assert counted.series[v] == c3_reduced.series[v]


def test_c3_values(c3_reduced):
    res = dt_via_recursion(C3, (1,), (3,), reduced=c3_reduced)
    assert res[(0,)] == ONE
    assert res[(1,)] == S**3
    assert res[(2,)] == L**3 + L**2 + L
    assert res.packaged[(1,)] == S**3 * S**2  # L^(-<1,1>/2) = L
    assert all(raw_is_laurent(res).values())


def test_methods_agree_on_c3_box_3(c3_reduced):
    rec = dt_via_recursion(C3, (1,), (3,), reduced=c3_reduced)
    inv = dt_via_inversion(C3, (1,), (3,), reduced=c3_reduced)
    assert series_equal(rec.packaged, inv.packaged) == (True, None)
    assert rec.raw == inv.raw


def test_residuals_zero(c3_reduced):
    res = dt_via_inversion(C3, (1,), (3,), reduced=c3_reduced)
    residuals = verify_recursion_identity(C3, (1,), res, c3_reduced)
    assert set(residuals) == {(0,), (1,), (2,), (3,)}
    assert all(not r for r in residuals.values())


def test_tampered_motive_is_caught(c3_reduced):
    res = dt_via_recursion(C3, (1,), (3,), reduced=c3_reduced)
    res.raw[(1,)] = res.raw[(1,)] + 1
    residuals = verify_recursion_identity(C3, (1,), res, c3_reduced)
    assert not residuals[(0,)]
    assert residuals[(1,)] and residuals[(2,)]


def test_box_zero():
    res = dt_via_recursion(C3, (1,), (0,))
    assert res.raw == {(0,): ONE}
    assert verify_recursion_identity(C3, (1,), res, r_series(C3, (0,))) == {(0,): ZERO}
    assert dt_via_inversion(C3, (1,), (0,)).raw == {(0,): ONE}


def test_framing_must_be_positive():
    for bad in ((0,), (-1,), (1, 0)):
        with pytest.raises(ValueError):
            dt_via_recursion(C3, bad, (1,))


def test_z2_region_with_degree_cap():
    region = Region((2, 2), 3)
    red = r_series(Z2, region)
    rec = dt_via_recursion(Z2, (1, 0), region, reduced=red)
    inv = dt_via_inversion(Z2, (1, 0), region, reduced=red)
    assert rec.raw == inv.raw
    assert rec[(1, 0)] == S
    assert rec[(0, 1)] == ZERO
    assert rec[(1, 1)] == S**3 + S
    assert rec[(2, 1)] == L**2 + 2 * L + 1
    assert (2, 2) not in rec.raw


def test_other_framing_is_consistent():
    # framing at the second vertex is the mirror image of framing at the first
    region = Region((2, 2), 3)
    a = dt_via_recursion(Z2, (1, 0), region)
    b = dt_via_recursion(Z2, (0, 1), region)
    for (i, j), m in a.raw.items():
        assert b[(j, i)] == m


def test_json_report(c3_reduced):
    res = dt_via_recursion(C3, (1,), (3,), reduced=c3_reduced)
    data = res.to_json()
    assert data["framing"] == [1]
    assert list(data["raw"]) == ["0", "1", "2", "3"]
    assert data["assumptions"] == list(ASSUMPTIONS)
