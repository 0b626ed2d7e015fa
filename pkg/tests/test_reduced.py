import json

import pytest
from hypothesis import given, strategies as st

from dtmotive.counting import count_points_brute
from dtmotive.dsl import builtin
from dtmotive.motive import L, ONE, MotiveClass, evaluate_at_prime
from dtmotive.reduced import (
    CountTable,
    EngineConfig,
    NoFeasibleEngine,
    NotPolynomialCount,
    compute_reduced,
    count_table,
    interpolate_motive,
    lagrange_coefficients,
    reduced_motive,
)

C3 = builtin("c3")
Z2 = builtin("orbifold", 2)


def test_interpolate_examples():
    assert interpolate_motive(CountTable((1,), ((2, 4), (3, 9), (5, 25), (7, 49)), 2)) == L**2
    assert interpolate_motive(CountTable((0,), ((2, 1), (3, 1)), 0)) == ONE
    table = CountTable((1, 1), ((2, 10), (3, 33), (5, 145), (7, 385), (11, 1441)), 3)
    assert interpolate_motive(table) == L**3 + L**2 - L


def test_interpolate_rejects_non_polynomial_counts():
    # q^3 is fine, but a held-out sample that disagrees is not
    with pytest.raises(NotPolynomialCount, match="not polynomial-count within degree bound"):
        interpolate_motive(CountTable((1,), ((2, 8), (3, 27), (5, 125), (7, 343), (11, 1332)), 3))
    # non-integer coefficients
    with pytest.raises(NotPolynomialCount, match="not polynomial-count within degree bound"):
        interpolate_motive(CountTable((1,), ((2, 1), (5, 2), (7, 3)), 1))


def test_count_table_invariants():
    with pytest.raises(ValueError):
        CountTable((1,), ((2, 4), (3, 9)), 2)
    with pytest.raises(ValueError):
        CountTable((1,), ((2, 4), (2, 4), (3, 9)), 1)
    with pytest.raises(ValueError):
        CountTable((1,), ((2, -1), (3, 9), (5, 1)), 1)


def test_count_table_json():
    table = CountTable((1, 1), ((2, 10), (3, 33), (5, 145), (7, 385), (11, 1441)), 3)
    data = json.loads(json.dumps(table.to_json()))
    assert set(data) == {"v", "samples", "degree_bound"}
    assert CountTable.from_json(data) == table


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=6))
def test_lagrange_recovers_integer_polynomials(coeffs):
    xs = [2, 3, 5, 7, 11, 13][: len(coeffs)]
    ys = [sum(c * x**k for k, c in enumerate(coeffs)) for x in xs]
    assert lagrange_coefficients(xs, ys) == coeffs


def test_reduced_motive_examples():
    assert reduced_motive(C3, (1,)) == L**3
    assert reduced_motive(C3, (0,)) == ONE
    assert reduced_motive(Z2, (0, 0)) == ONE
    assert reduced_motive(Z2, (1, 1)) == L**5 + L**4 - L**3


def test_engines_give_same_motive():
    for spec, v in ((C3, (1,)), (Z2, (1, 1)), (Z2, (1, 0))):
        assert reduced_motive(spec, v, "brute") == reduced_motive(spec, v, "fiber")
    assert reduced_motive(Z2, (2, 1), "fiber") == reduced_motive(Z2, (2, 1))


def test_explicit_brute_checks_feasibility_first():
    with pytest.raises(NoFeasibleEngine, match="29"):
        reduced_motive(C3, (2,), "brute")


def test_motive_evaluates_to_total_count():
    red = compute_reduced(Z2, (2, 1))
    a_dim = 5
    for q in (2, 3):
        assert evaluate_at_prime(red.b_class, q) == count_points_brute(Z2, (2, 1), q)
        assert evaluate_at_prime(red.motive, q) == q**a_dim * count_points_brute(Z2, (2, 1), q)
    assert red.engine == "counting:fiber"


def test_prime_limit():
    with pytest.raises(NoFeasibleEngine, match="prime limit"):
        compute_reduced(C3, (2,), EngineConfig(prime_limit=23))
    assert compute_reduced(C3, (2,), EngineConfig(prime_limit=29)).motive == reduced_motive(C3, (2,))


def test_brute_infeasible():
    with pytest.raises(NoFeasibleEngine):
        compute_reduced(C3, (3,), EngineConfig(engine="auto", fiber_limit=10, brute_limit=10))


def test_cache_hit_equals_cold_run(tmp_path):
    cfg = EngineConfig(cache_dir=str(tmp_path))
    cold = compute_reduced(Z2, (1, 2), cfg)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    assert files[0].name.startswith(Z2.content_hash())
    warm = compute_reduced(Z2, (1, 2), cfg)
    assert warm == cold
    assert warm.table == cold.table
    # the cache is really read: a doctored table changes the answer
    data = json.loads(files[0].read_text())
    data["table"]["samples"] = [[p, p**3] for p, _ in data["table"]["samples"]]
    data["table"]["degree_bound"] = len(data["table"]["samples"]) - 2
    files[0].write_text(json.dumps(data))
    assert compute_reduced(Z2, (1, 2), cfg).b_class == L**3


def test_count_table_sample_count():
    table, engine = count_table(Z2, (1, 1))
    assert [p for p, _ in table.samples] == [2, 3, 5, 7, 11, 13]
    assert table.degree_bound == 4
    assert engine == "fiber"
