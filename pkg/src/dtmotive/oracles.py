"""Independent ground truth for the DT engine.

* the closed product formula for the DT series of ``[C x C^2 / Z_n]``;
* a closed form for classes of commuting matrix pairs (an untrusted plugin
  for the ``c3`` builtin, gated on brute-force counts);
* brute-force enumeration of colored plane partitions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .counting import count_points_brute
from .dsl import SourceSpec, builtin
from .motive import L, ONE, ZERO, MotiveClass, euler_characteristic, evaluate_at_prime, gl_class
from .reduced import register_plugin, unregister_plugin
from .series import Region, graded_order

__all__ = [
    "Factor",
    "ProductFormula",
    "CommutativeSeries",
    "orbifold_product_formula",
    "orbifold_product_series",
    "commuting_series_plugin",
    "PluginValidationError",
    "register_commuting_plugin",
    "plane_partitions",
    "colored_partition_counts",
    "compare_series",
    "euler_table",
]

Key = tuple[int, ...]


class CommutativeSeries(dict):
    """``{exponent: MotiveClass}`` truncated to a region; ordinary product."""

    def __init__(self, region: Region, coeffs=None):
        super().__init__()
        self.region = region
        for k, c in (coeffs or {}).items():
            if c:
                self[tuple(k)] = c

    def coeff(self, v) -> MotiveClass:
        return self.get(tuple(v), ZERO)

    def __mul__(self, other: CommutativeSeries) -> CommutativeSeries:
        out: dict = {}
        for v, a in self.items():
            for w, b in other.items():
                u = tuple(x + y for x, y in zip(v, w))
                if u in self.region:
                    out[u] = out.get(u, ZERO) + a * b
        return CommutativeSeries(self.region, out)

    def to_json(self) -> dict:
        return {",".join(map(str, k)): self[k].to_json() for k in graded_order(self)}


@dataclass(frozen=True)
class Factor:
    """``(1 - s^exponent2 t^monomial)^(-multiplicity)``."""

    exponent2: int  # power of s = L^(1/2)
    monomial: Key
    multiplicity: int


@dataclass(frozen=True)
class ProductFormula:
    n: int
    region: Region
    factors: tuple[Factor, ...]

    def expand(self) -> CommutativeSeries:
        zero = (0,) * self.n
        series = CommutativeSeries(self.region, {zero: ONE})
        for fac in self.factors:
            assert sum(fac.monomial) > 0, "factor without positive t-degree"
            assert all(x >= 0 for x in fac.monomial), f"negative exponent in {fac.monomial}"
            base = ONE.times_s_power(fac.exponent2)
            geo = {}
            k = 0
            while True:
                mono = tuple(k * x for x in fac.monomial)
                if mono not in self.region:
                    break
                geo[mono] = base**k * comb(fac.multiplicity + k - 1, k)
                k += 1
            series = series * CommutativeSeries(self.region, geo)
        return series


def orbifold_product_formula(n: int, box, max_degree=None) -> ProductFormula:
    """Factors of the DT series of ``[C x C^2/Z_n]`` that can reach the region."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    region = box if isinstance(box, Region) else Region(tuple(box), max_degree)
    if len(region.box) != n:
        raise ValueError(f"box {region.box} must have {n} entries")
    factors = []
    m = 1
    while True:
        full = (m,) * n
        # monomials grow with m, so stop once none of this m's can fit
        if not any(all(x <= b for x, b in zip(c, region.box)) for c in _lowered(m, n)):
            break
        for k in range(1, m + 1):
            # exponents 2-k+m/2 and 1-k+m/2 as powers of s
            factors.append(Factor(4 - 2 * k + m, full, 1))
            if n > 1:
                factors.append(Factor(2 - 2 * k + m, full, n - 1))
            for a in range(1, n):
                for b in range(a, n):
                    up = tuple(m + (1 if a <= i <= b else 0) for i in range(n))
                    down = tuple(m - (1 if a <= i <= b else 0) for i in range(n))
                    factors.append(Factor(2 - 2 * k + m, up, 1))
                    factors.append(Factor(2 - 2 * k + m, down, 1))
        m += 1
    return ProductFormula(n, region, tuple(factors))


def _lowered(m, n):
    yield (m,) * n
    for a in range(1, n):
        for b in range(a, n):
            yield tuple(m - (1 if a <= i <= b else 0) for i in range(n))


def orbifold_product_series(n: int, box, max_degree=None) -> CommutativeSeries:
    """Expansion of the orbifold DT product formula (raw virtual motives)."""
    return orbifold_product_formula(n, box, max_degree).expand()


# ------------------------------------------------------- commuting pairs


class PluginValidationError(RuntimeError):
    pass


def _inverse_q_pochhammer(k: int) -> MotiveClass:
    """``L^k / prod_{l=1..k} (1 - L^-l)``: coefficient of ``x^k`` in ``prod_j 1/(1 - L^(1-j) x)``."""
    out = L**k
    for l in range(1, k + 1):
        out = out / (ONE - L ** (-l))
    return out


def commuting_series_plugin(order: int) -> dict[int, MotiveClass]:
    """Classes ``C_v`` of commuting pairs of v x v matrices, for v <= order.

    Read off from ``sum C_v t^v / [GL_v] = prod_{i>=1} prod_{j>=0} (1 - L^(1-j) t^i)^(-1)``.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    region = Region((order,))
    series = CommutativeSeries(region, {(0,): ONE})
    for i in range(1, order + 1):
        factor = {(i * k,): _inverse_q_pochhammer(k) for k in range(order // i + 1)}
        series = series * CommutativeSeries(region, factor)
    out = {}
    for v in range(order + 1):
        c = series.coeff((v,)) * gl_class(v)
        if not c.is_polynomial():
            raise PluginValidationError(f"commuting-pair class at v = {v} is not a polynomial: {c}")
        out[v] = c
    return out


def register_commuting_plugin(order: int, spec: SourceSpec | None = None, *, check_dims=(1, 2), check_primes=(2, 3)) -> dict[int, MotiveClass]:
    """Validate the closed form against brute counts, then register it for ``c3``."""
    spec = spec or builtin("c3")
    table = commuting_series_plugin(max(order, max(check_dims)))
    for v in check_dims:
        for q in check_primes:
            expected = count_points_brute(spec, (v,), q)
            got = evaluate_at_prime(table[v], q)
            if got != expected:
                unregister_plugin(spec)
                raise PluginValidationError(
                    f"commuting plugin disabled: v = {v}, q = {q} gives {got}, brute count {expected}"
                )

    def lookup(v):
        (k,) = v
        if k not in table:
            raise KeyError(f"commuting plugin computed up to {order}, asked for {k}")
        return table[k]

    register_plugin(spec, "commuting", lookup)
    return table


# ---------------------------------------------------- plane partitions


def plane_partitions(max_boxes: int, limit: int = 10):
    """All 3D partitions with at most ``max_boxes`` boxes, grouped by size.

    Partitions are frozensets of boxes closed under going down in any
    coordinate, grown one addable box at a time.
    """
    if max_boxes > limit:
        raise ValueError(f"max_boxes {max_boxes} exceeds the configured limit {limit}")
    levels = [{frozenset()}]
    for _ in range(max_boxes):
        nxt = set()
        for part in levels[-1]:
            for box in _addable(part):
                nxt.add(part | {box})
        levels.append(nxt)
    return levels


def _addable(part):
    cands = {(0, 0, 0)} if not part else set()
    for i, j, k in part:
        cands.update(((i + 1, j, k), (i, j + 1, k), (i, j, k + 1)))
    for box in cands - part:
        i, j, k = box
        if all(
            c in part
            for c, ok in (((i - 1, j, k), i), ((i, j - 1, k), j), ((i, j, k - 1), k))
            if ok
        ):
            yield box


def colored_partition_counts(n: int, max_boxes: int, limit: int = 10) -> dict[Key, int]:
    """Number of plane partitions per color vector; box (i,j,k) has color (j-k) mod n."""
    if n < 1:
        raise ValueError("n must be positive")
    counts: dict[Key, int] = {}
    for level in plane_partitions(max_boxes, limit):
        for part in level:
            v = [0] * n
            for _, j, k in part:
                v[(j - k) % n] += 1
            v = tuple(v)
            counts[v] = counts.get(v, 0) + 1
    return counts


# ----------------------------------------------------------- comparison


def compare_series(raw: dict, oracle: CommutativeSeries, region: Region | None = None) -> list[tuple[Key, MotiveClass, MotiveClass]]:
    """Mismatches ``(v, computed, oracle)`` between raw motives and an oracle series."""
    if hasattr(raw, "raw"):
        if raw.region != oracle.region and region is None:
            raise ValueError(f"truncations differ: {raw.region} vs {oracle.region}")
        raw = raw.raw
    region = region or oracle.region
    out = []
    for v in region.keys():
        a = raw.get(v, ZERO)
        b = oracle.coeff(v)
        if a != b:
            out.append((v, a, b))
    return out


def euler_table(raw: dict) -> dict[Key, int]:
    return {v: euler_characteristic(m) for v, m in raw.items()}
