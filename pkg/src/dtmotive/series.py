"""Truncated series in the quantized torus of a quiver.

Monomials multiply by ``t^v * t^w = L^(-<w,v>_Q) t^(v+w)``.  A series is
truncated to an order ideal of exponent vectors: a componentwise box,
optionally cut further by a bound on total degree.  Any order ideal is
closed under the product, so truncation commutes with multiplication.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Sequence

from .motive import ONE, ZERO, MotiveClass
from .quiver import Quiver, euler_form

__all__ = [
    "Region",
    "TwistedSeries",
    "twisted_multiply",
    "scale_variables",
    "invert_unit_series",
    "series_equal",
    "graded_order",
]

Key = tuple[int, ...]


@dataclass(frozen=True)
class Region:
    """The exponents ``v <= box`` with ``sum(v) <= max_degree`` (when given)."""

    box: Key
    max_degree: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "box", tuple(int(x) for x in self.box))
        if any(x < 0 for x in self.box):
            raise ValueError(f"box {self.box} has a negative entry")

    def __contains__(self, v) -> bool:
        if len(v) != len(self.box) or any(x < 0 or x > b for x, b in zip(v, self.box)):
            return False
        return self.max_degree is None or sum(v) <= self.max_degree

    def keys(self) -> list[Key]:
        """All exponents in graded order (total degree, then lexicographic)."""
        return graded_order(k for k in itertools.product(*(range(b + 1) for b in self.box)) if k in self)

    def __str__(self):
        s = ",".join(map(str, self.box))
        return s if self.max_degree is None else f"{s} (degree <= {self.max_degree})"


def graded_order(keys) -> list[Key]:
    return sorted(keys, key=lambda k: (sum(k), k))


def _below(v: Key) -> Iterator[Key]:
    return itertools.product(*(range(x + 1) for x in v))


def _sub(v: Key, w: Key) -> Key:
    return tuple(a - b for a, b in zip(v, w))


class _Twist:
    """Cached ``<w,v>_Q`` lookups for one quiver."""

    def __init__(self, quiver: Quiver):
        self.quiver = quiver
        self._cache: dict = {}

    def __call__(self, w: Key, v: Key) -> int:
        key = (w, v)
        val = self._cache.get(key)
        if val is None:
            val = self._cache[key] = euler_form(self.quiver, w, v)
        return val


_twists: dict[int, _Twist] = {}


def _twist_for(quiver: Quiver) -> _Twist:
    t = _twists.get(id(quiver))
    if t is None or t.quiver is not quiver:
        t = _twists[id(quiver)] = _Twist(quiver)
    return t


class TwistedSeries:
    """A truncated element of the quantized torus algebra of ``quiver``."""

    def __init__(self, quiver: Quiver, region: Region, coeffs: Mapping[Key, MotiveClass] | None = None):
        if len(region.box) != len(quiver.vertices):
            raise ValueError("truncation box not indexed by the quiver's vertices")
        self.quiver = quiver
        self.region = region
        self.coeffs: dict[Key, MotiveClass] = {}
        for k, c in (coeffs or {}).items():
            k = tuple(k)
            if k not in region:
                raise ValueError(f"exponent {k} lies outside the truncation {region}")
            c = MotiveClass._coerce(c)
            if c:
                self.coeffs[k] = c

    @classmethod
    def one(cls, quiver: Quiver, region: Region) -> TwistedSeries:
        return cls(quiver, region, {(0,) * len(quiver.vertices): ONE})

    @classmethod
    def monomial(cls, quiver: Quiver, region: Region, v: Key, c=ONE) -> TwistedSeries:
        return cls(quiver, region, {tuple(v): c})

    def __getitem__(self, v) -> MotiveClass:
        return self.coeffs.get(tuple(v), ZERO)

    def _check(self, other: TwistedSeries):
        if other.quiver != self.quiver or other.region != self.region:
            raise ValueError("series live over different quivers or truncations")

    def __add__(self, other: TwistedSeries) -> TwistedSeries:
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, ZERO) + c
        return TwistedSeries(self.quiver, self.region, out)

    def __sub__(self, other: TwistedSeries) -> TwistedSeries:
        return self + other.scale(-1)

    def scale(self, c) -> TwistedSeries:
        """Multiply every coefficient by the central element ``c``."""
        return TwistedSeries(self.quiver, self.region, {k: v * c for k, v in self.coeffs.items()})

    def map_coeffs(self, fn: Callable[[Key, MotiveClass], MotiveClass]) -> TwistedSeries:
        return TwistedSeries(self.quiver, self.region, {k: fn(k, c) for k, c in self.coeffs.items()})

    def __mul__(self, other: TwistedSeries) -> TwistedSeries:
        return twisted_multiply(self, other)

    def __eq__(self, other):
        if not isinstance(other, TwistedSeries):
            return NotImplemented
        return series_equal(self, other)[0]

    __hash__ = None

    def to_json(self) -> dict:
        return {
            ",".join(map(str, k)): self.coeffs[k].to_json()
            for k in graded_order(self.coeffs)
        }

    @classmethod
    def from_json(cls, quiver: Quiver, region: Region, data: Mapping) -> TwistedSeries:
        coeffs = {tuple(int(x) for x in k.split(",")): MotiveClass.from_json(v) for k, v in data.items()}
        return cls(quiver, region, coeffs)

    def __repr__(self):
        terms = [f"({self.coeffs[k]}) t^{k}" for k in graded_order(self.coeffs)]
        return " + ".join(terms) or "0"


def twisted_multiply(a: TwistedSeries, b: TwistedSeries) -> TwistedSeries:
    """Coefficient of ``t^u`` is ``sum_{v+w=u} L^(-<w,v>) a_v b_w`` inside the region."""
    a._check(b)
    twist = _twist_for(a.quiver)
    out: dict[Key, MotiveClass] = {}
    region = a.region
    for v, av in a.coeffs.items():
        for w, bw in b.coeffs.items():
            u = tuple(x + y for x, y in zip(v, w))
            if u not in region:
                continue
            term = (av * bw).times_s_power(-2 * twist(w, v))
            out[u] = out.get(u, ZERO) + term
    return TwistedSeries(a.quiver, region, out)


def scale_variables(a: TwistedSeries, shift: Sequence) -> TwistedSeries:
    """Substitute ``t -> L^shift t``: the coefficient at v gains ``L^(shift . v)``."""
    if len(shift) != len(a.quiver.vertices):
        raise ValueError("shift not indexed by the quiver's vertices")
    shift = [Fraction(x) for x in shift]

    def rescale(v, c):
        e2 = 2 * sum(s * x for s, x in zip(shift, v))
        if e2.denominator != 1:
            raise ValueError(f"shift {shift} gives a non half-integer exponent at {v}")
        return c.times_s_power(int(e2))

    return a.map_coeffs(rescale)


def invert_unit_series(a: TwistedSeries) -> TwistedSeries:
    """Two-sided inverse, solved degree by degree from ``a * x = 1``."""
    n = len(a.quiver.vertices)
    zero = (0,) * n
    a0 = a[zero]
    if not a0:
        raise ZeroDivisionError("constant term is zero; series is not a unit")
    inv0 = a0.inverse()
    twist = _twist_for(a.quiver)
    x: dict[Key, MotiveClass] = {zero: inv0}
    for u in a.region.keys():
        if u == zero:
            continue
        acc = ZERO
        for w in _below(u):
            if w == u or w not in x:
                continue
            v = _sub(u, w)
            av = a.coeffs.get(v)
            if av is None:
                continue
            acc = acc + (av * x[w]).times_s_power(-2 * twist(w, v))
        if acc:
            x[u] = -(acc * inv0)
    return TwistedSeries(a.quiver, a.region, x)


def series_equal(a: TwistedSeries, b: TwistedSeries) -> tuple[bool, Key | None]:
    """Exact comparison; on failure also returns the first differing exponent."""
    a._check(b)
    for k in graded_order(set(a.coeffs) | set(b.coeffs)):
        if a[k] != b[k]:
            return False, k
    return True, None
