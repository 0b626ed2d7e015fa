"""Motivic classes of reduced spaces from point counts.

The A-block (arrows of the linear factor) is unconstrained, so
``[R(v)] = L**a_dim * [{m_B : R(m_B) = 0}]``.  The B-block locus is counted
over enough primes to pin down a polynomial of degree ``b_dim``, plus one
held-out prime that must agree with the interpolant.  Identifying the
counting polynomial with the motivic class assumes the locus is
polynomial-count; results say so in their provenance.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import sympy

from .counting import (
    DEFAULT_BRUTE_LIMIT,
    DEFAULT_FIBER_LIMIT,
    InstanceTooLarge,
    count_points_brute,
    count_points_fiber,
    fiber_plan,
)
from .dsl import SourceSpec, validate_hint
from .motive import L, ONE, MotiveClass, evaluate_at_prime
from .quiver import ambient_dims

log = logging.getLogger(__name__)

__all__ = [
    "CountTable",
    "NotPolynomialCount",
    "NoFeasibleEngine",
    "EngineConfig",
    "ReducedMotive",
    "interpolate_motive",
    "lagrange_coefficients",
    "count_table",
    "reduced_motive",
    "compute_reduced",
    "register_plugin",
    "unregister_plugin",
    "plugin_for",
]


class NotPolynomialCount(ValueError):
    pass


class NoFeasibleEngine(RuntimeError):
    pass


@dataclass(frozen=True)
class CountTable:
    v: tuple[int, ...]
    samples: tuple[tuple[int, int], ...]
    degree_bound: int

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(self.v))
        object.__setattr__(self, "samples", tuple((int(p), int(c)) for p, c in self.samples))
        primes = [p for p, _ in self.samples]
        if len(set(primes)) != len(primes):
            raise ValueError("count table has repeated primes")
        if any(c < 0 for _, c in self.samples):
            raise ValueError("point counts must be nonnegative")
        if len(self.samples) < self.degree_bound + 2:
            raise ValueError(
                f"degree bound {self.degree_bound} needs {self.degree_bound + 2} samples, "
                f"got {len(self.samples)}"
            )

    def to_json(self) -> dict:
        return {"v": list(self.v), "samples": [list(s) for s in self.samples], "degree_bound": self.degree_bound}

    @classmethod
    def from_json(cls, data: dict) -> CountTable:
        return cls(tuple(data["v"]), tuple(tuple(s) for s in data["samples"]), data["degree_bound"])


def lagrange_coefficients(xs, ys) -> list[Fraction]:
    """Coefficients (ascending) of the interpolating polynomial through the points."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        basis = [Fraction(1)]
        denom = 1
        for j in range(n):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xs[j] * basis[k + 1]
            denom *= xs[i] - xs[j]
        scale = Fraction(ys[i], denom)
        for k, b in enumerate(basis):
            coeffs[k] += scale * b
    return coeffs


def interpolate_motive(table: CountTable) -> MotiveClass:
    """Integer polynomial in L through the samples, checked on held-out primes."""
    d = table.degree_bound
    fit, held = table.samples[: d + 1], table.samples[d + 1:]
    coeffs = lagrange_coefficients([p for p, _ in fit], [c for _, c in fit])
    if any(c.denominator != 1 for c in coeffs):
        raise NotPolynomialCount(
            f"not polynomial-count within degree bound {d} at v = {table.v}: "
            f"interpolant has non-integer coefficients"
        )
    ints = [int(c) for c in coeffs]
    for p, count in held:
        value = sum(c * p**k for k, c in enumerate(ints))
        if value != count:
            raise NotPolynomialCount(
                f"not polynomial-count within degree bound {d} at v = {table.v}: "
                f"interpolant gives {value} at q = {p}, counted {count}"
            )
    return MotiveClass.from_L_poly(ints)


# ------------------------------------------------------------------ plugins

_plugins: dict[str, tuple[str, Callable[[tuple[int, ...]], MotiveClass]]] = {}


def register_plugin(spec: SourceSpec, name: str, fn: Callable[[tuple[int, ...]], MotiveClass]) -> None:
    """Register closed-form B-block classes for one spec (matched by content hash)."""
    _plugins[spec.content_hash()] = (name, fn)


def unregister_plugin(spec: SourceSpec) -> None:
    _plugins.pop(spec.content_hash(), None)


def plugin_for(spec: SourceSpec):
    return _plugins.get(spec.content_hash())


# ------------------------------------------------------------------ engines


@dataclass
class EngineConfig:
    engine: str = "auto"  # auto | brute | fiber | plugin
    prime_limit: int | None = None
    extra_samples: int = 1
    brute_limit: int = DEFAULT_BRUTE_LIMIT
    fiber_limit: int = DEFAULT_FIBER_LIMIT
    threads: int = 1
    reduce: bool = True
    cache_dir: str | None = None


@dataclass(frozen=True)
class ReducedMotive:
    v: tuple[int, ...]
    motive: MotiveClass  # [R(v)]
    b_class: MotiveClass  # class of the B-block locus
    engine: str
    table: CountTable | None = field(default=None, compare=False)


def _primes(k: int) -> list[int]:
    return [int(sympy.prime(i)) for i in range(1, k + 1)]


def _cache_path(cfg: EngineConfig, spec: SourceSpec, v) -> Path | None:
    if not cfg.cache_dir:
        return None
    return Path(cfg.cache_dir) / f"{spec.content_hash()}_{'-'.join(map(str, v))}.json"


def _pick_engine(spec: SourceSpec, v, primes, cfg: EngineConfig) -> str:
    wanted = cfg.engine
    q_max = primes[-1]
    _, b_dim = ambient_dims(spec.quiver, spec.potential, v)
    if wanted == "fiber":
        return wanted
    if wanted == "brute":
        if q_max**b_dim > cfg.brute_limit:
            raise NoFeasibleEngine(f"brute force at v = {tuple(v)} needs {q_max}^{b_dim} evaluations, limit is {cfg.brute_limit}")
        return wanted
    if spec.hint is not None and not validate_hint(spec.quiver, spec.potential, spec.hint):
        try:
            fiber_plan(spec, v, q_max, reduce=cfg.reduce, limit=cfg.fiber_limit)
            return "fiber"
        except InstanceTooLarge:
            pass
    if q_max**b_dim <= cfg.brute_limit:
        return "brute"
    raise NoFeasibleEngine(f"no feasible counting engine for v = {tuple(v)} (b_dim = {b_dim}, q up to {q_max})")


def count_table(spec: SourceSpec, v, cfg: EngineConfig | None = None) -> tuple[CountTable, str]:
    """Point counts of the B-block locus over the first ``b_dim + 1 + extra`` primes."""
    cfg = cfg or EngineConfig()
    v = tuple(v)
    _, b_dim = ambient_dims(spec.quiver, spec.potential, v)
    primes = _primes(b_dim + 1 + max(1, cfg.extra_samples))
    if cfg.prime_limit is not None and primes[-1] > cfg.prime_limit:
        raise NoFeasibleEngine(
            f"v = {v} needs {len(primes)} primes (up to {primes[-1]}), prime limit is {cfg.prime_limit}"
        )
    path = _cache_path(cfg, spec, v)
    if path is not None and path.exists():
        data = json.loads(path.read_text())
        table = CountTable.from_json(data["table"])
        if [p for p, _ in table.samples] == primes:
            return table, data["engine"]
    engine = _pick_engine(spec, v, primes, cfg)
    samples = []
    for p in primes:
        if engine == "fiber":
            c = count_points_fiber(spec, v, p, limit=cfg.fiber_limit, threads=cfg.threads, reduce=cfg.reduce)
        else:
            c = count_points_brute(spec, v, p, limit=cfg.brute_limit, threads=cfg.threads)
        log.debug("v=%s q=%d count=%d (%s)", v, p, c, engine)
        samples.append((p, c))
    table = CountTable(v, tuple(samples), b_dim)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps({"engine": engine, "table": table.to_json()}, sort_keys=True))
    return table, engine


def compute_reduced(spec: SourceSpec, v, cfg: EngineConfig | None = None) -> ReducedMotive:
    cfg = cfg or EngineConfig()
    spec.require_valid()
    v = tuple(v)
    a_dim, _ = ambient_dims(spec.quiver, spec.potential, v)
    if not any(v):
        return ReducedMotive(v, ONE, ONE, "trivial")
    plugin = plugin_for(spec)
    if cfg.engine == "plugin" or (cfg.engine == "auto" and plugin is not None):
        if plugin is None:
            raise NoFeasibleEngine("no plugin registered for this spec")
        name, fn = plugin
        b_class = fn(v)
        return ReducedMotive(v, b_class * L**a_dim, b_class, f"plugin:{name}")
    table, engine = count_table(spec, v, cfg)
    b_class = interpolate_motive(table)
    for p, count in table.samples:
        assert evaluate_at_prime(b_class, p) == count
    return ReducedMotive(v, b_class * L**a_dim, b_class, f"counting:{engine}", table)


def reduced_motive(spec: SourceSpec, v, engine: str = "auto", **kwargs) -> MotiveClass:
    """``[R(v)]`` for the chosen engine (``auto`` prefers plugin, then fiber, then brute)."""
    return compute_reduced(spec, v, EngineConfig(engine=engine, **kwargs)).motive
