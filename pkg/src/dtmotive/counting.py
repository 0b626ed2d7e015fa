"""Exact F_q point counts of reduced quiver loci.

Two engines count ``#{m_B : R(m_B) = 0}`` over a prime field:

* ``brute`` enumerates every B-arrow matrix tuple.
* ``fiber`` enumerates only the hint arrows P.  Every R monomial is then
  linear in the remaining arrows, so each fibre is a linear space and
  contributes ``q**nullity``.  The enumeration over P is further cut down by
  two exact symmetries: one non-loop P arrow is put in rank normal form
  (GL(v) acts transitively on matrices of a given rank), and P arrows that
  admit a compensating torus weight are enumerated up to scalars.

Enumeration order is lexicographic in matrix entries; work is cut into
contiguous index ranges, so totals do not depend on the number of workers.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import sympy

from .dsl import SourceSpec, validate_hint
from .quiver import arrow_split

log = logging.getLogger(__name__)

__all__ = [
    "InstanceTooLarge",
    "Instance",
    "DEFAULT_BRUTE_LIMIT",
    "DEFAULT_FIBER_LIMIT",
    "count_points_brute",
    "count_points_fiber",
    "count_trace_fibres",
    "fiber_plan",
    "rank_mod_p",
    "rank_count",
]

DEFAULT_BRUTE_LIMIT = 2**30
DEFAULT_FIBER_LIMIT = 2**26
_CHUNK_ENTRIES = 1 << 22


class InstanceTooLarge(RuntimeError):
    pass


@dataclass
class Instance:
    """A (spec, v) pair compiled to matrix shapes and relation components."""

    spec: SourceSpec
    v: tuple[int, ...]
    b_arrows: tuple[str, ...]
    shapes: dict  # label -> (rows, cols) = (v_head, v_tail)
    components: list  # [( (rows, cols), [(coeff, path), ...] ), ...]

    @classmethod
    def compile(cls, spec: SourceSpec, v, arrows=None) -> Instance:
        spec.require_valid()
        q = spec.quiver
        v = tuple(v)
        if len(v) != len(q.vertices):
            raise ValueError(f"dimension vector {v} not indexed by the quiver's vertices")
        if arrows is None:
            _, arrows = arrow_split(q, spec.potential)
        shapes = {}
        for a in q.arrows:
            t, h = q.ends(a.label)
            shapes[a.label] = (v[h], v[t])
        groups: dict = {}
        for c, path in spec.potential.reduced_part:
            start, end = q.path_ends(path)
            groups.setdefault((start, end), []).append((c, path))
        components = []
        for (start, end), monos in groups.items():
            shape = (v[end], v[start])
            if shape[0] and shape[1]:
                components.append((shape, monos))
        return cls(spec, v, tuple(arrows), shapes, components)

    def size(self, labels) -> int:
        return sum(self.shapes[x][0] * self.shapes[x][1] for x in labels)


def _path_matrix(path, mats, shapes, q, n):
    """Batched matrix of a path (travel order) mod q, or an identity/None."""
    out = None
    for label in path:
        m = mats[label]
        out = m if out is None else np.matmul(m, out) % q
    return out


def _identity(k, n):
    return np.broadcast_to(np.eye(k, dtype=np.int64), (n, k, k))


def _decode(start, stop, radices):
    """Mixed-radix digits of ``range(start, stop)``; first radix most significant."""
    idx = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((len(radices), idx.size), dtype=np.int64)
    for pos in range(len(radices) - 1, -1, -1):
        idx, digits[pos] = np.divmod(idx, radices[pos])
    return digits


def _split_matrices(entries, labels, shapes, n):
    mats, col = {}, 0
    for label in labels:
        r, c = shapes[label]
        mats[label] = entries[:, col:col + r * c].reshape(n, r, c)
        col += r * c
    return mats


def _run_ranges(worker, args, total, chunk, threads):
    ranges = [(s, min(s + chunk, total)) for s in range(0, total, chunk)]
    if threads <= 1 or len(ranges) <= 1:
        return [worker(*args, s, e) for s, e in ranges]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(worker, *args, s, e) for s, e in ranges]
        return [f.result() for f in futures]


# ---------------------------------------------------------------- brute force


def _brute_chunk(spec, v, q, start, stop):
    inst = Instance.compile(spec, v)
    labels = inst.b_arrows
    n = stop - start
    digits = _decode(start, stop, [q] * inst.size(labels))
    mats = _split_matrices(digits.T.copy(), labels, inst.shapes, n)
    ok = np.ones(n, dtype=bool)
    for shape, monos in inst.components:
        acc = np.zeros((n,) + shape, dtype=np.int64)
        for c, path in monos:
            acc = (acc + c * _path_matrix(path, mats, inst.shapes, q, n)) % q
        ok &= ~acc.reshape(n, -1).any(axis=1)
    return int(ok.sum())


def count_points_brute(spec: SourceSpec, v, q: int, *, limit: int = DEFAULT_BRUTE_LIMIT, threads: int = 1) -> int:
    """Count B-arrow tuples over F_q with ``R = 0`` by exhaustive enumeration."""
    inst = Instance.compile(spec, v)
    b_dim = inst.size(inst.b_arrows)
    total = q**b_dim
    if total > limit:
        raise InstanceTooLarge(f"brute force needs q^b_dim = {q}^{b_dim} evaluations, limit is {limit}")
    if not inst.components:
        return total
    chunk = max(1, _CHUNK_ENTRIES // max(1, b_dim))
    return sum(_run_ranges(_brute_chunk, (spec, inst.v, q), total, chunk, threads))


# ----------------------------------------------------------- linear algebra


def rank_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks over F_p of a batch of integer matrices, shape (N, m, n)."""
    a = np.array(mats, dtype=np.int64) % p
    n_mats, m, n = a.shape
    rank = np.zeros(n_mats, dtype=np.int64)
    if m == 0 or n == 0:
        return rank
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, -1, p)
    used = np.zeros((n_mats, m), dtype=bool)
    for c in range(n):
        cand = (a[:, :, c] != 0) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        idx = np.nonzero(has)[0]
        prow = cand[idx].argmax(axis=1)
        k = np.arange(idx.size)
        sub = a[idx]
        pivot = sub[k, prow] * inv[sub[k, prow, c]][:, None] % p
        factor = sub[:, :, c].copy()
        factor[k, prow] = 0
        factor[used[idx]] = 0  # pivot rows of earlier columns no longer matter
        sub = (sub - factor[:, :, None] * pivot[:, None, :]) % p
        sub[k, prow] = pivot
        a[idx] = sub
        used[idx, prow] = True
        rank[idx] += 1
    return rank


def rank_count(rows: int, cols: int, r: int, q: int) -> int:
    """Number of rank-r matrices of the given shape over F_q."""
    out = 1
    for i in range(r):
        out *= (q**rows - q**i) * (q**cols - q**i)
    for i in range(r):
        out //= q**r - q**i
    return out


# ------------------------------------------------------------- fiber engine


def _torus_weight(inst: Instance, target: str, p_set) -> dict | None:
    """Integral weights giving ``target`` weight 1, other P arrows weight 0, and
    making every relation component homogeneous; None if there are none."""
    q_arrows = [x for x in inst.b_arrows if x not in p_set]
    rows, rhs = [], []
    groups: dict = {}
    for c, path in inst.spec.potential.reduced_part:
        groups.setdefault(inst.spec.quiver.path_ends(path), []).append(path)
    for paths in groups.values():
        base = paths[0]
        for other in paths[1:]:
            rows.append([other.count(a) - base.count(a) for a in q_arrows])
            rhs.append(-(other.count(target) - base.count(target)))
    if not rows:
        return {target: 1}
    a = sympy.Matrix(rows)
    b = sympy.Matrix(rhs)
    try:
        sol, params = a.gauss_jordan_solve(b)
    except ValueError:
        return None
    sol = sol.subs({p: 0 for p in params})
    if any(not x.is_integer for x in sol):
        return None
    weights = {a_: int(x) for a_, x in zip(q_arrows, sol)}
    weights[target] = 1
    return weights


@dataclass
class FiberPlan:
    """Enumeration factors over the hint arrows for one prime."""

    p_arrows: tuple[str, ...]
    q_arrows: tuple[str, ...]
    normal_form: str | None
    scaled: tuple[str, ...]
    free: tuple[str, ...]
    q: int
    factors: list  # [(label, table (K, entries), weights (K,) or None)]

    @property
    def work(self) -> int:
        return math.prod(len(t) for _, t, _ in self.factors)


def _normal_form_table(rows, cols, q):
    table, weights = [], []
    for r in range(min(rows, cols) + 1):
        m = np.zeros((rows, cols), dtype=np.int64)
        m[range(r), range(r)] = 1
        table.append(m.ravel())
        weights.append(rank_count(rows, cols, r, q))
    return np.array(table, dtype=np.int64), np.array(weights, dtype=object)


def _projective_table(n, q):
    """Zero vector plus one representative per line, first nonzero entry 1."""
    blocks = [np.zeros((1, n), dtype=np.int64)]
    for lead in range(n):
        tail = n - lead - 1
        digits = _decode(0, q**tail, [q] * tail).T if tail else np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((digits.shape[0], n), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1:] = digits
        blocks.append(block)
    weights = np.full(sum(len(b) for b in blocks), q - 1, dtype=object)
    weights[0] = 1
    return np.concatenate(blocks), weights


def fiber_plan(spec: SourceSpec, v, q: int, *, reduce: bool = True, limit: int | None = None) -> FiberPlan:
    if spec.hint is None:
        raise ValueError("fiber engine needs a hint (set of P arrows)")
    problems = validate_hint(spec.quiver, spec.potential, spec.hint)
    if problems:
        raise ValueError("invalid hint: " + "; ".join(map(str, problems)))
    inst = Instance.compile(spec, v)
    p_arrows = tuple(x for x in inst.b_arrows if x in set(spec.hint))
    q_arrows = tuple(x for x in inst.b_arrows if x not in set(spec.hint))
    live = [x for x in p_arrows if inst.size([x])]

    normal_form = None
    scaled: list[str] = []
    if reduce:
        for x in live:
            if not spec.quiver.arrow(x).is_loop:
                normal_form = x
                break
        for x in live:
            if x != normal_form and _torus_weight(inst, x, set(p_arrows)) is not None:
                scaled.append(x)
    free = [x for x in live if x != normal_form and x not in scaled]

    work = 1
    if normal_form:
        r, c = inst.shapes[normal_form]
        work *= min(r, c) + 1
    for x in scaled:
        n = inst.size([x])
        work *= (q**n - 1) // (q - 1) + 1
    work *= q ** inst.size(free)
    if limit is not None and work > limit:
        raise InstanceTooLarge(f"fiber engine needs {work} evaluations at q = {q}, limit is {limit}")

    factors = []
    if normal_form:
        factors.append((normal_form,) + _normal_form_table(*inst.shapes[normal_form], q))
    for x in scaled:
        factors.append((x,) + _projective_table(inst.size([x]), q))
    digit = np.arange(q, dtype=np.int64)[:, None]
    for x in free:
        for _ in range(inst.size([x])):
            factors.append((x, digit, None))
    return FiberPlan(p_arrows, q_arrows, normal_form, tuple(scaled), tuple(free), q, factors)


def _fiber_chunk(spec, v, plan, start, stop):
    inst = Instance.compile(spec, v)
    q = plan.q
    n = stop - start
    radices = [len(t) for _, t, _ in plan.factors]
    digits = _decode(start, stop, radices) if radices else np.zeros((0, n), dtype=np.int64)

    # gather P entries, in plan factor order, then regroup per arrow
    per_arrow: dict = {}
    weight = np.ones(n, dtype=object)
    for pos, (label, table, w) in enumerate(plan.factors):
        per_arrow.setdefault(label, []).append(table[digits[pos]])
        if w is not None:
            weight = weight * w[digits[pos]]
    mats = {}
    for label in inst.b_arrows:
        r, c = inst.shapes[label]
        if label in per_arrow:
            mats[label] = np.concatenate(per_arrow[label], axis=1).reshape(n, r, c)
        elif label in plan.p_arrows:
            mats[label] = np.zeros((n, r, c), dtype=np.int64)

    q_cols, col = {}, 0
    for label in plan.q_arrows:
        size = inst.size([label])
        q_cols[label] = (col, col + size)
        col += size
    n_vars = col
    n_eqs = sum(s[0] * s[1] for s, _ in inst.components)
    system = np.zeros((n, n_eqs, n_vars), dtype=np.int64)
    row = 0
    for (er, ec), monos in inst.components:
        for c, path in monos:
            j = next(i for i, x in enumerate(path) if x in q_cols)
            qa = path[j]
            qr, qc = inst.shapes[qa]
            if qr == 0 or qc == 0:
                continue
            left = _path_matrix(path[j + 1:], mats, inst.shapes, q, n)
            right = _path_matrix(path[:j], mats, inst.shapes, q, n)
            if left is None:
                left = _identity(er, n)
            if right is None:
                right = _identity(ec, n)
            block = np.einsum("nik,njl->nijkl", left, right.transpose(0, 2, 1)).reshape(n, er * ec, qr * qc)
            lo, hi = q_cols[qa]
            system[:, row:row + er * ec, lo:hi] += c * block
        row += er * ec
    nullity = n_vars - rank_mod_p(system, q)
    totals: dict[int, int] = {}
    for k in np.unique(nullity):
        totals[int(k)] = int(weight[nullity == k].sum())
    return totals


def count_points_fiber(
    spec: SourceSpec,
    v,
    q: int,
    *,
    limit: int = DEFAULT_FIBER_LIMIT,
    threads: int = 1,
    reduce: bool = True,
) -> int:
    """``sum over P of q**nullity`` of the linear system ``R = 0`` in the other B arrows."""
    plan = fiber_plan(spec, v, q, reduce=reduce, limit=limit)
    inst = Instance.compile(spec, v)
    n_vars = inst.size(plan.q_arrows)
    if not inst.components:
        return q ** (inst.size(plan.p_arrows) + n_vars)
    width = max(1, sum(s[0] * s[1] for s, _ in inst.components) * max(1, n_vars))
    chunk = max(1, _CHUNK_ENTRIES // width)
    parts = _run_ranges(_fiber_chunk, (spec, inst.v, plan), plan.work, chunk, threads)
    total = 0
    for part in parts:
        for k, w in part.items():
            total += w * q**k
    return total


# ---------------------------------------------------- Chern-Simons fibres


def _trace_chunk(spec, v, q, start, stop):
    q_ = spec.quiver
    inst = Instance.compile(spec, v, arrows=q_.labels)
    n = stop - start
    digits = _decode(start, stop, [q] * inst.size(q_.labels))
    mats = _split_matrices(digits.T.copy(), q_.labels, inst.shapes, n)
    trace = np.zeros(n, dtype=np.int64)
    for c, mono in spec.potential.expand(q_):
        m = _path_matrix(mono, mats, inst.shapes, q, n)
        trace = (trace + c * np.trace(m, axis1=1, axis2=2)) % q
    ok = np.ones(n, dtype=bool)
    for shape, monos in inst.components:
        acc = np.zeros((n,) + shape, dtype=np.int64)
        for c, path in monos:
            acc = (acc + c * _path_matrix(path, mats, inst.shapes, q, n)) % q
        ok &= ~acc.reshape(n, -1).any(axis=1)
    return int((trace == 0).sum()), int((trace == 1).sum()), int(ok.sum())


def count_trace_fibres(spec: SourceSpec, v, q: int, *, limit: int = DEFAULT_BRUTE_LIMIT) -> tuple[int, int, int]:
    """``(#TrW^-1(0), #TrW^-1(1), #{R = 0})`` over all of ``M^Q(v)(F_q)``."""
    inst = Instance.compile(spec, v, arrows=spec.quiver.labels)
    dim = inst.size(spec.quiver.labels)
    total = q**dim
    if total > limit:
        raise InstanceTooLarge(f"direct enumeration needs {q}^{dim} points, limit is {limit}")
    chunk = max(1, _CHUNK_ENTRIES // max(1, dim))
    parts = _run_ranges(_trace_chunk, (spec, inst.v, q), total, chunk, 1)
    return tuple(sum(p[i] for p in parts) for i in range(3))
