"""Quivers, dimension vectors and superpotentials with a linear factor.

Dimension vectors are plain tuples of nonnegative ints aligned with the
quiver's vertex order.  Paths are tuples of arrow labels read in travel
order: in ``(a, b)`` the head of ``a`` is the tail of ``b``.  The matrix
of a path is therefore the product of the arrow matrices in *reverse*
order, ``M_b @ M_a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

__all__ = [
    "Arrow",
    "Quiver",
    "LinearPotential",
    "Violation",
    "dimvec",
    "euler_form",
    "dot",
    "validate_potential",
    "arrow_split",
    "ambient_dims",
    "framed_dimension",
]

DimVector = tuple[int, ...]


@dataclass(frozen=True)
class Arrow:
    label: str
    tail: str
    head: str

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)
    _by_label: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arrows", tuple(self.arrows))
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex identifier")
        index = {name: i for i, name in enumerate(self.vertices)}
        by_label = {}
        for a in self.arrows:
            if a.label in by_label:
                raise ValueError(f"duplicate arrow label {a.label!r}")
            for end in (a.tail, a.head):
                if end not in index:
                    raise ValueError(f"arrow {a.label!r} references unknown vertex {end!r}")
            by_label[a.label] = a
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_by_label", by_label)

    def vertex_index(self, name: str) -> int:
        return self._index[name]

    def arrow(self, label: str) -> Arrow:
        return self._by_label[label]

    def has_arrow(self, label: str) -> bool:
        return label in self._by_label

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(a.label for a in self.arrows)

    def ends(self, label: str) -> tuple[int, int]:
        """(tail index, head index) of an arrow."""
        a = self._by_label[label]
        return self._index[a.tail], self._index[a.head]

    def path_ends(self, path: Sequence[str]) -> tuple[int, int] | None:
        """(start, end) vertex indices of a composable path, else None."""
        start, end = self.ends(path[0])
        for label in path[1:]:
            t, h = self.ends(label)
            if t != end:
                return None
            end = h
        return start, end


@dataclass(frozen=True)
class LinearPotential:
    """``W = L * R`` given factor by factor.

    ``linear_part`` holds ``(coefficient, arrow label)`` pairs, ``reduced_part``
    holds ``(coefficient, path)`` pairs.
    """

    linear_part: tuple[tuple[int, str], ...]
    reduced_part: tuple[tuple[int, tuple[str, ...]], ...]

    def __post_init__(self):
        object.__setattr__(self, "linear_part", tuple((int(c), a) for c, a in self.linear_part))
        object.__setattr__(
            self, "reduced_part", tuple((int(c), tuple(p)) for c, p in self.reduced_part)
        )

    @property
    def linear_arrows(self) -> tuple[str, ...]:
        return tuple(a for _, a in self.linear_part)

    def expand(self, quiver: Quiver) -> list[tuple[int, tuple[str, ...]]]:
        """Monomials of ``L * R`` in the path algebra (non-composable products vanish)."""
        out = []
        for c, a in self.linear_part:
            _, head = quiver.ends(a)
            for d, path in self.reduced_part:
                ends = quiver.path_ends(path)
                if ends is not None and ends[0] == head:
                    out.append((c * d, (a,) + path))
        return out


@dataclass(frozen=True)
class Violation:
    rule: str
    detail: str

    def __str__(self):
        return f"{self.rule}: {self.detail}"


def dimvec(quiver: Quiver, v: Mapping[str, int] | Sequence[int]) -> DimVector:
    """Normalize a mapping or sequence to a tuple aligned with ``quiver.vertices``."""
    if isinstance(v, Mapping):
        extra = set(v) - set(quiver.vertices)
        if extra:
            raise ValueError(f"unknown vertices in dimension vector: {sorted(extra)}")
        out = tuple(int(v.get(name, 0)) for name in quiver.vertices)
    else:
        out = tuple(int(x) for x in v)
        if len(out) != len(quiver.vertices):
            raise ValueError(
                f"dimension vector has {len(out)} entries, quiver has {len(quiver.vertices)} vertices"
            )
    if any(x < 0 for x in out):
        raise ValueError(f"dimension vector {out} has a negative entry")
    return out


def _check_len(q: Quiver, *vs):
    n = len(q.vertices)
    for v in vs:
        if len(v) != n:
            raise ValueError(f"vector {tuple(v)} not indexed by the {n} vertices of the quiver")


def euler_form(q: Quiver, v: Sequence[int], w: Sequence[int]) -> int:
    """``<v, w>_Q = sum_i v_i w_i - sum_{a: i -> j} v_i w_j``."""
    _check_len(q, v, w)
    total = sum(x * y for x, y in zip(v, w))
    for a in q.arrows:
        i, j = q.ends(a.label)
        total -= v[i] * w[j]
    return total


def dot(v: Sequence[int], w: Sequence[int]) -> int:
    if len(v) != len(w):
        raise ValueError(f"index mismatch: {tuple(v)} vs {tuple(w)}")
    return sum(x * y for x, y in zip(v, w))


def validate_potential(q: Quiver, w: LinearPotential) -> list[Violation]:
    """Check the linear-factor conditions; an empty list means valid."""
    report: list[Violation] = []
    if not w.linear_part:
        report.append(Violation("L nonempty", "the linear factor has no arrows"))
    if not w.reduced_part:
        report.append(Violation("R nonempty", "the reduced factor has no monomials"))

    seen_pairs: dict[tuple[str, str], str] = {}
    for _, label in w.linear_part:
        if not q.has_arrow(label):
            report.append(Violation("known arrows", f"L uses unknown arrow {label!r}"))
            continue
        a = q.arrow(label)
        pair = (a.tail, a.head)
        if pair in seen_pairs and seen_pairs[pair] != label:
            report.append(
                Violation(
                    "at most one arrow per vertex pair in L",
                    f"{seen_pairs[pair]!r} and {label!r} both go {a.tail} -> {a.head}",
                )
            )
        seen_pairs.setdefault(pair, label)

    linear = set(w.linear_arrows)
    closers: dict[tuple[int, int], str] = {}
    for label in linear:
        if q.has_arrow(label):
            t, h = q.ends(label)
            closers.setdefault((h, t), label)

    for _, path in w.reduced_part:
        text = "*".join(path)
        if not path:
            report.append(Violation("nonempty paths", "R has an empty monomial"))
            continue
        unknown = [x for x in path if not q.has_arrow(x)]
        if unknown:
            report.append(Violation("known arrows", f"R monomial {text} uses unknown {unknown}"))
            continue
        reused = [x for x in path if x in linear]
        if reused:
            report.append(
                Violation("arrow of L occurs in R", f"monomial {text} contains {', '.join(reused)}")
            )
        ends = q.path_ends(path)
        if ends is None:
            report.append(Violation("paths compose", f"R monomial {text} is not a path"))
            continue
        if ends not in closers:
            report.append(
                Violation(
                    "L*R is a sum of cycles",
                    f"no arrow of L closes R monomial {text} into a cycle",
                )
            )
    if not report:
        for _, mono in w.expand(q):
            ends = q.path_ends(mono)
            if ends is None or ends[0] != ends[1]:
                report.append(Violation("L*R is a sum of cycles", f"{'*'.join(mono)} is not a cycle"))
    return report


def arrow_split(q: Quiver, w: LinearPotential) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Arrows of the linear factor, and all the others (quiver order)."""
    linear = set(w.linear_arrows)
    a = tuple(x.label for x in q.arrows if x.label in linear)
    b = tuple(x.label for x in q.arrows if x.label not in linear)
    return a, b


def ambient_dims(q: Quiver, w: LinearPotential, v: Sequence[int]) -> tuple[int, int]:
    _check_len(q, v)
    a_set, b_set = arrow_split(q, w)

    def block(labels):
        total = 0
        for label in labels:
            i, j = q.ends(label)
            total += v[i] * v[j]
        return total

    return block(a_set), block(b_set)


def framed_dimension(q: Quiver, v: Sequence[int], f: Sequence[int]) -> int:
    """Dimension ``-<v,v>_Q + v.f`` of the framed moduli space."""
    return -euler_form(q, v, v) + dot(v, f)
