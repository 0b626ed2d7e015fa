"""The ``.quiver`` text format.

Example::

    quiver c3
    vertex 0
    arrow x: 0 -> 0
    arrow y: 0 -> 0
    arrow z: 0 -> 0
    linear: x
    reduced: y*z - z*y
    hint: y

``linear`` is the factor L (a signed sum of arrows), ``reduced`` the factor R
(a signed sum of paths written ``a*b*c`` in travel order) and ``hint`` lists
the arrows the fiber-counting engine enumerates explicitly.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from pathlib import Path

from .quiver import Arrow, LinearPotential, Quiver, Violation, arrow_split, validate_potential

__all__ = [
    "ParseError",
    "SourceSpec",
    "parse",
    "parse_file",
    "format_spec",
    "builtin",
    "load_spec",
    "validate_hint",
]

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z0-9_.]+)|(?P<arrow>->)|(?P<op>[:+\-*]))")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class SourceSpec:
    quiver: Quiver
    potential: LinearPotential
    hint: tuple[str, ...] | None = None
    name: str | None = None
    report: tuple[Violation, ...] = field(default=(), compare=False)

    @property
    def valid(self) -> bool:
        return not self.report

    def require_valid(self) -> SourceSpec:
        if self.report:
            raise ValueError(
                "superpotential has no valid linear factor: " + "; ".join(map(str, self.report))
            )
        return self

    def content_hash(self) -> str:
        return hashlib.sha256(format_spec(self).encode()).hexdigest()[:16]


def _tokens(text: str, lineno: int):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {text[col - 1]!r}", lineno, col)
        kind = m.lastgroup
        value = m.group(kind)
        out.append((kind, value, m.start(kind) + 1))
        pos = m.end()
    return out


class _Line:
    def __init__(self, tokens, lineno, end_col):
        self.tokens = tokens
        self.i = 0
        self.lineno = lineno
        self.end_col = end_col

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def error(self, message, col=None):
        tok = self.peek()
        if col is None:
            col = tok[2] if tok else self.end_col
        return ParseError(message, self.lineno, col)

    def take(self, kind, value=None, what=None):
        tok = self.peek()
        if tok is None or tok[0] != kind or (value is not None and tok[1] != value):
            found = "end of line" if tok is None else repr(tok[1])
            raise self.error(f"expected {what or value or kind}, found {found}")
        self.i += 1
        return tok

    def done(self):
        if self.peek() is not None:
            raise self.error(f"unexpected {self.peek()[1]!r}")


def _signed_items(line: _Line, product: bool):
    """Parse ``["-"] item (("+"|"-") item)*``; items are idents or ``a*b*c``."""
    items = []
    sign = 1
    tok = line.peek()
    if tok is not None and tok[0] == "op" and tok[1] == "-":
        line.i += 1
        sign = -1
    while True:
        start = line.peek()
        label = line.take("ident", what="identifier")
        path = [label]
        while product and line.peek() is not None and line.peek()[1] == "*":
            line.i += 1
            path.append(line.take("ident", what="identifier"))
        items.append((sign, tuple((p[1], p[2]) for p in path), start[2]))
        tok = line.peek()
        if tok is None:
            return items
        if tok[0] == "op" and tok[1] in "+-":
            line.i += 1
            sign = 1 if tok[1] == "+" else -1
            continue
        raise line.error(f"expected '+' or '-', found {tok[1]!r}")


def _combine(items):
    """Merge repeated monomials keeping first-occurrence order; drop zeros."""
    order, coeff = [], {}
    for c, key in items:
        if key not in coeff:
            order.append(key)
            coeff[key] = 0
        coeff[key] += c
    return tuple((coeff[k], k) for k in order if coeff[k] != 0)


def parse(text: str) -> SourceSpec:
    """Parse ``.quiver`` source; the returned spec carries its validation report."""
    name = None
    vertices: list[str] = []
    arrows: list[Arrow] = []
    labels: set[str] = set()
    linear = reduced = hint = None
    seen_header = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = _tokens(body, lineno)
        if not toks:
            continue
        line = _Line(toks, lineno, len(body.rstrip()) + 1)
        kw = line.take("ident", what="keyword")
        if not seen_header:
            if kw[1] != "quiver":
                raise ParseError("file must start with 'quiver NAME'", lineno, kw[2])
            name = line.take("ident", what="quiver name")[1]
            line.done()
            seen_header = True
            continue
        key = kw[1]
        if key == "quiver":
            raise ParseError("duplicate 'quiver' header", lineno, kw[2])
        if key == "vertex":
            ident = line.take("ident", what="vertex identifier")
            while True:
                if ident[1] in vertices:
                    raise ParseError(f"duplicate vertex {ident[1]!r}", lineno, ident[2])
                vertices.append(ident[1])
                if line.peek() is None:
                    break
                ident = line.take("ident", what="vertex identifier")
        elif key == "arrow":
            label = line.take("ident", what="arrow label")
            line.take("op", ":")
            tail = line.take("ident", what="tail vertex")
            line.take("arrow", "->")
            head = line.take("ident", what="head vertex")
            line.done()
            if label[1] in labels:
                raise ParseError(f"duplicate arrow label {label[1]!r}", lineno, label[2])
            for end in (tail, head):
                if end[1] not in vertices:
                    raise ParseError(f"unknown vertex {end[1]!r}", lineno, end[2])
            labels.add(label[1])
            arrows.append(Arrow(label[1], tail[1], head[1]))
        elif key in ("linear", "reduced", "hint"):
            line.take("op", ":")
            if line.peek() is None:
                what = {"linear": "L", "reduced": "R", "hint": "hint"}[key]
                raise line.error(f"{what} must be nonempty")
            if key == "hint":
                if hint is not None:
                    raise ParseError("duplicate 'hint' statement", lineno, kw[2])
                idents = []
                while line.peek() is not None:
                    tok = line.take("ident", what="arrow label")
                    if tok[1] not in labels:
                        raise ParseError(f"unknown arrow {tok[1]!r}", lineno, tok[2])
                    idents.append(tok[1])
                hint = tuple(idents)
                continue
            items = _signed_items(line, product=(key == "reduced"))
            if key == "linear" and any(len(p) > 1 for _, p, _ in items):
                raise ParseError("L must be a sum of single arrows", lineno, items[0][2])
            for _, path, _ in items:
                for label, col in path:
                    if label not in labels:
                        raise ParseError(f"unknown arrow {label!r}", lineno, col)
            if key == "linear":
                if linear is not None:
                    raise ParseError("duplicate 'linear' statement", lineno, kw[2])
                linear = _combine((c, p[0][0]) for c, p, _ in items)
            else:
                if reduced is not None:
                    raise ParseError("duplicate 'reduced' statement", lineno, kw[2])
                reduced = _combine((c, tuple(lbl for lbl, _ in p)) for c, p, _ in items)
                if not reduced:
                    raise ParseError("R must be nonempty (all terms cancel)", lineno, kw[2])
        else:
            raise ParseError(f"unknown statement {key!r}", lineno, kw[2])

    last = len(text.splitlines()) or 1
    if not seen_header:
        raise ParseError("empty input: expected 'quiver NAME'", 1, 1)
    if linear is None:
        raise ParseError("missing 'linear:' statement", last, 1)
    if reduced is None:
        raise ParseError("missing 'reduced:' statement", last, 1)

    return _finish(Quiver(tuple(vertices), tuple(arrows)), LinearPotential(linear, reduced), hint, name)


def _finish(quiver, potential, hint, name) -> SourceSpec:
    report = list(validate_potential(quiver, potential))
    if hint is not None and not report:
        report.extend(validate_hint(quiver, potential, hint))
    return SourceSpec(quiver, potential, hint, name, tuple(report))


def validate_hint(quiver: Quiver, potential: LinearPotential, hint) -> list[Violation]:
    """The hint must be B-arrows leaving exactly one other B-arrow per R monomial."""
    out = []
    _, b_set = arrow_split(quiver, potential)
    for label in hint:
        if label not in b_set:
            out.append(Violation("hint arrows lie in B", f"{label!r} is not a B-arrow"))
    if out:
        return out
    p_set = set(hint)
    for _, path in potential.reduced_part:
        free = [x for x in path if x not in p_set]
        if len(free) != 1:
            out.append(
                Violation(
                    "hint leaves one free arrow per R monomial",
                    f"{'*'.join(path)} has {len(free)} non-hint arrows",
                )
            )
    return out


def parse_file(path) -> SourceSpec:
    return parse(Path(path).read_text(encoding="utf-8"))


def _format_sum(terms, render) -> str:
    pieces = []
    for c, item in terms:
        for _ in range(abs(c)):
            pieces.append(("-" if c < 0 else "+", render(item)))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def format_spec(spec: SourceSpec) -> str:
    q, w = spec.quiver, spec.potential
    lines = [f"quiver {spec.name or 'unnamed'}", "vertex " + " ".join(q.vertices)]
    for a in q.arrows:
        lines.append(f"arrow {a.label}: {a.tail} -> {a.head}")
    lines.append("linear: " + _format_sum(w.linear_part, str))
    lines.append("reduced: " + _format_sum(w.reduced_part, "*".join))
    if spec.hint:
        lines.append("hint: " + " ".join(spec.hint))
    return "\n".join(lines) + "\n"


def builtin(name: str, n: int = 1) -> SourceSpec:
    """``c3`` (Hilbert scheme of C^3) or ``orbifold`` (the quiver for [C x C^2/Z_n])."""
    if name == "c3":
        q = Quiver(("0",), (Arrow("x", "0", "0"), Arrow("y", "0", "0"), Arrow("z", "0", "0")))
        w = LinearPotential(((1, "x"),), ((1, ("y", "z")), (-1, ("z", "y"))))
        return _finish(q, w, ("y",), "c3")
    if name == "orbifold":
        if not isinstance(n, int) or n < 1:
            raise ValueError(f"orbifold needs a positive integer n, got {n!r}")
        vertices = tuple(str(i) for i in range(n))
        arrows = [Arrow(f"x{i}", str(i), str(i)) for i in range(n)]
        arrows += [Arrow(f"a{i}", str(i), str((i + 1) % n)) for i in range(n)]
        arrows += [Arrow(f"b{i}", str((i + 1) % n), str(i)) for i in range(n)]
        # at vertex i the relation reads A_{i-1} B_{i-1} = B_i A_i on V_i
        reduced = []
        for i in range(n):
            reduced.append((1, (f"b{(i - 1) % n}", f"a{(i - 1) % n}")))
            reduced.append((-1, (f"a{i}", f"b{i}")))
        linear = tuple((1, f"x{i}") for i in range(n))
        hint = tuple(f"b{i}" for i in range(n))
        return _finish(Quiver(vertices, tuple(arrows)), LinearPotential(linear, reduced), hint, f"orbifold{n}")
    raise ValueError(f"unknown builtin {name!r} (expected 'c3' or 'orbifold')")


def load_spec(ref: str, n: int | None = None) -> SourceSpec:
    """Resolve ``builtin:c3``, ``builtin:orbifold`` (with ``n``), ``builtin:orbifold:3`` or a path."""
    if ref.startswith("builtin:"):
        parts = ref.split(":")[1:]
        name = parts[0]
        if len(parts) > 1:
            n = int(parts[1])
        if name == "orbifold" and n is None:
            raise ValueError("builtin:orbifold needs --n")
        return builtin(name, n if n is not None else 1)
    return parse_file(ref)
