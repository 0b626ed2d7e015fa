"""Exact arithmetic in the localized Grothendieck ring.

Classes are reduced fractions of integer polynomials in a single variable
``s`` with ``s**2 == L``, the Lefschetz motive.  Half-integer powers of L
are odd powers of ``s``, and dividing by ``[GL_n]`` just means a polynomial
denominator.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from sympy.polys.domains import ZZ
from sympy.polys.euclidtools import dup_inner_gcd

__all__ = [
    "MotiveClass",
    "L",
    "S",
    "ONE",
    "ZERO",
    "lefschetz_power",
    "gl_class",
    "gl_dimvec_class",
    "grassmannian_class",
    "euler_characteristic",
    "evaluate_at_prime",
]

Poly = tuple[int, ...]


def _trim(p: Sequence[int]) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _pneg(a: Poly) -> Poly:
    return tuple(-c for c in a)


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _pscale(a: Poly, c: int) -> Poly:
    return _trim([x * c for x in a])


def _pshift(a: Poly, k: int) -> Poly:
    return (0,) * k + a if a else ()


def _low_order(a: Poly) -> int:
    for i, c in enumerate(a):
        if c:
            return i
    raise ValueError("zero polynomial has no low order")


def _is_monomial(a: Poly) -> bool:
    return sum(1 for c in a if c) == 1


def _content(a: Poly) -> int:
    return reduce(math.gcd, a, 0)


def _peval(a: Poly, x) -> int | Fraction:
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _canonical(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    num, den = _trim(num), _trim(den)
    if not den:
        raise ZeroDivisionError("MotiveClass with zero denominator")
    if not num:
        return (), (1,)
    if _is_monomial(den) or _is_monomial(num):
        # gcd with a monomial is a power of s times an integer
        k = min(_low_order(num), _low_order(den))
        num, den = num[k:], den[k:]
    else:
        h, cn, cd = dup_inner_gcd(
            [ZZ(c) for c in reversed(num)], [ZZ(c) for c in reversed(den)], ZZ
        )
        num = tuple(int(c) for c in reversed(cn))
        den = tuple(int(c) for c in reversed(cd))
    g = math.gcd(_content(num), _content(den))
    if den[-1] < 0:
        g = -g
    if g != 1:
        num = tuple(c // g for c in num)
        den = tuple(c // g for c in den)
    return num, den


class MotiveClass:
    """An element of Q(s), stored as a canonical fraction ``num / den``.

    Coefficient tuples are in ascending powers of ``s``.  The canonical form
    has coprime numerator and denominator in Z[s] and a positive leading
    coefficient in the denominator, so equality is structural.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Iterable[int] = (), den: Iterable[int] = (1,), *, _raw=False):
        if _raw:
            self.num, self.den = tuple(num), tuple(den)
        else:
            self.num, self.den = _canonical(tuple(int(c) for c in num), tuple(int(c) for c in den))
        self._hash = None

    # construction helpers -------------------------------------------------

    @classmethod
    def from_int(cls, n: int) -> MotiveClass:
        return cls((n,), (1,))

    @classmethod
    def from_fraction(cls, x: Fraction) -> MotiveClass:
        return cls((x.numerator,), (x.denominator,))

    @classmethod
    def from_L_poly(cls, coeffs: Sequence[int]) -> MotiveClass:
        """Class of the polynomial ``sum(coeffs[k] * L**k)``."""
        num = [0] * (2 * len(coeffs))
        for k, c in enumerate(coeffs):
            num[2 * k] = c
        return cls(num)

    @staticmethod
    def _coerce(x) -> MotiveClass:
        if isinstance(x, MotiveClass):
            return x
        if isinstance(x, int):
            return MotiveClass((x,), (1,), _raw=True) if x else ZERO
        if isinstance(x, Fraction):
            return MotiveClass.from_fraction(x)
        return NotImplemented

    # ring structure -------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return MotiveClass(_padd(self.num, other.num), self.den)
        return MotiveClass(
            _padd(_pmul(self.num, other.den), _pmul(other.num, self.den)),
            _pmul(self.den, other.den),
        )

    __radd__ = __add__

    def __neg__(self) -> MotiveClass:
        return MotiveClass(_pneg(self.num), self.den, _raw=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return ZERO
        return MotiveClass(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> MotiveClass:
        if not self.num:
            raise ZeroDivisionError("division by the zero motive")
        return MotiveClass(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise ZeroDivisionError("division by the zero motive")
        return MotiveClass(_pmul(self.num, other.den), _pmul(self.den, other.num))

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n: int) -> MotiveClass:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def times_s_power(self, k: int) -> MotiveClass:
        """Multiply by ``s**k`` (that is, by ``L**(k/2)``), cheaply."""
        if not self.num or k == 0:
            return self
        if k > 0:
            return MotiveClass(_pshift(self.num, k), self.den)
        return MotiveClass(self.num, _pshift(self.den, -k))

    # comparison -----------------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    # predicates -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_polynomial(self) -> bool:
        """True when the class is a polynomial in ``s`` with integer coefficients."""
        return self.den == (1,)

    def is_laurent(self) -> bool:
        """True when the denominator is a pure power of ``s`` (a class in M_C)."""
        return self.den[-1] == 1 and _is_monomial(self.den)

    def is_even(self) -> bool:
        """Only integer powers of L occur."""
        return all(c == 0 for c in self.num[1::2]) and all(c == 0 for c in self.den[1::2])

    def laurent_terms(self) -> dict[int, int]:
        """``{k: c}`` with ``self == sum(c * s**k)``; requires :meth:`is_laurent`."""
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial in L^(1/2)")
        shift = len(self.den) - 1
        return {i - shift: c for i, c in enumerate(self.num) if c}

    # evaluation -----------------------------------------------------------

    def evaluate_s(self, x) -> Fraction:
        d = _peval(self.den, x)
        if d == 0:
            raise ZeroDivisionError(f"denominator of {self} vanishes at s = {x}")
        return Fraction(_peval(self.num, x)) / d

    # serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {"num": [str(c) for c in self.num] or ["0"], "den": [str(c) for c in self.den]}

    @classmethod
    def from_json(cls, data: dict) -> MotiveClass:
        return cls([int(c) for c in data["num"]], [int(c) for c in data["den"]])

    # display --------------------------------------------------------------

    @staticmethod
    def _format_poly(p: Poly) -> str:
        terms = []
        for k in range(len(p) - 1, -1, -1):
            c = p[k]
            if not c:
                continue
            if k == 0:
                mono = ""
            elif k == 2:
                mono = "L"
            elif k % 2 == 0:
                mono = f"L^{k // 2}"
            else:
                mono = f"L^({k}/2)"
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        num = self._format_poly(self.num)
        if self.den == (1,):
            return num
        den = self._format_poly(self.den)
        if sum(1 for c in self.num if c) > 1:
            num = f"({num})"
        if sum(1 for c in self.den if c) > 1 or self.den[-1] != 1:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self) -> str:
        return f"MotiveClass({self})"


ZERO = MotiveClass((), (1,), _raw=True)
ONE = MotiveClass((1,), (1,), _raw=True)
S = MotiveClass((0, 1), (1,), _raw=True)
L = MotiveClass((0, 0, 1), (1,), _raw=True)


def lefschetz_power(e) -> MotiveClass:
    """``L**e`` for a half-integer ``e`` (int, Fraction or float like 1.5)."""
    twice = Fraction(e) * 2
    if twice.denominator != 1:
        raise ValueError(f"exponent {e} is not a half-integer")
    return ONE.times_s_power(int(twice))


def gl_class(n: int) -> MotiveClass:
    """``[GL_n] = prod_{k<n} (L^n - L^k)``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = ONE
    for k in range(n):
        out = out * (L ** n - L ** k)
    return out


def gl_dimvec_class(v: Sequence[int]) -> MotiveClass:
    out = ONE
    for n in v:
        out = out * gl_class(n)
    return out


def grassmannian_class(k: int, n: int) -> MotiveClass:
    if not 0 <= k <= n:
        raise ValueError(f"Grassmannian Gr({k},{n}) needs 0 <= k <= n")
    g = gl_class(n) / (gl_class(k) * gl_class(n - k) * L ** (k * (n - k)))
    assert g.is_polynomial(), f"[Gr({k},{n})] did not reduce to a polynomial: {g}"
    return g


def euler_characteristic(c: MotiveClass) -> int | Fraction:
    """Specialize ``L^(1/2) -> -1``."""
    try:
        value = c.evaluate_s(-1)
    except ZeroDivisionError:
        raise ValueError(f"Euler characteristic undefined for stacky class {c}") from None
    return int(value) if value.denominator == 1 else value


def evaluate_at_prime(c: MotiveClass, q: int) -> Fraction:
    """Value at ``L = q``; only defined for classes in integer powers of L."""
    if not c.is_even():
        raise ValueError(f"{c} has a half-integer power of L; cannot evaluate at L = {q}")
    num = _peval(c.num[::2], q)
    den = _peval(c.den[::2], q)
    if den == 0:
        raise ZeroDivisionError(f"{c} has a pole at L = {q}")
    return Fraction(num, den)
