"""Number handling shared by every module.

Rational inputs (int / Fraction) stay exact; anything else is promoted to
float. The optical engine additionally needs i and sqrt(2) exactly, which is
what :class:`Surd` provides: elements of Q(i)[sqrt 2], stored as
``(a + b*sqrt2)`` with a, b Gaussian rationals.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Number
from typing import Union

TOL = 1e-12

Real = Union[int, Fraction, float]


def is_exact(*xs) -> bool:
    return all(isinstance(x, (int, Fraction)) and not isinstance(x, bool) for x in xs)


def coerce(x) -> Real:
    """Keep ints/Fractions exact, turn everything else into float."""
    if isinstance(x, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, Surd):
        r = x.to_rational()
        return r if r is not None else float(x.real_float())
    return float(x)


def parse_number(text: str) -> Real:
    """'3/4' -> Fraction(3, 4); '0.75' -> float; '1' -> Fraction(1)."""
    text = text.strip()
    try:
        if "/" in text or text.lstrip("+-").isdigit():
            return Fraction(text)
    except (ValueError, ZeroDivisionError):
        pass
    return float(text)


def close(a, b, tol: float = TOL) -> bool:
    if is_exact(a, b):
        return a == b
    return abs(complex(a) - complex(b)) <= tol


def check_probability(x, name: str = "probability") -> Real:
    x = coerce(x)
    if isinstance(x, float) and math.isnan(x):
        raise ValueError(f"{name} is NaN")
    if x < 0 or x > 1:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")
    return x


def exact_sqrt(q: Fraction) -> Fraction | None:
    """Square root of a rational when it is rational, else None."""
    q = Fraction(q)
    if q < 0:
        return None
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


class Surd:
    """Exact scalar ``(ar + i ai) + (br + i bi) * sqrt(2)``."""

    __slots__ = ("ar", "ai", "br", "bi")

    def __init__(self, ar=0, ai=0, br=0, bi=0):
        self.ar = Fraction(ar)
        self.ai = Fraction(ai)
        self.br = Fraction(br)
        self.bi = Fraction(bi)

    # constructors
    @classmethod
    def sqrt2(cls) -> "Surd":
        return cls(0, 0, 1, 0)

    @classmethod
    def inv_sqrt2(cls) -> "Surd":
        return cls(0, 0, Fraction(1, 2), 0)

    @classmethod
    def i(cls) -> "Surd":
        return cls(0, 1)

    @classmethod
    def lift(cls, x) -> "Surd | complex":
        if isinstance(x, Surd):
            return x
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return cls(x)
        return complex(x)

    # arithmetic
    def _pair(self, other):
        if isinstance(other, Surd):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Surd(other)
        return None

    def __add__(self, other):
        o = self._pair(other)
        if o is None:
            return complex(self) + other
        return Surd(self.ar + o.ar, self.ai + o.ai, self.br + o.br, self.bi + o.bi)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.ar, -self.ai, -self.br, -self.bi)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._pair(other)
        if o is None:
            return complex(self) * other
        # (a + b s)(c + d s) = ac + 2bd + (ad + bc) s, with Gaussian a..d
        a = (self.ar, self.ai)
        b = (self.br, self.bi)
        c = (o.ar, o.ai)
        d = (o.br, o.bi)

        def gm(x, y):
            return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])

        ac, bd, ad, bc = gm(a, c), gm(b, d), gm(a, d), gm(b, c)
        return Surd(ac[0] + 2 * bd[0], ac[1] + 2 * bd[1], ad[0] + bc[0], ad[1] + bc[1])

    __rmul__ = __mul__

    def conjugate(self) -> "Surd":
        return Surd(self.ar, -self.ai, self.br, -self.bi)

    def abs2(self) -> "Surd":
        return self * self.conjugate()

    def _inverse(self) -> "Surd":
        # multiply by complex conjugate, then by the sqrt2-conjugate of the
        # (real) result to land in Q
        n = self.abs2()  # real element x + y sqrt2
        x, y = n.ar, n.br
        den = x * x - 2 * y * y
        if den == 0:
            raise ZeroDivisionError("division by zero Surd")
        inv_n = Surd(x / den, 0, -y / den, 0)
        return self.conjugate() * inv_n

    def __truediv__(self, other):
        o = self._pair(other)
        if o is None:
            return complex(self) / other
        return self * o._inverse()

    def __rtruediv__(self, other):
        o = self._pair(other)
        if o is None:
            return other / complex(self)
        return o * self._inverse()

    def __eq__(self, other):
        o = self._pair(other)
        if o is None:
            if isinstance(other, Number):
                return complex(self) == complex(other)
            return NotImplemented
        return (self.ar, self.ai, self.br, self.bi) == (o.ar, o.ai, o.br, o.bi)

    def __hash__(self):
        return hash((self.ar, self.ai, self.br, self.bi))

    def is_zero(self) -> bool:
        return not (self.ar or self.ai or self.br or self.bi)

    def __bool__(self):
        return not self.is_zero()

    # conversion
    def __complex__(self):
        s = math.sqrt(2.0)
        return complex(float(self.ar) + s * float(self.br), float(self.ai) + s * float(self.bi))

    def real_float(self) -> float:
        return complex(self).real

    def __float__(self):
        return self.real_float()

    def to_rational(self) -> Fraction | None:
        if self.ai or self.br or self.bi:
            return None
        return self.ar

    def is_real(self) -> bool:
        return not (self.ai or self.bi)

    def __lt__(self, other):
        return _real_cmp(self, other) < 0

    def __le__(self, other):
        return _real_cmp(self, other) <= 0

    def __gt__(self, other):
        return _real_cmp(self, other) > 0

    def __ge__(self, other):
        return _real_cmp(self, other) >= 0

    def __repr__(self):
        parts = []
        for val, tag in ((self.ar, ""), (self.ai, "i"), (self.br, "√2"), (self.bi, "i√2")):
            if val:
                parts.append(f"{val}{tag}")
        return "Surd(" + (" + ".join(parts) or "0") + ")"


def _real_cmp(a: Surd, b) -> int:
    """Exact sign of a - b for real elements of Q[sqrt2]."""
    d = a - b
    if not isinstance(d, Surd):
        v = complex(d).real
        return (v > 0) - (v < 0)
    if not d.is_real():
        raise TypeError("ordering of complex values")
    x, y = d.ar, d.br  # sign of x + y*sqrt2
    if y == 0:
        return (x > 0) - (x < 0)
    if x == 0:
        return (y > 0) - (y < 0)
    if (x > 0) == (y > 0):
        return 1 if x > 0 else -1
    # opposite signs: compare x^2 with 2 y^2
    if x * x > 2 * y * y:
        return 1 if x > 0 else -1
    return 1 if y > 0 else -1


def simplify(x):
    """Collapse a real rational Surd to Fraction; leave others alone."""
    if isinstance(x, Surd):
        r = x.to_rational()
        return r if r is not None else x
    return x


def to_real(x) -> Real:
    """Probability-like scalar -> Fraction if exactly rational, else float."""
    if isinstance(x, Surd):
        r = x.to_rational()
        return r if r is not None else x.real_float()
    if isinstance(x, complex):
        return x.real
    return coerce(x)


def sqrt_scalar(p) -> "Surd | float":
    """sqrt(p) kept exact when p is a rational square or twice one."""
    if is_exact(p):
        r = exact_sqrt(Fraction(p))
        if r is not None:
            return Surd(r)
        r = exact_sqrt(Fraction(p) * 2)
        if r is not None:
            return Surd(0, 0, r / 2, 0)
    return math.sqrt(float(p))
