"""Exact arithmetic in a real quadratic field Q(sqrt d).

Only used by isometry certificates, where rescaling a generator by the square
root of a rational ratio is unavoidable.  Everything else stays in Q.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt


def _squarefree_split(n: int) -> tuple[int, int]:
    """n = s*s*f with f squarefree; returns (s, f)."""
    s, f, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            f *= p
        p += 1
    return s, f * n


class Surd:
    """a + b*sqrt(d), with d a squarefree integer > 1 (or b == 0)."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d=1):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = int(d)
        if self.b == 0 or self.d == 1:
            self.a += self.b if self.d == 1 else 0
            self.b = Fraction(0)
            self.d = 1

    @classmethod
    def sqrt(cls, q) -> "Surd":
        q = Fraction(q)
        if q < 0:
            raise ValueError("negative radicand")
        if q == 0:
            return cls(0)
        # sqrt(p/r) = sqrt(p*r)/r
        n = q.numerator * q.denominator
        s, f = _squarefree_split(n)
        if f == 1:
            return cls(Fraction(s, q.denominator))
        return cls(0, Fraction(s, q.denominator), f)

    def _coerce(self, other):
        if isinstance(other, Surd):
            return other
        return Surd(other)

    def _field(self, other):
        if self.d == 1:
            return other.d
        if other.d in (1, self.d):
            return self.d
        raise ValueError(f"mixed quadratic fields sqrt({self.d}) and sqrt({other.d})")

    def __add__(self, other):
        o = self._coerce(other)
        return Surd(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        d = self._field(o)
        return Surd(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        d = self._field(o)
        norm = o.a * o.a - o.b * o.b * d
        conj = Surd(o.a / norm, -o.b / norm, d)
        return self * conj

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a or self.b)

    def __float__(self):
        return float(self.a) + float(self.b) * self.d ** 0.5

    def __repr__(self):
        if not self.b:
            return f"Surd({self.a})"
        return f"Surd({self.a} + {self.b}*sqrt({self.d}))"

    def __str__(self):
        if not self.b:
            return str(self.a)
        tail = f"{self.b}*sqrt({self.d})"
        return tail if not self.a else f"{self.a}+{tail}"


def is_square(q: Fraction) -> bool:
    q = Fraction(q)
    return q >= 0 and isqrt(q.numerator) ** 2 == q.numerator and isqrt(q.denominator) ** 2 == q.denominator
