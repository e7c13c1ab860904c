"""Double-word (double-double) arithmetic for extended-precision stress modes.

A value is an unevaluated sum hi + lo of two IEEE doubles with
|lo| <= ulp(hi)/2, giving roughly 32 significant decimal digits.  Only the
operations needed by the local-model pipeline are provided: +, -, *, integer
powers, division, and comparison against floats.  Error-free transformations
follow Dekker and Knuth (two_sum / two_prod with the 2^27+1 splitter).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_SPLITTER = 134217729.0  # 2^27 + 1


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _quick_two_sum(a: float, b: float) -> tuple[float, float]:
    # requires |a| >= |b|
    s = a + b
    return s, b - (s - a)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ahi, alo = _split(a)
    bhi, blo = _split(b)
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


@dataclass(frozen=True, slots=True)
class DD:
    """Double-double number hi + lo."""

    hi: float
    lo: float = 0.0

    def __float__(self) -> float:
        return self.hi + self.lo

    def __neg__(self) -> "DD":
        return DD(-self.hi, -self.lo)

    def __add__(self, other) -> "DD":
        o = _coerce(other)
        s, e = _two_sum(self.hi, o.hi)
        e += self.lo + o.lo
        hi, lo = _quick_two_sum(s, e)
        return DD(hi, lo)

    __radd__ = __add__

    def __sub__(self, other) -> "DD":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "DD":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "DD":
        o = _coerce(other)
        p, e = _two_prod(self.hi, o.hi)
        e += self.hi * o.lo + self.lo * o.hi
        hi, lo = _quick_two_sum(p, e)
        return DD(hi, lo)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "DD":
        o = _coerce(other)
        q1 = self.hi / o.hi
        r = self - o * q1
        q2 = (r.hi + r.lo) / o.hi
        hi, lo = _quick_two_sum(q1, q2)
        return DD(hi, lo)

    def __rtruediv__(self, other) -> "DD":
        return _coerce(other) / self

    def __abs__(self) -> "DD":
        return -self if self.hi < 0 or (self.hi == 0 and self.lo < 0) else self

    def powi(self, n: int) -> "DD":
        """Integer power by binary exponentiation."""
        if n < 0:
            return DD(1.0) / self.powi(-n)
        result = DD(1.0)
        base = self
        e = n
        while e > 0:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result


def _coerce(x) -> DD:
    if isinstance(x, DD):
        return x
    return DD(float(x))


def dd_sum(values) -> DD:
    """Exact-compensated sum of floats/DDs."""
    acc = DD(0.0)
    for v in values:
        acc = acc + v
    return acc


def fsum_or_dd(values, extended: bool):
    """Float fsum in double mode, DD accumulation in extended mode."""
    if extended:
        return dd_sum(values)
    return math.fsum(float(v) for v in values)
