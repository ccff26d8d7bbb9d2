"""Rational upper bounds for real quantities.

Every function here returns a :class:`fractions.Fraction` (wrapped in
:class:`UpperReal` where it bounds something irrational) whose direction of
rounding is fixed: ``*_upper`` never undershoots, ``*_lower`` never
overshoots. No binary floating point is involved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

# fixed-point width used inside the Taylor evaluation of exp
_EXP_BITS = 96


@dataclass(frozen=True)
class UpperReal:
    """An exact rational known to be >= some real quantity.

    ``what`` records the quantity being bounded; it is informational and
    ignored by comparisons.
    """

    value: Fraction
    what: str = ""

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))

    def __add__(self, other):
        if isinstance(other, UpperReal):
            return UpperReal(self.value + other.value, _join(self.what, "+", other.what))
        return UpperReal(self.value + Fraction(other), self.what)

    __radd__ = __add__

    def __mul__(self, other):
        # only valid for nonnegative factors; the bound direction would flip otherwise
        if isinstance(other, UpperReal):
            if self.value < 0 or other.value < 0:
                raise ValueError("products of upper bounds need nonnegative factors")
            return UpperReal(self.value * other.value, _join(self.what, "*", other.what))
        other = Fraction(other)
        if other < 0 or self.value < 0:
            raise ValueError("products of upper bounds need nonnegative factors")
        return UpperReal(self.value * other, self.what)

    __rmul__ = __mul__

    def __float__(self):
        return float(self.value)

    def __le__(self, other):
        return self.value <= _as_fraction(other)

    def __lt__(self, other):
        return self.value < _as_fraction(other)

    def __ge__(self, other):
        return self.value >= _as_fraction(other)

    def __gt__(self, other):
        return self.value > _as_fraction(other)


def _join(a, op, b):
    if a and b:
        return f"({a}){op}({b})"
    return a or b


def _as_fraction(x) -> Fraction:
    if isinstance(x, UpperReal):
        return x.value
    return Fraction(x)


def to_rational(x) -> Fraction:
    """Exact conversion; decimal strings like "0.17" become 17/100."""
    if isinstance(x, UpperReal):
        return x.value
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, (str, Rational)):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def sqrt_upper(x, bits: int = 48) -> Fraction:
    """Rational >= sqrt(x), relative error below 2**-bits for x >= 1."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("square root of a negative number")
    if x == 0:
        return Fraction(0)
    scale = 1 << bits
    num, den = x.numerator, x.denominator
    # sqrt(n/d) = sqrt(n*d)/d ; isqrt is the integer Newton iteration
    r = math.isqrt(num * den * scale * scale)
    if r * r != num * den * scale * scale:
        r += 1
    return Fraction(r, den * scale)


def sqrt_lower(x, bits: int = 48) -> Fraction:
    x = Fraction(x)
    if x < 0:
        raise ValueError("square root of a negative number")
    scale = 1 << bits
    r = math.isqrt(x.numerator * x.denominator * scale * scale)
    return Fraction(r, x.denominator * scale)


def _exp_fixed(x: Fraction, up: bool) -> tuple[int, int, int, int]:
    """Taylor sum of exp(x) in fixed point with scale 2**_EXP_BITS.

    Returns (partial_sum, first_omitted_term, K, scaled_x); every step rounds
    in the requested direction and the caller adds the tail if it needs one.
    """
    scale = 1 << _EXP_BITS
    if up:
        X = -((-x.numerator * scale) // x.denominator)
    else:
        X = (x.numerator * scale) // x.denominator
    k_min = 2 * math.ceil(x) + 40
    term = scale
    total = 0
    k = 0
    while True:
        total += term
        k += 1
        if up:
            term = -((-term * X) // (k * scale))
        else:
            term = (term * X) // (k * scale)
        if k >= k_min and term * (1 << 40) < total:
            return total, term, k, X


def exp_upper(x) -> UpperReal:
    """Rational >= e**x for x >= 0, relative error below 2**-30.

    Taylor partial sum up to K - 1 (K >= 2x + 40), plus the first omitted term
    times the geometric tail factor 1 / (1 - x/(K+1)).
    """
    x = to_rational(x)
    if x < 0:
        raise ValueError("exp_upper expects x >= 0")
    if x == 0:
        return UpperReal(Fraction(1), "exp(0)")
    scale = 1 << _EXP_BITS
    total, term, k, X = _exp_fixed(x, up=True)
    # remaining terms are bounded by term * sum (X/(k+1))^i
    ratio_den = (k + 1) * scale - X
    tail = -((-term * (k + 1) * scale) // ratio_den)
    return UpperReal(Fraction(total + tail, scale), f"exp({x})")


def exp_lower(x) -> Fraction:
    """Rational <= e**x for x >= 0 (truncated Taylor series, rounded down)."""
    x = to_rational(x)
    if x < 0:
        raise ValueError("exp_lower expects x >= 0")
    if x == 0:
        return Fraction(1)
    total, _, _, _ = _exp_fixed(x, up=False)
    return Fraction(total, 1 << _EXP_BITS)


def decimal_string(x: Fraction, digits: int = 12) -> str:
    """Informative decimal rendering with ``digits`` significant digits."""
    x = Fraction(x)
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    exp10 = len(str(x.numerator)) - len(str(x.denominator))
    if Fraction(10) ** exp10 > x:
        exp10 -= 1
    shift = digits - 1 - exp10
    scaled = x * Fraction(10) ** shift
    n = round(scaled)
    s = str(n)
    if shift <= 0:
        return sign + s + "0" * (-shift)
    if len(s) <= shift:
        s = "0" * (shift - len(s) + 1) + s
    out = s[:-shift] + "." + s[-shift:]
    return sign + out.rstrip("0").rstrip(".")


def rational_json(x) -> dict:
    x = _as_fraction(x)
    return {"num": x.numerator, "den": x.denominator, "decimal": decimal_string(x)}
