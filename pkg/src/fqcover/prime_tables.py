"""Counts of monic irreducibles over F_q and the genus-g prime-count bound."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .certified import UpperReal, sqrt_upper
from .errors import DegreeOutOfRange


def divisors(n: int) -> list[int]:
    if n < 1:
        raise DegreeOutOfRange(f"divisors need n >= 1, got {n}")
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def mobius(n: int) -> int:
    if n < 1:
        raise DegreeOutOfRange(f"mobius needs n >= 1, got {n}")
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def count_irreducibles_exact(q: int, n: int) -> int:
    """Number of monic irreducibles of degree n over F_q, by Mobius inversion.

    The formula is evaluated for any integer q >= 2; for non-prime-power q it
    is the interpolating value used by the bound pipeline at its q = 70 anchor.
    """
    if n < 1:
        raise DegreeOutOfRange(f"degree must be >= 1, got {n}")
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    total = sum(mobius(d) * q ** (n // d) for d in divisors(n))
    count, rem = divmod(total, n)
    assert rem == 0 and count >= 0
    return count


def pi_upper_bound(q: int, g, n: int) -> UpperReal:
    """Upper bound (q^n + 1 + 2 g q^(n/2)) / n on the number of degree-n primes.

    Exact for even n; for odd n the square root of q^n is rounded up with
    relative error below 2**-48.
    """
    if n < 1:
        raise DegreeOutOfRange(f"degree must be >= 1, got {n}")
    g = Fraction(g)
    if g < 0:
        raise ValueError("genus must be >= 0")
    if n % 2 == 0:
        half = Fraction(q ** (n // 2))
    else:
        half = sqrt_upper(q ** n)
    return UpperReal(Fraction(q ** n + 1, n) + 2 * g * half / n, f"pi_upper({q},{g},{n})")


@dataclass(frozen=True)
class PrimeCountTable:
    q: int
    counts: dict[int, int] = field(default_factory=dict)

    @classmethod
    def build(cls, q: int, max_n: int) -> "PrimeCountTable":
        return cls(q, {n: count_irreducibles_exact(q, n) for n in range(1, max_n + 1)})

    def identity_holds(self) -> bool:
        """Check sum_{d | n} d * pi(d) == q^n for every tabulated n."""
        return all(
            sum(d * self.counts[d] for d in divisors(n)) == self.q ** n
            for n in self.counts
            if all(d in self.counts for d in divisors(n)))

    def rows(self, genus=0):
        for n, c in sorted(self.counts.items()):
            yield n, c, pi_upper_bound(self.q, genus, n)
