"""Arithmetic in F_q and F_q[x] for prime powers q = p^k.

Field elements are encoded as integers ``0 <= e < q``: the element
``c_0 + c_1 g + ... + c_{k-1} g^{k-1}`` (``g`` a root of the defining
polynomial) is stored as ``c_0 + c_1 p + ... + c_{k-1} p^{k-1}``. For
prime fields this is just the residue mod p.

Polynomials are immutable :class:`FqPoly` values holding a tuple of encoded
coefficients, lowest degree first, with no trailing zeros. The residue of
``r`` modulo a polynomial of degree ``d`` has index ``sum(c_i * q**i)``;
that index fixes the enumeration order used everywhere downstream.
"""
from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass, field as dc_field
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    ConstantPolynomial,
    DegreeOutOfRange,
    DivisionByZeroPoly,
    FieldMismatch,
    NonPrimeBase,
    NotMonic,
    PolynomialParseError,
)

DEFAULT_BUDGET = 2 ** 24

# extension-field operation tables are only materialised up to this order
_TABLE_LIMIT = 256


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % small == 0:
            return n == small
    # deterministic Miller-Rabin for n < 3.3e24
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_power_decompose(n: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` with ``n == p**k`` for prime p, or None."""
    if n < 2:
        return None
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            return (p, k) if n == 1 else None
        p += 1
    return (n, 1)


class _NegInfDegree:
    """Degree of the zero polynomial.

    Compares below every integer but refuses arithmetic, so code that forgets
    the zero case fails loudly instead of computing with a bogus degree.
    """

    __slots__ = ()

    def __repr__(self):
        return "-inf"

    def __lt__(self, other):
        return not isinstance(other, _NegInfDegree)

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return isinstance(other, _NegInfDegree)

    def __eq__(self, other):
        return isinstance(other, _NegInfDegree)

    def __hash__(self):
        return hash("-inf-degree")

    def _no_arith(self, *args):
        raise TypeError("the zero polynomial has no integer degree")

    __add__ = __radd__ = __sub__ = __rsub__ = __mul__ = __rmul__ = _no_arith
    __index__ = __int__ = _no_arith


NEG_INF = _NegInfDegree()


def _base_polymulmod(a: Sequence[int], b: Sequence[int], mod: Sequence[int], p: int) -> list[int]:
    """Multiply coefficient vectors over F_p modulo a monic ``mod`` (length k+1)."""
    k = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for i in range(len(prod) - 1, k - 1, -1):
        c = prod[i]
        if c:
            for j in range(k + 1):
                prod[i - k + j] = (prod[i - k + j] - c * mod[j]) % p
    return (prod + [0] * k)[:k]


@dataclass(frozen=True)
class FieldConfig:
    """The finite field F_q, q = p^k.

    ``defining_poly`` holds the monic irreducible over F_p (coefficients,
    constant term first) used to build the extension; None when k == 1.
    """

    p: int
    k: int = 1
    defining_poly: tuple[int, ...] | None = None
    _tables: tuple | None = dc_field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.k > 1 and self.q <= _TABLE_LIMIT:
            object.__setattr__(self, "_tables", self._build_tables())

    @property
    def q(self) -> int:
        return self.p ** self.k

    def __str__(self):
        return f"F_{self.q}"

    # element encoding ---------------------------------------------------

    def to_vector(self, e: int) -> list[int]:
        out = []
        for _ in range(self.k):
            e, c = divmod(e, self.p)
            out.append(c)
        return out

    def from_vector(self, v: Sequence[int]) -> int:
        if len(v) > self.k:
            raise ValueError(f"element vector longer than extension degree {self.k}")
        e = 0
        for c in reversed(v):
            e = e * self.p + (c % self.p)
        return e

    # arithmetic ----------------------------------------------------------

    def _build_tables(self):
        q, p = self.q, self.p
        vecs = [self.to_vector(e) for e in range(q)]
        pw = [p ** i for i in range(self.k)]
        add = np.zeros((q, q), dtype=np.int64)
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            va = vecs[a]
            for b in range(a, q):
                vb = vecs[b]
                s = sum(((x + y) % p) * w for x, y, w in zip(va, vb, pw))
                m = sum(c * w for c, w in zip(_base_polymulmod(va, vb, self.defining_poly, p), pw))
                add[a, b] = add[b, a] = s
                mul[a, b] = mul[b, a] = m
        neg = [sum(((-c) % p) * w for c, w in zip(vecs[a], pw)) for a in range(q)]
        inv = [0] * q
        for a in range(1, q):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        return add, mul, add.tolist(), mul.tolist(), neg, inv

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        if self._tables is not None:
            return self._tables[2][a][b]
        return self.from_vector([x + y for x, y in zip(self.to_vector(a), self.to_vector(b))])

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.p
        if self._tables is not None:
            return self._tables[4][a]
        return self.from_vector([-x for x in self.to_vector(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if self._tables is not None:
            return self._tables[3][a][b]
        return self.from_vector(
            _base_polymulmod(self.to_vector(a), self.to_vector(b), self.defining_poly, self.p))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        if self._tables is not None:
            return self._tables[5][a]
        result, base, e = 1, a, self.q - 2
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    # vectorised versions over numpy int64 arrays
    def add_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.k == 1:
            return (a + b) % self.p
        return self._require_tables()[0][a, b]

    def mul_array(self, a: np.ndarray, c: int) -> np.ndarray:
        if self.k == 1:
            return (a * c) % self.p
        return self._require_tables()[1][a, c]

    def _require_tables(self):
        if self._tables is None:
            raise BudgetExceeded(f"vectorised arithmetic needs q <= {_TABLE_LIMIT} for extension fields")
        return self._tables

    # convenience ----------------------------------------------------------

    def poly(self, coeffs: Sequence[int] = ()) -> "FqPoly":
        return FqPoly(self, coeffs)

    def x(self) -> "FqPoly":
        return FqPoly(self, (0, 1))

    def one(self) -> "FqPoly":
        return FqPoly(self, (1,))

    def zero(self) -> "FqPoly":
        return FqPoly(self, ())

    def parse(self, text: str) -> "FqPoly":
        return parse_poly(self, text)


def field_make(p: int, k: int = 1) -> FieldConfig:
    """Build F_{p^k}, using the lexicographically least monic irreducible as modulus."""
    if k < 1:
        raise DegreeOutOfRange(f"extension degree must be >= 1, got {k}")
    if not is_prime(p):
        raise NonPrimeBase(f"{p} is not prime")
    if k == 1:
        return FieldConfig(p, 1, None)
    base = FieldConfig(p, 1, None)
    for f in monic_polys(base, k):
        if is_irreducible(f):
            return FieldConfig(p, k, f.coeffs)
    raise AssertionError("an irreducible of every degree exists over F_p")


def field_from_order(q: int, k: int | None = None) -> FieldConfig:
    """Field of order q; if given, k must agree with q = p^k."""
    pk = prime_power_decompose(q)
    if pk is None:
        raise NonPrimeBase(f"{q} is not a prime power")
    p, kk = pk
    if k is not None and k != kk:
        raise DegreeOutOfRange(f"q={q} is {p}^{kk}, not a {k}-th power of a prime")
    return field_make(p, kk)


class FqPoly:
    """Immutable polynomial over a :class:`FieldConfig`."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldConfig, coeffs: Sequence[int] = ()):
        q = field.q
        if field.k == 1:
            cs = [c % q for c in coeffs]
        else:
            cs = list(coeffs)
            for c in cs:
                if not 0 <= c < q:
                    raise ValueError(f"coefficient code {c} out of range for {field}")
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("FqPoly is immutable")

    @classmethod
    def _raw(cls, field: FieldConfig, coeffs: list[int]) -> "FqPoly":
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        obj = object.__new__(cls)
        object.__setattr__(obj, "field", field)
        object.__setattr__(obj, "coeffs", tuple(coeffs))
        return obj

    # basic queries -----------------------------------------------------

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def index(self) -> int:
        """Position in the canonical residue enumeration: sum(c_i * q**i)."""
        q = self.field.q
        out = 0
        for c in reversed(self.coeffs):
            out = out * q + c
        return out

    @classmethod
    def from_index(cls, field: FieldConfig, index: int) -> "FqPoly":
        q = field.q
        cs = []
        while index:
            index, c = divmod(index, q)
            cs.append(c)
        return cls._raw(field, cs)

    def lex_key(self) -> tuple:
        """Sort key: degree first, then coefficients compared from the constant term up."""
        return (len(self.coeffs), self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, FqPoly):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.coeffs))

    def __repr__(self):
        return f"FqPoly({self.field}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)

    def __bool__(self):
        return bool(self.coeffs)

    # arithmetic ----------------------------------------------------------

    def _check(self, other: "FqPoly"):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other: "FqPoly") -> "FqPoly":
        self._check(other)
        F = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return FqPoly._raw(F, out)

    def __neg__(self) -> "FqPoly":
        F = self.field
        return FqPoly._raw(F, [F.neg(c) for c in self.coeffs])

    def __sub__(self, other: "FqPoly") -> "FqPoly":
        return self + (-other)

    def scale(self, c: int) -> "FqPoly":
        F = self.field
        return FqPoly._raw(F, [F.mul(c, a) for a in self.coeffs])

    def __mul__(self, other: "FqPoly") -> "FqPoly":
        self._check(other)
        F = self.field
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return FqPoly._raw(F, [])
        out = [0] * (len(a) + len(b) - 1)
        if F.k == 1:
            p = F.p
            for i, ai in enumerate(a):
                if ai:
                    for j, bj in enumerate(b):
                        out[i + j] += ai * bj
            return FqPoly._raw(F, [c % p for c in out])
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] = F.add(out[i + j], F.mul(ai, bj))
        return FqPoly._raw(F, out)

    def __divmod__(self, other: "FqPoly") -> tuple["FqPoly", "FqPoly"]:
        self._check(other)
        if not other.coeffs:
            raise DivisionByZeroPoly("division by the zero polynomial")
        F = self.field
        rem = list(self.coeffs)
        b = other.coeffs
        db = len(b) - 1
        if len(rem) - 1 < db:
            return FqPoly._raw(F, []), self
        inv_lc = F.inv(b[-1])
        quot = [0] * (len(rem) - db)
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i]
            if c == 0:
                continue
            c = F.mul(c, inv_lc)
            quot[i - db] = c
            for j in range(db + 1):
                rem[i - db + j] = F.sub(rem[i - db + j], F.mul(c, b[j]))
        return FqPoly._raw(F, quot), FqPoly._raw(F, rem[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "FqPoly":
        if not self.coeffs:
            return self
        return self.scale(self.field.inv(self.lc))

    def __call__(self, point: int) -> int:
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, point), c)
        return acc


def poly_gcd(a: FqPoly, b: FqPoly) -> FqPoly:
    """Monic gcd (zero only when both inputs are zero)."""
    while b:
        a, b = b, a % b
    return a.monic()


@functools.lru_cache(maxsize=65536)
def divides(m: FqPoly, f: FqPoly) -> bool:
    """True when m | f (m nonzero)."""
    return not (f % m)


@functools.lru_cache(maxsize=65536)
def poly_lcm(a: FqPoly, b: FqPoly) -> FqPoly:
    if not a or not b:
        return a.field.zero()
    return (a * b // poly_gcd(a, b)).monic()


def poly_powmod(base: FqPoly, e: int, mod: FqPoly) -> FqPoly:
    result = base.field.one() % mod
    base = base % mod
    while e:
        if e & 1:
            result = result * base % mod
        base = base * base % mod
        e >>= 1
    return result


def poly_arith(a: FqPoly, b: FqPoly, op: str):
    """Dispatch on ``op`` in {add, sub, mul, divmod, gcd}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "divmod":
        return divmod(a, b)
    if op == "gcd":
        return poly_gcd(a, b)
    raise ValueError(f"unknown operation {op!r}")


def _require_monic_nonconstant(f: FqPoly):
    if not f.coeffs or f.degree < 1:
        raise ConstantPolynomial(f"expected degree >= 1, got {f}")
    if not f.is_monic():
        raise NotMonic(f"{f} is not monic")


def is_irreducible(f: FqPoly) -> bool:
    """Rabin-style test: no factor of degree i <= n/2 divides x^(q^i) - x."""
    _require_monic_nonconstant(f)
    n = f.degree
    if n == 1:
        return True
    x = f.field.x()
    h = x % f
    for _ in range(n // 2):
        h = poly_powmod(h, f.field.q, f)
        if poly_gcd(h - x, f).degree > 0:
            return False
    return True


def monic_polys(field: FieldConfig, d: int) -> Iterator[FqPoly]:
    """All monic polynomials of degree d, constant term most significant in the order."""
    for lower in itertools.product(range(field.q), repeat=d):
        yield FqPoly._raw(field, list(lower) + [1])


def irreducibles(field: FieldConfig, d: int) -> Iterator[FqPoly]:
    for f in monic_polys(field, d):
        if is_irreducible(f):
            yield f


def factor_monic(f: FqPoly) -> list[tuple[FqPoly, int]]:
    """Factor a monic polynomial by trial division in (degree, lex) order.

    A monic polynomial of degree d that divides the remaining cofactor after
    all smaller degrees were stripped is necessarily irreducible, so the loop
    needs no separate irreducibility test.
    """
    _require_monic_nonconstant(f)
    rem = f
    found: list[tuple[FqPoly, int]] = []
    d = 1
    while 2 * d <= rem.degree:
        for cand in monic_polys(f.field, d):
            if 2 * d > rem.degree:
                break
            e = 0
            while True:
                quo, r = divmod(rem, cand)
                if r:
                    break
                rem = quo
                e += 1
            if e:
                found.append((cand, e))
        d += 1
    if rem.degree >= 1:
        for i, (g, e) in enumerate(found):
            if g == rem:
                found[i] = (g, e + 1)
                break
        else:
            found.append((rem, 1))
    found.sort(key=lambda fe: fe[0].lex_key())
    return found


def enumerate_residues(m: FqPoly, budget: int = DEFAULT_BUDGET) -> list[FqPoly]:
    """Every polynomial of degree < deg m, in index order."""
    _require_monic_nonconstant(m)
    count = residue_count(m, budget)
    return [FqPoly.from_index(m.field, i) for i in range(count)]


def residue_count(m: FqPoly, budget: int = DEFAULT_BUDGET) -> int:
    count = m.field.q ** m.degree
    if count > budget:
        raise BudgetExceeded(
            f"{m.field.q}^{m.degree} residues mod a degree-{m.degree} modulus exceed the budget of {budget}",
            degree=m.degree, required=count, budget=budget)
    return count


def reduction_map(Q: FqPoly, m: FqPoly, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Array sending residue index i (mod Q) to the index of that residue mod m.

    Reduction is F_q-linear, so the residue of ``sum c_i x^i`` is
    ``sum c_i (x^i mod m)`` and the whole table is built column-wise.
    """
    residue_count(Q, budget)
    return _reduction_map(Q, m)


@functools.lru_cache(maxsize=4096)
def _reduction_map(Q: FqPoly, m: FqPoly) -> np.ndarray:
    F = Q.field
    q = F.q
    n = q ** Q.degree
    d, e = Q.degree, m.degree
    idx = np.arange(n, dtype=np.int64)
    if F.k > 1 and q > _TABLE_LIMIT:
        out = np.fromiter((FqPoly.from_index(F, i) % m for i in range(n)), dtype=np.int64, count=n)
        out.flags.writeable = False
        return out
    out_digits = [np.zeros(n, dtype=np.int64) for _ in range(e)]
    xi = F.one() % m
    x = F.x()
    for i in range(d):
        digit = (idx // q ** i) % q
        for j, c in enumerate(xi.coeffs):
            if c:
                out_digits[j] = F.add_array(out_digits[j], F.mul_array(digit, c))
        xi = xi * x % m
    out = np.zeros(n, dtype=np.int64)
    for j in range(e - 1, -1, -1):
        out = out * q + out_digits[j]
    out.flags.writeable = False
    return out


# text format ---------------------------------------------------------------

_TERM = re.compile(
    r"""^(?:(?P<coef>\d+|\[[\d,]*\])\*?)?
         (?:(?P<x>x)(?:\^(?P<exp>\d+))?)?$""",
    re.VERBOSE,
)


def _parse_coef(field: FieldConfig, text: str) -> int:
    if text.startswith("["):
        body = text[1:-1].strip()
        parts = [int(t) for t in body.split(",")] if body else []
        if len(parts) > field.k:
            raise PolynomialParseError(f"coefficient {text} has more than k={field.k} entries")
        return field.from_vector(parts)
    return int(text) % field.p


def parse_poly(field: FieldConfig, text: str) -> FqPoly:
    """Parse the ``c*x^e + ...`` text format."""
    s = "".join(text.split())
    if not s:
        raise PolynomialParseError("empty polynomial")
    coeffs: dict[int, int] = {}
    for term in s.split("+"):
        mt = _TERM.match(term)
        if not term or not mt or (mt.group("coef") is None and mt.group("x") is None):
            raise PolynomialParseError(f"cannot parse term {term!r} in {text!r}")
        coef = 1 if mt.group("coef") is None else _parse_coef(field, mt.group("coef"))
        if mt.group("x") is None:
            e = 0
        else:
            e = 1 if mt.group("exp") is None else int(mt.group("exp"))
        coeffs[e] = field.add(coeffs.get(e, 0), coef)
    top = max(coeffs)
    return FqPoly._raw(field, [coeffs.get(i, 0) for i in range(top + 1)])


def format_coef(field: FieldConfig, c: int) -> str:
    if field.k == 1 or c < field.p:
        return str(c)
    return "[" + ",".join(str(v) for v in field.to_vector(c)) + "]"


def format_poly(f: FqPoly) -> str:
    if not f.coeffs:
        return "0"
    parts = []
    for e in range(len(f.coeffs) - 1, -1, -1):
        c = f.coeffs[e]
        if not c:
            continue
        cs = format_coef(f.field, c)
        if e == 0:
            parts.append(cs)
            continue
        mono = "x" if e == 1 else f"x^{e}"
        parts.append(mono if c == 1 else f"{cs}*{mono}")
    return "+".join(parts)
