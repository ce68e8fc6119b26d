"""Exact arithmetic in GF(p^h).

Elements are encoded as integers ``0 <= a < q``: the coefficient vector
``(c_{h-1}, ..., c_0)`` of ``c_{h-1} x^{h-1} + ... + c_0`` read as a base-p
numeral.  Integer order is therefore the lexicographic order on coefficient
vectors, and every "smallest element" tie-break in the package uses it.

All arithmetic goes through precomputed ``q x q`` tables, so vectorised code
can index them with numpy arrays directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

import numpy as np

# Conway polynomials, coefficients listed from x^0 upwards (monic leading 1
# omitted).
CONWAY = {
    (2, 1): (1,),
    (2, 2): (1, 1),
    (3, 1): (1,),
    (3, 2): (2, 2),
    (3, 3): (1, 2, 0),
    (3, 4): (2, 0, 0, 2),
    (3, 5): (1, 2, 0, 0, 0),
    (5, 1): (3,),
    (5, 2): (2, 4),
    (7, 1): (4,),
    (7, 2): (3, 6),
    (11, 1): (9,),
    (13, 1): (11,),
}

MAX_ORDER = 3**5


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


def _polymulmod(a, b, modulus, p):
    # a, b: coefficient lists (low degree first), modulus monic without leading term
    h = len(modulus)
    prod = [0] * (2 * h - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, h - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for j, m in enumerate(modulus):
                prod[k - h + j] = (prod[k - h + j] - c * m) % p
    return prod[:h]


def _is_irreducible(modulus, p) -> bool:
    """Brute-force irreducibility: no root-free factorisation check needed for h <= 5,
    we simply test that x generates a field (no zero divisors among all products)."""
    h = len(modulus)
    if h == 1:
        return True
    # A polynomial of degree h <= 5 is reducible iff it has a factor of degree <= h // 2.
    for d in range(1, h // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            divisor = list(tail)  # monic of degree d, low coefficients first
            if _divides(divisor, modulus, p):
                return False
    return True


def _divides(divisor, modulus, p) -> bool:
    # remainder of (x^h + modulus) by (x^d + divisor)
    h = len(modulus)
    d = len(divisor)
    rem = list(modulus) + [1]
    for k in range(h, d - 1, -1):
        c = rem[k]
        if c:
            rem[k] = 0
            for j, m in enumerate(divisor):
                rem[k - d + j] = (rem[k - d + j] - c * m) % p
    return not any(rem[:d])


def smallest_irreducible(p: int, h: int) -> tuple[int, ...]:
    for tail in itertools.product(range(p), repeat=h):
        cand = tuple(reversed(tail))
        if cand[0] == 0 and h > 1:
            continue
        if _is_irreducible(list(cand), p):
            return cand
    raise FieldError(f"no irreducible polynomial of degree {h} over GF({p})")


@dataclass(frozen=True, eq=False)
class Field:
    """The finite field GF(p^h) with integer-encoded elements."""

    p: int
    h: int
    modulus: tuple[int, ...]
    add: np.ndarray = field(repr=False)
    mul: np.ndarray = field(repr=False)
    neg: np.ndarray = field(repr=False)
    inv: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return self.p**self.h

    def __eq__(self, other):
        return isinstance(other, Field) and (self.p, self.h, self.modulus) == (
            other.p,
            other.h,
            other.modulus,
        )

    def __hash__(self):
        return hash((self.p, self.h, self.modulus))

    def __len__(self):
        return self.q

    def elements(self):
        return [FieldElement(self, a) for a in range(self.q)]

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, (tuple, list)):
            return self.from_coeffs(value)
        return FieldElement(self, int(value) % self.q if self.h == 1 else int(value))

    def from_coeffs(self, coeffs) -> "FieldElement":
        """Element from a coefficient vector written highest degree first."""
        if len(coeffs) != self.h:
            raise FieldError("coefficient vector has wrong length")
        a = 0
        for c in coeffs:
            a = a * self.p + int(c) % self.p
        return FieldElement(self, a)

    def coeffs(self, a: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.h):
            out.append(a % self.p)
            a //= self.p
        return tuple(reversed(out))

    @cached_property
    def sub(self) -> np.ndarray:
        return self.add[:, self.neg]

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            a, n = int(self.inv[a]), -n
        r = 1
        while n:
            if n & 1:
                r = int(self.mul[r, a])
            a = int(self.mul[a, a])
            n >>= 1
        return r

    @cached_property
    def squares(self) -> np.ndarray:
        return np.unique(self.mul[np.arange(self.q), np.arange(self.q)])

    @cached_property
    def primitive(self) -> int:
        for g in range(2 if self.q > 2 else 1, self.q):
            seen, x = set(), 1
            for _ in range(self.q - 1):
                x = int(self.mul[x, g])
                seen.add(x)
            if len(seen) == self.q - 1:
                return g
        return 1

    def sqrt(self, a: int) -> int | None:
        """Smallest square root of ``a``, or None for a nonsquare."""
        roots = np.flatnonzero(self.mul[np.arange(self.q), np.arange(self.q)] == a)
        return int(roots[0]) if len(roots) else None

    def __repr__(self):
        return f"GF({self.p}^{self.h})" if self.h > 1 else f"GF({self.p})"


@dataclass(frozen=True, order=True)
class FieldElement:
    field: Field = field(compare=False)
    value: int

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("elements from different fields")
            return other.value
        return self.field(other).value

    def __add__(self, other):
        return FieldElement(self.field, int(self.field.add[self.value, self._coerce(other)]))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, int(self.field.sub[self.value, self._coerce(other)]))

    def __rsub__(self, other):
        return FieldElement(self.field, int(self.field.sub[self._coerce(other), self.value]))

    def __mul__(self, other):
        return FieldElement(self.field, int(self.field.mul[self.value, self._coerce(other)]))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, int(self.field.neg[self.value]))

    def inverse(self):
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse")
        return FieldElement(self.field, int(self.field.inv[self.value]))

    def __truediv__(self, other):
        return self * FieldElement(self.field, self._coerce(other)).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return FieldElement(self.field, self.field.pow(self.value, n))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field(other).value
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.h, self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        if self.field.h == 1:
            return str(self.value)
        return "".join(map(str, self.field.coeffs(self.value)))


def make_field(p: int, h: int = 1, modulus=None) -> Field:
    """Build GF(p^h).

    ``modulus`` overrides the pinned Conway polynomial; it is given as the
    non-leading coefficients of a monic polynomial, lowest degree first.
    """
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if h < 1:
        raise FieldError("degree must be positive")
    if p**h > MAX_ORDER:
        raise FieldError(f"fields with more than {MAX_ORDER} elements are not supported")
    if modulus is None:
        modulus = CONWAY.get((p, h)) or smallest_irreducible(p, h)
    modulus = tuple(int(c) % p for c in modulus)
    if len(modulus) != h:
        raise FieldError("modulus has wrong degree")
    if not _is_irreducible(list(modulus), p):
        raise FieldError("modulus is reducible")
    q = p**h
    coeffs = [list(reversed(_digits(a, p, h))) for a in range(q)]  # low degree first

    def encode(c):
        a = 0
        for x in reversed(c):
            a = a * p + x
        return a

    add = np.empty((q, q), dtype=np.int64)
    mul = np.empty((q, q), dtype=np.int64)
    for a in range(q):
        for b in range(q):
            add[a, b] = encode([(x + y) % p for x, y in zip(coeffs[a], coeffs[b])])
            mul[a, b] = encode(_polymulmod(coeffs[a], coeffs[b], modulus, p))
    neg = np.array([encode([(-x) % p for x in coeffs[a]]) for a in range(q)], dtype=np.int64)
    inv = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        (b,) = np.flatnonzero(mul[a] == 1)
        inv[a] = b
    for arr in (add, mul, neg, inv):
        arr.setflags(write=False)
    return Field(p, h, modulus, add, mul, neg, inv)


def _digits(a, p, h):
    out = []
    for _ in range(h):
        out.append(a % p)
        a //= p
    return list(reversed(out))


@dataclass(frozen=True)
class FieldAut:
    """The Frobenius power x -> x^(p^k) of a field."""

    field: Field
    k: int

    @cached_property
    def table(self) -> np.ndarray:
        f = self.field
        e = f.p**self.k
        t = np.array([f.pow(a, e) for a in range(f.q)], dtype=np.int64)
        t.setflags(write=False)
        return t

    def __call__(self, a):
        if isinstance(a, FieldElement):
            return FieldElement(self.field, int(self.table[a.value]))
        return self.table[a]

    @property
    def order(self) -> int:
        return self.field.h // gcd(self.k, self.field.h)

    @property
    def is_identity(self) -> bool:
        return self.k == 0

    def compose(self, other: "FieldAut") -> "FieldAut":
        return FieldAut(self.field, (self.k + other.k) % self.field.h)

    def __repr__(self):
        return f"x -> x^{self.field.p ** self.k}"


def frobenius_power(f: Field, k: int) -> FieldAut:
    if not 0 <= k < f.h:
        raise FieldError(f"Frobenius exponent {k} out of range for {f}")
    return FieldAut(f, k)


def find_nonsquare(f: Field) -> FieldElement:
    if f.p == 2:
        raise FieldError("every element of a field of characteristic 2 is a square")
    sq = set(f.squares.tolist())
    for a in range(f.q):
        if a not in sq:
            return FieldElement(f, a)
    raise FieldError("no nonsquare found")  # unreachable for odd q


@dataclass(frozen=True)
class Subfield:
    """A subfield of ``parent`` given by its element set, isomorphic to GF(p^d)."""

    parent: Field
    d: int
    elements: tuple[int, ...]

    @property
    def order(self) -> int:
        return self.parent.p**self.d

    @property
    def multiplicative_order(self) -> int:
        return self.order - 1

    def as_field(self) -> Field:
        return make_field(self.parent.p, self.d)


def fixed_subfield(a: FieldAut) -> Subfield:
    f = a.field
    fixed = tuple(int(x) for x in np.flatnonzero(a.table == np.arange(f.q)))
    d = gcd(a.k, f.h)
    if len(fixed) != f.p**d:
        raise FieldError("fixed field has unexpected size")
    return Subfield(f, d, fixed)
