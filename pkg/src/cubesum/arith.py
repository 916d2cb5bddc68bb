"""Exact arithmetic: primality, the character (-3/.), divisor sums, F_p and F_p^2.

F_p^2 is always F_p[w]/(w^2 + w + 1).  This needs p = 2 (mod 3); then w is a
primitive cube root of unity and 2w + 1 squares to -3.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

# Deterministic for every n < 3.3e24, which covers the 64-bit range.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_in_range(lo: int, hi: int, modulus: int = 1, residue: int = 0):
    """Yield primes lo <= q <= hi with q = residue (mod modulus), ascending."""
    start = max(lo, 2)
    first = start + ((residue - start) % modulus)
    for q in range(first, hi + 1, modulus):
        if is_prime(q):
            yield q


def require_criterion_prime(p: int) -> int:
    """Validate the standing hypothesis of the criterion: p prime, p = 8 (mod 9)."""
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p % 9 != 8:
        raise ValueError(f"{p} is not 8 mod 9")
    return p


def kronecker_minus3(r: int) -> int:
    """Kronecker symbol (-3 / r) for r >= 1.

    (-3/.) is the non-trivial character mod 3: for odd r quadratic reciprocity
    gives (r/3), and (-3/2) = -1 because -3 = 5 (mod 8).
    """
    if r < 1:
        raise ValueError("r must be positive")
    return (0, 1, -1)[r % 3]


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int, factors: dict[int, int] | None = None) -> list[int]:
    if factors is None:
        factors = factorize(n)
    divs = [1]
    for q, e in factors.items():
        divs = [d * q**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def sigma(n: int) -> int:
    """Sum of the positive divisors of n."""
    if n < 1:
        raise ValueError("n must be positive")
    return sum(divisors(n))


def R(n: int) -> Fraction:
    """R(n) = sum over d | n of (-3/d), with the convention R(0) = 1/6."""
    if n == 0:
        return Fraction(1, 6)
    return Fraction(sum(kronecker_minus3(d) for d in divisors(n)))


def R_table(limit: int) -> list[int]:
    """R(n) for 1 <= n <= limit by sieving the character over multiples.

    Index 0 holds 0, since R(0) = 1/6 is not an integer.
    """
    import numpy as np

    out = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        chi = kronecker_minus3(d)
        if chi:
            out[d::d] += chi
    return out.tolist()


def count_hex_representations(n: int) -> int:
    """Number of (a, b) in Z^2 with a^2 + ab + b^2 = n, by enumeration over b."""
    if n == 0:
        return 1
    count = 0
    # 4n = (2a + b)^2 + 3b^2 bounds |b| by sqrt(4n/3)
    bmax = isqrt(4 * n // 3) + 1
    for b in range(-bmax, bmax + 1):
        disc = 4 * n - 3 * b * b
        if disc < 0:
            continue
        s = isqrt(disc)
        if s * s != disc:
            continue
        for t in {s, -s}:
            if (t - b) % 2 == 0:
                count += 1
    return count


def hex_rep_numbers(n: int) -> tuple[Fraction, int]:
    """Return (R(n), r(n)); r counts lattice representations by a^2+ab+b^2.

    The two are related by r = 6R for all n >= 0; callers may assert it.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    return R(n), count_hex_representations(n)


def cube_root_of_3(p: int) -> "FpElt":
    """The unique cube root of 3 in F_p for a prime p = 2 (mod 3).

    Cubing is a bijection of F_p when 3 does not divide p - 1, with inverse
    x -> x^((2p - 1)/3).
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p % 3 != 2:
        raise ValueError("cube root of 3 is unique only for p = 2 (mod 3)")
    x = pow(3, (2 * p - 1) // 3, p)
    if pow(x, 3, p) != 3 % p:
        raise ArithmeticError(f"cube root of 3 mod {p} failed to verify")
    return FpElt(x, p)


def _inv_mod(a: int, p: int) -> int:
    if a % p == 0:
        raise ZeroDivisionError(f"inverse of 0 in F_{p}")
    return pow(a, -1, p)


class FpElt:
    """Element of the prime field F_p."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.value = value % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, FpElt):
            if other.p != self.p:
                raise ValueError("mixed characteristics")
            return other.value
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * _inv_mod(other.denominator, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FpElt(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FpElt(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FpElt(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FpElt(self.value * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElt(-self.value, self.p)

    def inverse(self) -> "FpElt":
        return FpElt(_inv_mod(self.value, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FpElt(self.value * _inv_mod(o, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FpElt(o * _inv_mod(self.value, self.p), self.p)

    def __pow__(self, k: int):
        if k < 0:
            return FpElt(pow(_inv_mod(self.value, self.p), -k, self.p), self.p)
        return FpElt(pow(self.value, k, self.p), self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self.value - o) % self.p == 0

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


class Fp2Elt:
    """Element a + b*w of F_p[w]/(w^2 + w + 1), p = 2 (mod 3)."""

    __slots__ = ("a", "b", "p")

    def __init__(self, a: int, b: int, p: int):
        self.a = a % p
        self.b = b % p
        self.p = p

    @classmethod
    def omega(cls, p: int) -> "Fp2Elt":
        return cls(0, 1, p)

    @classmethod
    def sqrt_minus3(cls, p: int) -> "Fp2Elt":
        return cls(1, 2, p)

    def _coerce(self, other):
        if isinstance(other, Fp2Elt):
            if other.p != self.p:
                raise ValueError("mixed characteristics")
            return other.a, other.b
        if isinstance(other, FpElt):
            if other.p != self.p:
                raise ValueError("mixed characteristics")
            return other.value, 0
        if isinstance(other, int):
            return other, 0
        if isinstance(other, Fraction):
            return other.numerator * _inv_mod(other.denominator, self.p), 0
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fp2Elt(self.a + o[0], self.b + o[1], self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fp2Elt(self.a - o[0], self.b - o[1], self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fp2Elt(o[0] - self.a, o[1] - self.b, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        c, d = o
        a, b = self.a, self.b
        bd = b * d
        return Fp2Elt(a * c - bd, a * d + b * c - bd, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Fp2Elt(-self.a, -self.b, self.p)

    def conjugate(self) -> "Fp2Elt":
        """Frobenius x -> x^p, which sends w to w^2 = -1 - w."""
        return Fp2Elt(self.a - self.b, -self.b, self.p)

    def norm(self) -> int:
        return (self.a * self.a - self.a * self.b + self.b * self.b) % self.p

    def inverse(self) -> "Fp2Elt":
        n_inv = _inv_mod(self.norm(), self.p)
        c = self.conjugate()
        return Fp2Elt(c.a * n_inv, c.b * n_inv, self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * Fp2Elt(o[0], o[1], self.p).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fp2Elt(o[0], o[1], self.p) * self.inverse()

    def __pow__(self, k: int):
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = Fp2Elt(1, 0, self.p)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.a - o[0]) % self.p == 0 and (self.b - o[1]) % self.p == 0

    def __hash__(self):
        if self.b == 0:
            return hash((self.a, self.p))
        return hash((self.a, self.b, self.p))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def in_base_field(self) -> bool:
        return self.b == 0

    def __repr__(self):
        return f"({self.a} + {self.b}w mod {self.p})"


def fp2_elements(p: int):
    """Iterate over all p^2 elements of F_p^2."""
    for a in range(p):
        for b in range(p):
            yield Fp2Elt(a, b, p)
