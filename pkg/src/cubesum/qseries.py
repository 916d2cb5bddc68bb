"""Truncated q-expansions with exact rational coefficients.

A QSeries stands for q^e * (a_0 + a_1 q + ... + a_N q^N + O(q^(N+1))) with the
rational prefix e kept apart from the integer-indexed coefficients.  Series whose
prefixes differ by a non-integer cannot be added; that is a type error, not a
numerical one.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from pathlib import Path

from .arith import R_table, divisors, is_prime, kronecker_minus3

ORDER_CAP = 20_000


class TruncationError(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _lcm_denominators(cs) -> int:
    out = 1
    for c in cs:
        d = c.denominator
        if d != 1:
            out = out * d // gcd(out, d)
    return out


def _pack(ints: list[int], bits: int) -> int:
    acc = 0
    for c in reversed(ints):
        acc = (acc << bits) + c
    return acc


def _unpack(x: int, bits: int, n: int) -> list[int]:
    mask = (1 << bits) - 1
    half = 1 << (bits - 1)
    out = []
    for _ in range(n):
        r = x & mask
        if r >= half:
            r -= 1 << bits
        out.append(r)
        x = (x - r) >> bits
    return out


def _int_convolve(a: list[int], b: list[int], n: int) -> list[int]:
    """First n coefficients of a*b, by Kronecker substitution."""
    a, b = a[:n], b[:n]
    if not a or not b:
        return [0] * n
    ma = max(abs(c) for c in a)
    mb = max(abs(c) for c in b)
    if ma == 0 or mb == 0:
        return [0] * n
    bits = (ma * mb * min(len(a), len(b))).bit_length() + 2
    prod = _pack(a, bits) * _pack(b, bits)
    return _unpack(prod, bits, n)


class QSeries:
    __slots__ = ("prefix", "coeffs")

    def __init__(self, coeffs, prefix=0):
        self.prefix = _frac(prefix)
        self.coeffs = tuple(_frac(c) for c in coeffs)
        if not self.coeffs:
            raise ValueError("a QSeries needs at least one coefficient")
        if len(self.coeffs) - 1 > ORDER_CAP:
            raise TruncationError(f"truncation {len(self.coeffs) - 1} exceeds the cap {ORDER_CAP}")

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    @property
    def precision(self) -> Fraction:
        """Absolute exponent up to which the series is known."""
        return self.prefix + self.N

    @classmethod
    def constant(cls, c, N: int, prefix=0) -> "QSeries":
        return cls([c] + [0] * N, prefix)

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n] if 0 <= n <= self.N else Fraction(0)

    def coefficient(self, exponent) -> Fraction:
        """Coefficient of q^exponent (absolute)."""
        k = _frac(exponent) - self.prefix
        if k.denominator != 1:
            return Fraction(0)
        k = int(k)
        if k > self.N:
            raise TruncationError(f"q^{exponent} lies beyond the truncation")
        return self[k]

    def truncate(self, N: int) -> "QSeries":
        if N > self.N:
            raise TruncationError(f"cannot extend truncation {self.N} to {N}")
        return QSeries(self.coeffs[: N + 1], self.prefix)

    def _aligned(self, other: "QSeries"):
        shift = other.prefix - self.prefix
        if shift.denominator != 1:
            raise TypeError(f"incompatible prefixes {self.prefix} and {other.prefix}")
        shift = int(shift)
        lo = min(0, shift)
        prefix = self.prefix + lo
        top = min(self.precision, other.precision) - prefix
        n = int(top) + 1
        a = [self[i + lo] for i in range(n)]
        b = [other[i + lo - shift] for i in range(n)]
        return prefix, a, b

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QSeries.constant(other, max(0, int(self.precision)), 0)
        if not isinstance(other, QSeries):
            return NotImplemented
        prefix, a, b = self._aligned(other)
        return QSeries([x + y for x, y in zip(a, b)], prefix)

    __radd__ = __add__

    def __neg__(self):
        return QSeries([-c for c in self.coeffs], self.prefix)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self + (-_frac(other))
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        c = _frac(c)
        return QSeries([c * x for x in self.coeffs], self.prefix)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        n = min(self.N, other.N) + 1
        da = _lcm_denominators(self.coeffs[:n])
        db = _lcm_denominators(other.coeffs[:n])
        a = [int(c * da) for c in self.coeffs[:n]]
        b = [int(c * db) for c in other.coeffs[:n]]
        prod = _int_convolve(a, b, n)
        den = da * db
        return QSeries([Fraction(c, den) for c in prod], self.prefix + other.prefix)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = QSeries.constant(1, self.N)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> "QSeries":
        """Multiplicative inverse by Newton iteration; needs a_0 != 0."""
        if self.coeffs[0] == 0:
            raise ZeroDivisionError("series with vanishing leading coefficient is not invertible")
        unit = QSeries(self.coeffs, 0)
        g = QSeries([1 / self.coeffs[0]])
        n = 1
        while n <= self.N:
            n = min(2 * n, self.N + 1)
            f = unit.truncate(n - 1)
            g = QSeries(list(g.coeffs) + [0] * (n - len(g.coeffs)))
            g = g * (2 - f * g)
        return QSeries(g.coeffs, -self.prefix)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / _frac(other))
        return self * other.inverse()

    def power_rational(self, alpha) -> "QSeries":
        """f^alpha for rational alpha, with the leading coefficient's root taken in Q.

        Uses g_n = 1/(n f_0) * sum_{k=1..n} ((alpha + 1) k - n) f_k g_{n-k}.
        """
        alpha = _frac(alpha)
        f0 = self.coeffs[0]
        if f0 == 0:
            raise ZeroDivisionError("leading coefficient vanishes")
        g0 = rational_power(f0, alpha)
        pre = self.prefix * alpha
        f = self.coeffs
        g = [g0]
        for n in range(1, self.N + 1):
            acc = Fraction(0)
            for k in range(1, n + 1):
                if f[k]:
                    acc += ((alpha + 1) * k - n) * f[k] * g[n - k]
            g.append(acc / (n * f0))
        return QSeries(g, pre)

    def cube_root(self) -> "QSeries":
        r = self.power_rational(Fraction(1, 3))
        if r ** 3 != self:
            raise ArithmeticError("cube root failed to re-multiply")
        return r

    def substitute(self, m: int) -> "QSeries":
        """q -> q^m."""
        if m < 1:
            raise ValueError("scale must be positive")
        out = [Fraction(0)] * (self.N * m + 1)
        for i, c in enumerate(self.coeffs):
            out[i * m] = c
        return QSeries(out, self.prefix * m)

    def first_mismatch(self, other: "QSeries", upto=None):
        """First absolute exponent where the two series differ, or None."""
        prefix, a, b = self._aligned(other)
        for i, (x, y) in enumerate(zip(a, b)):
            e = prefix + i
            if upto is not None and e > upto:
                break
            if x != y:
                return e, x, y
        return None

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        try:
            return self.first_mismatch(other) is None
        except TypeError:
            return False

    def __hash__(self):
        return hash((self.prefix, self.coeffs))

    def evaluate(self, tau, ctx=None):
        """Numeric value at tau (Im tau > 0) from the truncated sum."""
        import mpmath

        ctx = ctx or mpmath.mp
        tau = ctx.mpc(tau)
        q = ctx.exp(2j * ctx.pi * tau)
        acc = ctx.mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * q + ctx.mpf(c.numerator) / c.denominator
        return acc * ctx.exp(2j * ctx.pi * tau * ctx.mpf(self.prefix.numerator) / self.prefix.denominator)

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        return f"QSeries(q^{self.prefix} * [{head}, ...], N={self.N})"


def rational_power(x: Fraction, alpha: Fraction) -> Fraction:
    """x^alpha exactly in Q, or ArithmeticError."""
    x, alpha = _frac(x), _frac(alpha)
    num, den = alpha.numerator, alpha.denominator
    out = []
    for part in (x.numerator, x.denominator):
        r = _int_root(abs(part), den)
        if r is None:
            raise ArithmeticError(f"{x} has no rational {den}-th root")
        out.append(r)
    sign = 1
    if x < 0:
        if den % 2 == 0:
            raise ArithmeticError(f"{x} has no real {den}-th root")
        sign = -1
    return (sign * Fraction(out[0], out[1])) ** num


def _int_root(n: int, k: int):
    if n == 0:
        return 0
    r = round(n ** (1.0 / k)) if n.bit_length() < 1000 else _int_root_newton(n, k)
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**k == n:
            return c
    r = _int_root_newton(n, k)
    return r if r**k == n else None


def _int_root_newton(n: int, k: int) -> int:
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


# --- eta products --------------------------------------------------------

@lru_cache(maxsize=64)
def euler_product(N: int) -> tuple[int, ...]:
    """prod_{n>=1} (1 - q^n) to q^N by the pentagonal number theorem."""
    out = [0] * (N + 1)
    k = 0
    while True:
        hit = False
        for kk in ((k,) if k == 0 else (k, -k)):
            e = kk * (3 * kk - 1) // 2
            if e <= N:
                out[e] += -1 if kk % 2 else 1
                hit = True
        if not hit and k > 0:
            break
        k += 1
    return tuple(out)


def eta_power(m: int, k: int, N: int) -> QSeries:
    """prod (1 - q^(mn))^k, without the q^(mk/24) prefix."""
    base = QSeries(euler_product(N // m)).substitute(m)
    base = QSeries(list(base.coeffs) + [0] * (N - base.N))
    return base**k


def eta_quotient(multipliers, N: int) -> QSeries:
    """prod eta(m tau)^k over (m, k), as a QSeries with prefix sum(k m)/24."""
    if N > ORDER_CAP:
        raise TruncationError(f"N={N} exceeds the cap {ORDER_CAP}")
    out = QSeries.constant(1, N)
    prefix = Fraction(0)
    for m, k in multipliers:
        if m < 1:
            raise ValueError("eta scales must be positive")
        out = out * eta_power(m, k, N)
        prefix += Fraction(k * m, 24)
    return QSeries(out.coeffs, prefix)


def f_series(N: int) -> QSeries:
    """f = eta(tau)^4 / eta(3 tau)^4 = q^(-1/3) (1 - 4q + 2q^2 + ...)."""
    return eta_quotient([(1, 4), (3, -4)], N)


def f_restricted_product(N: int) -> QSeries:
    """q^(-1/3) prod_{n>=0} (1 - q^(3n+1))^4 (1 - q^(3n+2))^4, built factor by factor."""
    c = [0] * (N + 1)
    c[0] = 1
    for k in range(1, N + 1):
        if k % 3 == 0:
            continue
        for _ in range(4):
            for i in range(N, k - 1, -1):
                c[i] -= c[i - k]
    return QSeries(c, Fraction(-1, 3))


def delta_series(N: int) -> QSeries:
    return eta_quotient([(1, 24)], N)


def sigma_k(n: int, k: int) -> int:
    return sum(d**k for d in divisors(n))


def eisenstein_E4(N: int) -> QSeries:
    return QSeries([1] + [240 * sigma_k(n, 3) for n in range(1, N + 1)])


def j_series(N: int) -> QSeries:
    """j = E4^3 / Delta = q^-1 + 744 + 196884 q + ..., known to q^N."""
    n = N + 1
    j = eisenstein_E4(n) ** 3 / delta_series(n)
    return j.truncate(N + 1)


# --- theta and weight-two forms ------------------------------------------

def theta_L(N: int) -> QSeries:
    """sum over (a, b) in Z^2 of q^(a^2 + ab + b^2), by enumeration."""
    c = [0] * (N + 1)
    bmax = isqrt(4 * N // 3) + 1
    for b in range(-bmax, bmax + 1):
        # a^2 + ab + b^2 <= N  <=>  (2a + b)^2 <= 4N - 3b^2
        disc = 4 * N - 3 * b * b
        if disc < 0:
            continue
        s = isqrt(disc)
        for a in range((-s - b) // 2 - 1, (s - b) // 2 + 2):
            n = a * a + a * b + b * b
            if n <= N:
                c[n] += 1
    return QSeries(c)


def G2_series(N: int) -> QSeries:
    return QSeries([Fraction(-1, 24)] + [sum(divisors(n)) for n in range(1, N + 1)])


def theta_and_G(N: int) -> tuple[QSeries, QSeries]:
    """(theta_L, G2(z) - 3 G2(3z))."""
    G2 = G2_series(N)
    G = G2 - G2.substitute(3).truncate(N).scale(3)
    return theta_L(N), G


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    order: int
    ok: bool
    mismatch: tuple | None = None

    def to_dict(self) -> dict:
        out = {"identity": self.name, "order": self.order, "pass": self.ok}
        if self.mismatch:
            e, lhs, rhs = self.mismatch
            out["first_mismatch"] = {"exponent": str(e), "lhs": str(lhs), "rhs": str(rhs)}
        return out


def verify_theta_identity(N: int) -> IdentityCheck:
    """theta_L^2 = 12 (G2(z) - 3 G2(3z)) to q^N."""
    if N < 10:
        raise ValueError("order must be at least 10")
    th, G = theta_and_G(N)
    bad = (th * th).first_mismatch(G.scale(12), upto=N)
    return IdentityCheck("theta", N, bad is None, bad)


def verify_modular_equation(N: int) -> IdentityCheck:
    """(f^3 + 27)(f^3 + 3)^3 = j(3 tau) f^3, compared up to q^N."""
    if N < 20:
        raise ValueError("order must be at least 20")
    M = N + 5
    f3 = f_series(M) ** 3
    lhs = (f3 + 27) * (f3 + 3) ** 3
    j3 = j_series(M // 3 + 2).substitute(3)
    rhs = j3 * f3
    if lhs.prefix != -4 or rhs.prefix != -4:
        raise ArithmeticError("leading exponents differ from -4")
    bad = lhs.first_mismatch(rhs, upto=N)
    return IdentityCheck("modular-eq", N, bad is None, bad)


@dataclass(frozen=True)
class SumKronResult:
    p: int
    odd_sum: int
    even_sum: int
    odd_expected: int
    even_expected: int

    @property
    def ok(self) -> bool:
        return self.odd_sum == self.odd_expected and self.even_sum == self.even_expected


def _sumkron_expected(p: int) -> tuple[int, int]:
    if p % 3 == 2:
        return (p + 1) // 3, p + 1
    return (p - 1) // 3, p - 3


def verify_sumkron(p: int, table: list[int] | None = None) -> SumKronResult:
    """2 * sum over 0 < x < p of R(p^2 - x^2), split by the parity of x."""
    if p < 5 or not is_prime(p):
        raise ValueError("needs a prime p >= 5")
    if table is None or len(table) <= p * p:
        table = R_table(p * p)
    odd = 2 * sum(table[p * p - x * x] for x in range(1, p, 2))
    even = 2 * sum(table[p * p - x * x] for x in range(2, p, 2))
    oe, ee = _sumkron_expected(p)
    return SumKronResult(p, odd, even, oe, ee)


def verify_sumkron_range(lo: int, hi: int) -> list[SumKronResult]:
    ps = [p for p in range(max(lo, 5), hi) if is_prime(p)]
    if not ps:
        return []
    table = R_table(max(ps) ** 2)
    return [verify_sumkron(p, table) for p in ps]


def sumkron_direct(p: int) -> tuple[int, int]:
    """Slow reference: divisor-by-divisor evaluation of both sums."""
    def r(n):
        return sum(kronecker_minus3(d) for d in divisors(n))

    odd = 2 * sum(r(p * p - x * x) for x in range(1, p, 2))
    even = 2 * sum(r(p * p - x * x) for x in range(2, p, 2))
    return odd, even


# --- the modular parametrization of y^2 = x^3 + 144 -----------------------

def param_series(N: int) -> tuple[QSeries, QSeries]:
    """(x, y) with y = -8 f(9 tau) - 12 and x the rational cube root of y^2 - 144.

    Both are known up to relative order N.
    """
    if N < 30:
        raise ValueError("order must be at least 30")
    f9 = f_series(N // 9 + 1).substitute(9).truncate(N)
    y = f9.scale(-8) - 12
    x = (y * y - 144).cube_root()
    if x.prefix != -2 or x.coeffs[0] != 4:
        raise ArithmeticError("unexpected leading term of x")
    resid = y * y - x**3 - 144
    if any(resid.coeffs):
        raise ArithmeticError("y^2 != x^3 + 144 as series")
    return x, y


# --- cache file ---------------------------------------------------------

def dump_series(records: dict[str, QSeries], path) -> None:
    """One record per series: name line, header "pnum pden N", then "num den" lines."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        for name, s in records.items():
            fh.write(f"# {name}\n")
            fh.write(f"{s.prefix.numerator} {s.prefix.denominator} {s.N}\n")
            for c in s.coeffs:
                fh.write(f"{c.numerator} {c.denominator}\n")
    os.replace(tmp, path)


def load_series(path) -> dict[str, QSeries]:
    out = {}
    with open(path) as fh:
        lines = iter(fh.read().splitlines())
        for line in lines:
            if not line.startswith("# "):
                raise ValueError(f"malformed series cache line: {line!r}")
            name = line[2:]
            pn, pd, n = map(int, next(lines).split())
            coeffs = []
            for _ in range(n + 1):
                a, b = next(lines).split()
                coeffs.append(Fraction(int(a), int(b)))
            out[name] = QSeries(coeffs, Fraction(pn, pd))
    return out


class SeriesCache:
    """Read-through cache of named series keyed by (name, N), one file per key."""

    def __init__(self, directory):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)

    def get(self, name: str, N: int, build) -> QSeries:
        path = self.dir / f"{name}_{N}.qs"
        if path.exists():
            return load_series(path)[name]
        s = build(N)
        dump_series({name: s}, path)
        return s
