"""Weierstrass curves over any field whose elements support + - * / and ==.

Works with int/Fraction (Q), FpElt, Fp2Elt, QOmega, TowerNumber and mpmath
numbers.  The CM formulas for y^2 + y = x^3 live here as well, together with
minimal models of y^2 = x^3 + 16 n^2 and Tate's algorithm over Q.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import poly
from .arith import FpElt, Fp2Elt, factorize, is_prime
from .tower import QOmega, TowerNumber


class NotOnCurveError(ValueError):
    pass


@dataclass(frozen=True)
class Point:
    """Affine point, or the point at infinity when x is None."""

    x: object = None
    y: object = None

    @property
    def is_zero(self) -> bool:
        return self.x is None

    def __repr__(self):
        return "O" if self.is_zero else f"({self.x}, {self.y})"


O = Point()


@dataclass(frozen=True)
class WeierstrassModel:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    a1: object = 0
    a2: object = 0
    a3: object = 0
    a4: object = 0
    a6: object = 0
    label: str | None = field(default=None, compare=False)
    # (u, r, s, t) with x = u^2 X + r, y = u^3 Y + s u^2 X + t from this model to its parent
    transform: tuple | None = field(default=None, compare=False)

    @property
    def a_invariants(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.a_invariants
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @property
    def c_invariants(self):
        b2, b4, b6, _ = self.b_invariants
        c4 = b2 * b2 - 24 * b4
        c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6
        return c4, c6

    @property
    def discriminant(self):
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def map_coefficients(self, f, label: str | None = None) -> "WeierstrassModel":
        """Base change: apply f to every coefficient."""
        return WeierstrassModel(*(f(a) for a in self.a_invariants), label=label or self.label)

    def over_fp(self, p: int) -> "WeierstrassModel":
        return self.map_coefficients(lambda a: FpElt(int(Fraction(a).numerator) * pow(Fraction(a).denominator, -1, p), p))

    def over_fp2(self, p: int) -> "WeierstrassModel":
        def conv(a):
            a = Fraction(a)
            return Fp2Elt(a.numerator * pow(a.denominator, -1, p), 0, p)

        return self.map_coefficients(conv)

    def rst(self, r, s, t) -> "WeierstrassModel":
        """Model after x = X + r, y = Y + sX + t (u = 1)."""
        a1, a2, a3, a4, a6 = self.a_invariants
        return WeierstrassModel(
            a1 + 2 * s,
            a2 - s * a1 + 3 * r - s * s,
            a3 + r * a1 + 2 * t,
            a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
            a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1,
            label=self.label,
        )

    def scale(self, u) -> "WeierstrassModel":
        """Model after x = u^2 X, y = u^3 Y."""
        return WeierstrassModel(
            self.a1 / u, self.a2 / u**2, self.a3 / u**3, self.a4 / u**4, self.a6 / u**6, label=self.label
        )

    def lhs_minus_rhs(self, x, y):
        a1, a2, a3, a4, a6 = self.a_invariants
        return y * y + a1 * x * y + a3 * y - (x * x * x + a2 * x * x + a4 * x + a6)

    def contains(self, P: Point) -> bool:
        if P.is_zero:
            return True
        return self.lhs_minus_rhs(P.x, P.y) == 0

    def check(self, P: Point) -> Point:
        if not self.contains(P):
            raise NotOnCurveError(f"{P} is not on {self}")
        return P

    def point(self, x, y) -> Point:
        return self.check(Point(x, y))

    def neg(self, P: Point) -> Point:
        if P.is_zero:
            return P
        return Point(P.x, -P.y - self.a1 * P.x - self.a3)

    def add(self, P: Point, Q: Point, check: bool = False) -> Point:
        if check:
            self.check(P)
            self.check(Q)
        if P.is_zero:
            return Q
        if Q.is_zero:
            return P
        a1, a2, a3, a4, a6 = self.a_invariants
        x1, y1 = P.x, P.y
        x2, y2 = Q.x, Q.y
        if x1 == x2:
            if y1 + y2 + a1 * x2 + a3 == 0:
                return O
            lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
            nu = (-x1 * x1 * x1 + a4 * x1 + 2 * a6 - a3 * y1) / (2 * y1 + a1 * x1 + a3)
        else:
            lam = (y2 - y1) / (x2 - x1)
            nu = (y1 * x2 - y2 * x1) / (x2 - x1)
        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = -(lam + a1) * x3 - nu - a3
        return Point(x3, y3)

    def sub(self, P: Point, Q: Point) -> Point:
        return self.add(P, self.neg(Q))

    def mul(self, k: int, P: Point) -> Point:
        """[k]P by double-and-add."""
        if k < 0:
            return self.mul(-k, self.neg(P))
        result = O
        addend = P
        while k:
            if k & 1:
                result = self.add(result, addend)
            addend = self.add(addend, addend)
            k >>= 1
        return result

    def order(self, P: Point, bound: int) -> int | None:
        """Smallest n <= bound with [n]P = O, else None."""
        Q = P
        for n in range(1, bound + 1):
            if Q.is_zero:
                return n
            Q = self.add(Q, P)
        return None

    def __str__(self):
        return self.label or f"[{', '.join(str(a) for a in self.a_invariants)}]"


def add(P: Point, Q: Point, E: WeierstrassModel) -> Point:
    return E.add(P, Q, check=True)


def scalar_mul(k: int, P: Point, E: WeierstrassModel) -> Point:
    return E.mul(k, E.check(P))


# --- the CM curve y^2 + y = x^3 ------------------------------------------

def e1_min(base=lambda a: a) -> WeierstrassModel:
    """y^2 + y = x^3 with coefficients passed through `base`."""
    return WeierstrassModel(base(0), base(0), base(1), base(0), base(0), label="E^1_min")


def omega_like(x):
    """A primitive cube root of unity in the field of x."""
    if isinstance(x, Fp2Elt):
        return Fp2Elt.omega(x.p)
    if isinstance(x, QOmega):
        return QOmega.omega()
    if isinstance(x, TowerNumber):
        return x.omega()
    if isinstance(x, FpElt):
        raise ValueError(f"F_{x.p} contains no sqrt(-3); work over F_p^2")
    try:
        import mpmath

        if isinstance(x, (mpmath.mpc, mpmath.mpf)):
            return mpmath.expjpi(mpmath.mpf(2) / 3)
    except ImportError:  # pragma: no cover
        pass
    raise ValueError(f"cannot find sqrt(-3) next to {type(x).__name__}")


def mul_sqrt_minus3(P: Point) -> Point:
    """[sqrt(-3)]P on y^2 + y = x^3, sqrt(-3) = 2w + 1.

    sqrt(-3) = w - w^2, so [sqrt(-3)](x, y) = (w x, y) - (w^2 x, y), which gives
        x' = (x^3 + 1) / (-3 x^2)
        y' = (2y + 1)(x^3 + 1) / (3 sqrt(-3) x^3) + (2y + 1) w / sqrt(-3) - y - 1
    Points with x = 0 form the kernel and go to O.
    """
    if P.is_zero:
        return O
    x, y = P.x, P.y
    w = omega_like(x)
    s = 2 * w + 1
    if x == 0:
        return O
    x3 = x * x * x
    xn = (x3 + 1) / (-3 * x * x)
    yn = (2 * y + 1) * (x3 + 1) / (3 * s * x3) + (2 * y + 1) * w / s - y - 1
    return Point(xn, yn)


def omega_action(P: Point) -> Point:
    """[w](x, y) = (w x, y) on y^2 + y = x^3 (and on any y^2 = x^3 + k)."""
    if P.is_zero:
        return O
    return Point(omega_like(P.x) * P.x, P.y)


def triple_x(x):
    """x([3]P) on y^2 + y = x^3, or None at the poles x(x^3 + 1) = 0."""
    den = 9 * x * x * (x * x * x + 1) ** 2
    if den == 0:
        return None
    x3 = x * x * x
    return (x3 * x3 * x3 - 24 * x3 * x3 + 3 * x3 + 1) / den


def triple_explicit(P: Point, E: WeierstrassModel | None = None) -> Point:
    """[3]P on y^2 + y = x^3 from the closed-form x-coordinate.

    Only x is given in closed form; y is taken from chord-tangent tripling after
    asserting that the two x-coordinates agree.
    """
    if P.is_zero:
        return O
    xt = triple_x(P.x)
    if xt is None:
        return O
    if E is None:
        E = WeierstrassModel(*(P.x * 0 + c for c in (0, 0, 1, 0, 0)), label="E^1_min")
    Q = E.mul(3, P)
    if Q.is_zero or not (Q.x == xt):
        raise ArithmeticError(f"tripling formula disagrees with [3]P at {P}")
    return Q


# --- minimal models of E^n: y^2 = x^3 + 16 n^2 ----------------------------

def is_cube_free(n: int) -> bool:
    if n == 0:
        return False
    return all(e < 3 for e in factorize(abs(n)).values())


def e_n(n: int) -> WeierstrassModel:
    return WeierstrassModel(0, 0, 0, 0, Fraction(16 * n * n), label=f"E^{n}")


def minimal_model(n: int) -> WeierstrassModel:
    """Minimal model of y^2 = x^3 + 16 n^2 for cube-free n.

    2 | n:  Y^2 = X^3 + n^2/4,            (x, y) = (4X, 8Y)
    2 ∤ n:  Y^2 + Y = X^3 + (n^2 - 1)/4,  (x, y) = (4X, 8Y + 4)
    """
    if not is_cube_free(n):
        raise ValueError(f"{n} is not cube-free")
    if n % 2 == 0:
        E = WeierstrassModel(
            0, 0, 0, 0, Fraction(n * n, 4), label=f"E^{n}_min", transform=(2, 0, 0, 0)
        )
    else:
        E = WeierstrassModel(
            0, 0, 1, 0, Fraction(n * n - 1, 4), label=f"E^{n}_min", transform=(2, 0, 0, 4)
        )
    disc = E.discriminant
    assert disc.denominator == 1
    if any(e >= 12 for e in factorize(abs(disc.numerator)).values()):
        raise ArithmeticError(f"discriminant of {E.label} is not 12th-power-free")
    return E


def to_minimal(P: Point, n: int) -> Point:
    """Image of a point of y^2 = x^3 + 16n^2 on the minimal model."""
    if P.is_zero:
        return O
    if n % 2 == 0:
        return Point(P.x / 4, P.y / 8)
    return Point(P.x / 4, (P.y - 4) / 8)


def from_minimal(P: Point, n: int) -> Point:
    if P.is_zero:
        return O
    if n % 2 == 0:
        return Point(4 * P.x, 8 * P.y)
    return Point(4 * P.x, 8 * P.y + 4)


# --- Tate's algorithm over Q ---------------------------------------------

@dataclass(frozen=True)
class LocalReductionData:
    prime: int
    kodaira_type: str
    conductor_exponent: int
    tamagawa: int
    # +1 split multiplicative, -1 nonsplit, 0 additive, None good
    reduction: int | None = None
    # False when the input model had to be scaled down at this prime
    minimal: bool = True

    @property
    def local_a(self) -> int | None:
        """a_l for bad l: 1, -1 or 0 by reduction type."""
        return self.reduction


def _val(x: Fraction, p: int) -> int | float:
    x = Fraction(x)
    if x == 0:
        return float("inf")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _red(x: Fraction, p: int) -> int:
    x = Fraction(x)
    return x.numerator * pow(x.denominator, -1, p) % p


def _nroots(coeffs: list[Fraction], p: int) -> int:
    """Distinct roots mod p of a polynomial with p-integral coefficients (low first)."""
    f = poly.normalize([_red(c, p) for c in coeffs], p)
    if poly.degree(f) <= 0:
        return 0
    return poly.count_roots(f, p)


def tate_local(E: WeierstrassModel, ell: int) -> LocalReductionData:
    """Kodaira type, conductor exponent and Tamagawa number at the prime ell.

    E must have rational (Fraction/int) coefficients that are ell-integral.
    Non-minimal input is minimalised at ell on the way.
    """
    p = ell
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    a1, a2, a3, a4, a6 = (Fraction(a) for a in E.a_invariants)
    if any(_val(a, p) < 0 for a in (a1, a2, a3, a4, a6)):
        raise ValueError("model is not integral at the prime")
    half = pow(2, -1, p) if p != 2 else None
    shrunk = False

    def data(*args):
        return LocalReductionData(*args, minimal=not shrunk)

    def pdiv(x):
        return _val(x, p) >= 1

    while True:
        C = WeierstrassModel(a1, a2, a3, a4, a6)
        b2, b4, b6, b8 = C.b_invariants
        c4, _ = C.c_invariants
        vD = _val(C.discriminant, p)
        if vD == 0:
            return data(p, "I0", 0, 1, None)
        # move the singular point to (0, 0)
        if p == 2:
            if pdiv(b2):
                r = _red(a4, 2)
                t = _red(r * (1 + a2 + a4) + a6, 2)
            else:
                r = _red(a3, 2)
                t = _red(r + a4, 2)
        elif p == 3:
            r = _red(-b6, 3) if pdiv(b2) else _red(-b2 * b4, 3)
            t = _red(a1 * r + a3, 3)
        else:
            if pdiv(c4):
                r = _red(-b2 * Fraction(1, 12), p)
            else:
                r = _red(-(C.c_invariants[1] + b2 * c4) / (12 * c4), p)
            t = _red(-(a1 * r + a3) * half, p)
        a1, a2, a3, a4, a6 = C.rst(r, 0, t).a_invariants
        C = WeierstrassModel(a1, a2, a3, a4, a6)
        b2, b4, b6, b8 = C.b_invariants
        if not pdiv(c4):
            # multiplicative: split iff the tangent slopes are rational
            split = _nroots([-a2, a1, 1], p) > 0
            if split:
                return data(p, f"I{vD}", 1, vD, 1)
            return data(p, f"I{vD}", 1, 2 if vD % 2 == 0 else 1, -1)
        if _val(a6, p) < 2:
            return data(p, "II", vD, 1, 0)
        if _val(b8, p) < 3:
            return data(p, "III", vD - 1, 2, 0)
        if _val(b6, p) < 3:
            cp = 3 if _nroots([-a6 / p**2, a3 / p, 1], p) > 0 else 1
            return data(p, "IV", vD - 2, cp, 0)
        # p | a1, a2; p^2 | a3, a4; p^3 | a6
        if p == 2:
            s = _red(a2, 2)
            t = 2 * _red(a6 / 4, 2)
        elif p == 3:
            s = a1
            t = a3
        else:
            s = -a1 * half
            t = -a3 * half
        a1, a2, a3, a4, a6 = WeierstrassModel(a1, a2, a3, a4, a6).rst(0, s, t).a_invariants
        b = a2 / p
        c = a4 / p**2
        d = a6 / p**3
        w = 27 * d * d - b * b * c * c + 4 * b**3 * d - 18 * b * c * d + 4 * c**3
        x = 3 * c - b * b
        if pdiv(w):
            sw = 3 if pdiv(x) else 2
        else:
            sw = 1
        if sw == 1:
            cp = 1 + _nroots([d, c, b, 1], p)
            return data(p, "I0*", vD - 4, cp, 0)
        if sw == 2:
            if p == 2:
                r = c
            elif p == 3:
                r = b * c
            else:
                r = (b * c - 9 * d) / (2 * x)
            r = p * _red(r, p)
            a1, a2, a3, a4, a6 = WeierstrassModel(a1, a2, a3, a4, a6).rst(r, 0, 0).a_invariants
            ix = iy = 3
            mx = my = p * p
            while True:
                a2t = a2 / p
                a3t = a3 / my
                a4t = a4 / (p * mx)
                a6t = a6 / (mx * my)
                if pdiv(a3t * a3t + 4 * a6t):
                    t = my * (_red(a6t, 2) if p == 2 else _red(-a3t * half, p))
                    a1, a2, a3, a4, a6 = WeierstrassModel(a1, a2, a3, a4, a6).rst(0, 0, t).a_invariants
                    my *= p
                    iy += 1
                    a2t = a2 / p
                    a3t = a3 / my
                    a4t = a4 / (p * mx)
                    a6t = a6 / (mx * my)
                    if pdiv(a4t * a4t - 4 * a6t * a2t):
                        if p == 2:
                            r = mx * _red(a6t * a2t, 2)
                        else:
                            r = mx * _red(-a4t / (2 * a2t), p)
                        a1, a2, a3, a4, a6 = WeierstrassModel(a1, a2, a3, a4, a6).rst(r, 0, 0).a_invariants
                        mx *= p
                        ix += 1
                    else:
                        cp = 4 if _nroots([a6t, a4t, a2t], p) > 0 else 2
                        break
                else:
                    cp = 4 if _nroots([-a6t, a3t, 1], p) > 0 else 2
                    break
            m = ix + iy - 5
            return data(p, f"I{m}*", vD - m - 4, cp, 0)
        # triple root
        if p == 2:
            r = b
        elif p == 3:
            r = -d
        else:
            r = -b / 3
        r = p * _red(r, p)
        a1, a2, a3, a4, a6 = WeierstrassModel(a1, a2, a3, a4, a6).rst(r, 0, 0).a_invariants
        x3 = a3 / p**2
        x6 = a6 / p**4
        if not pdiv(x3 * x3 + 4 * x6):
            cp = 3 if _nroots([-x6, x3, 1], p) > 0 else 1
            return data(p, "IV*", vD - 6, cp, 0)
        t = -(p**2) * (_red(x6, 2) if p == 2 else _red(x3 * half, p))
        a1, a2, a3, a4, a6 = WeierstrassModel(a1, a2, a3, a4, a6).rst(0, 0, t).a_invariants
        if _val(a4, p) < 4:
            return data(p, "III*", vD - 7, 2, 0)
        if _val(a6, p) < 6:
            return data(p, "II*", vD - 8, 1, 0)
        # not minimal at p
        shrunk = True
        a1, a2, a3, a4, a6 = a1 / p, a2 / p**2, a3 / p**3, a4 / p**4, a6 / p**6


def bad_primes(E: WeierstrassModel) -> list[int]:
    d = Fraction(E.discriminant)
    return sorted(factorize(abs(d.numerator)))


def local_data(E: WeierstrassModel) -> dict[int, LocalReductionData]:
    return {ell: tate_local(E, ell) for ell in bad_primes(E)}


def conductor(E: WeierstrassModel) -> int:
    N = 1
    for ell, data in local_data(E).items():
        N *= ell**data.conductor_exponent
    return N


# --- JSON with decimal strings ---------------------------------------------

def _enc(a):
    if isinstance(a, Fp2Elt):
        return {"fp2": [str(a.a), str(a.b)], "p": str(a.p)}
    if isinstance(a, FpElt):
        return {"fp": str(a.value), "p": str(a.p)}
    a = Fraction(a)
    return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"


def _dec(v):
    if isinstance(v, dict):
        p = int(v["p"])
        if "fp2" in v:
            return Fp2Elt(int(v["fp2"][0]), int(v["fp2"][1]), p)
        return FpElt(int(v["fp"]), p)
    return Fraction(v)


def curve_to_json(E: WeierstrassModel) -> str:
    payload = {k: _enc(a) for k, a in zip(("a1", "a2", "a3", "a4", "a6"), E.a_invariants)}
    payload["label"] = E.label
    return json.dumps(payload, sort_keys=True)


def curve_from_json(s: str) -> WeierstrassModel:
    d = json.loads(s)
    return WeierstrassModel(*(_dec(d[k]) for k in ("a1", "a2", "a3", "a4", "a6")), label=d.get("label"))


def point_to_json(P: Point) -> str:
    if P.is_zero:
        return json.dumps({"infinity": True})
    return json.dumps({"x": _enc(P.x), "y": _enc(P.y)}, sort_keys=True)


def point_from_json(s: str) -> Point:
    d = json.loads(s)
    if d.get("infinity"):
        return O
    return Point(_dec(d["x"]), _dec(d["y"]))
