"""Exact arithmetic in Q(w) and in the pure cubic extension Q(w)[t]/(t^3 - m).

w is a primitive cube root of unity (w^2 = -1 - w), so sqrt(-3) = 2w + 1.
"""

from __future__ import annotations

from fractions import Fraction


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class QOmega:
    """a + b*w with a, b rational."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = _q(a)
        self.b = _q(b)

    @classmethod
    def omega(cls) -> "QOmega":
        return cls(0, 1)

    @classmethod
    def sqrt_minus3(cls) -> "QOmega":
        return cls(1, 2)

    @staticmethod
    def _coerce(other):
        if isinstance(other, QOmega):
            return other
        if isinstance(other, (int, Fraction)):
            return QOmega(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QOmega(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QOmega(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        bd = self.b * o.b
        return QOmega(self.a * o.a - bd, self.a * o.b + self.b * o.a - bd)

    __rmul__ = __mul__

    def __neg__(self):
        return QOmega(-self.a, -self.b)

    def conjugate(self) -> "QOmega":
        return QOmega(self.a - self.b, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def inverse(self) -> "QOmega":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of 0 in Q(w)")
        c = self.conjugate()
        return QOmega(c.a / n, c.b / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        base = self if k >= 0 else self.inverse()
        out = QOmega(1)
        for _ in range(abs(k)):
            out = out * base
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def is_rational(self) -> bool:
        return self.b == 0

    def to_complex(self, ctx=None):
        import mpmath

        ctx = ctx or mpmath.mp
        w = ctx.expjpi(ctx.mpf(2) / 3)
        return ctx.mpf(self.a) + ctx.mpf(self.b) * w

    def __repr__(self):
        return f"({self.a} + {self.b}*w)"


class TowerNumber:
    """c0 + c1*t + c2*t^2 in Q(w)[t]/(t^3 - m), coefficients in Q(w)."""

    __slots__ = ("c", "m")

    def __init__(self, c0=0, c1=0, c2=0, m: int = 1):
        self.c = tuple(x if isinstance(x, QOmega) else QOmega(x) for x in (c0, c1, c2))
        self.m = m

    @classmethod
    def cube_root(cls, m: int) -> "TowerNumber":
        return cls(0, 1, 0, m=m)

    def omega(self) -> "TowerNumber":
        return TowerNumber(QOmega.omega(), m=self.m)

    def _coerce(self, other):
        if isinstance(other, TowerNumber):
            if other.m != self.m:
                raise ValueError("different cubic radicands")
            return other
        if isinstance(other, (int, Fraction, QOmega)):
            return TowerNumber(other, m=self.m)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TowerNumber(*(x + y for x, y in zip(self.c, o.c)), m=self.m)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TowerNumber(*(x - y for x, y in zip(self.c, o.c)), m=self.m)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a0, a1, a2 = self.c
        b0, b1, b2 = o.c
        m = self.m
        return TowerNumber(
            a0 * b0 + (a1 * b2 + a2 * b1) * m,
            a0 * b1 + a1 * b0 + a2 * b2 * m,
            a0 * b2 + a1 * b1 + a2 * b0,
            m=m,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return TowerNumber(*(-x for x in self.c), m=self.m)

    def norm(self) -> QOmega:
        """Norm down to Q(w)."""
        a, b, c = self.c
        m = self.m
        return a * a * a + b * b * b * m + c * c * c * m * m - a * b * c * m * 3

    def inverse(self) -> "TowerNumber":
        a, b, c = self.c
        m = self.m
        n = self.norm()
        if not n:
            raise ZeroDivisionError("inverse of 0 in the cubic tower")
        adj = TowerNumber(a * a - b * c * m, c * c * m - a * b, b * b - a * c, m=m)
        ninv = n.inverse()
        return TowerNumber(*(x * ninv for x in adj.c), m=m)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        base = self if k >= 0 else self.inverse()
        out = TowerNumber(1, m=self.m)
        for _ in range(abs(k)):
            out = out * base
        return out

    def sigma(self, k: int = 1) -> "TowerNumber":
        """The automorphism t -> w^k t, fixing Q(w)."""
        w = QOmega.omega()
        w1 = w ** (k % 3)
        w2 = w1 * w1
        return TowerNumber(self.c[0], self.c[1] * w1, self.c[2] * w2, m=self.m)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        return hash((self.c, self.m))

    def __bool__(self):
        return any(bool(x) for x in self.c)

    def to_complex(self, ctx=None, branch: int = 0):
        """Embed with t -> real cube root of m times w^branch, w = exp(2 pi i/3)."""
        import mpmath

        ctx = ctx or mpmath.mp
        w = ctx.expjpi(ctx.mpf(2) / 3)
        t = ctx.cbrt(ctx.mpf(self.m)) * w**branch
        return sum((x.to_complex(ctx) * t**i for i, x in enumerate(self.c)), ctx.mpc(0))

    def __repr__(self):
        return f"TowerNumber({self.c[0]}, {self.c[1]}, {self.c[2]}; t^3={self.m})"
