"""Neron-Tate canonical heights of rational points, in the normalization of the
Birch and Swinnerton-Dyer formula (twice Silverman's), so that h^(P) is the limit
of h(x(2^k P)) / 4^k with h the logarithmic naive height of a rational number.

h^(P) = 2 lambda_oo(P) + (1/6) log|Delta| + sum_p [max(0, -ord_p x) + r_p] log p

with lambda_oo the archimedean local height normalized to be model independent and
r_p the correction at primes where P meets a singular fibre.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath

from .arith import factorize
from .curves import O, Point, WeierstrassModel, tate_local

DEFAULT_DPS = 40


class NonMinimalModel(ValueError):
    pass


def _ord(x: Fraction, p: int) -> int | float:
    x = Fraction(x)
    if x == 0:
        return math.inf
    v, n, d = 0, x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def naive_height(x: Fraction) -> float:
    x = Fraction(x)
    return math.log(max(abs(x.numerator), abs(x.denominator)))


def _mp(x) -> mpmath.mpf:
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def is_integral_model(E: WeierstrassModel) -> bool:
    return all(Fraction(a).denominator == 1 for a in E.a_invariants)


def check_minimal(E: WeierstrassModel) -> None:
    """Raise unless every prime has ord_p(Delta) < 12 or ord_p(c4) < 4."""
    if not is_integral_model(E):
        raise NonMinimalModel("model is not integral")
    disc = int(Fraction(E.discriminant))
    c4 = Fraction(E.c_invariants[0])
    for p, e in factorize(abs(disc)).items():
        if e >= 12 and _ord(c4, p) >= 4 and not tate_local(E, p).minimal:
            raise NonMinimalModel(f"model is not minimal at {p}")


def minimal_model_x3(k: int) -> tuple[WeierstrassModel, tuple]:
    """Minimal model of y^2 = x^3 + k, with (u, r, s, t) taking it back to the input."""
    if k == 0:
        raise ValueError("singular curve")
    u = 1
    for p, e in factorize(abs(k)).items():
        u *= p ** (e // 6)
    k6 = k // u**6
    if k6 % 64 == 16:
        E = WeierstrassModel(0, 0, 1, 0, Fraction(k6 - 16, 64), label=f"min(y^2=x^3+{k})")
        return E, (2 * u, 0, 0, 4 * u**3)
    return WeierstrassModel(0, 0, 0, 0, Fraction(k6), label=f"min(y^2=x^3+{k})"), (u, 0, 0, 0)


def transform_point(P: Point, urst) -> Point:
    """Image of P under x = u^2 X + r, y = u^3 Y + s u^2 X + t (from the big model to the small)."""
    if P.is_zero:
        return O
    u, r, s, t = urst
    X = (P.x - r) / u**2
    Y = (P.y - s * u**2 * X - t) / u**3
    return Point(Fraction(X), Fraction(Y))


def torsion_order(E: WeierstrassModel, P: Point, bound: int = 12) -> int | None:
    """Exact order of P if at most `bound` (Mazur), else None."""
    Q = P
    for n in range(1, bound + 1):
        if Q.is_zero:
            return n
        Q = E.add(Q, P)
    return None


# --- archimedean local height ---------------------------------------------

def _real_roots(E: WeierstrassModel):
    b2, b4, b6, _ = (_mp(v) for v in E.b_invariants)
    roots = mpmath.polyroots([4, b2, 2 * b4, b6], maxsteps=200, extraprec=200)
    return sorted(mpmath.re(r) for r in roots if abs(mpmath.im(r)) < mpmath.mpf(10) ** (-mpmath.mp.dps // 2))


def elliptic_log_real(E: WeierstrassModel, P: Point):
    """z in (0, w1/2] with P = +-(wp(z)); valid on the identity component."""
    from .analytic import period_lattice

    x = _mp(P.x)
    b2, b4, b6, _ = (_mp(v) for v in E.b_invariants)
    roots = mpmath.polyroots([4, b2, 2 * b4, b6], maxsteps=200, extraprec=200)
    e_max = max(_real_roots(E))
    if x < e_max - mpmath.mpf(10) ** (-mpmath.mp.dps // 2):
        raise NotImplementedError("point on the non-identity real component")
    # int_x^oo dt / sqrt(4 (t - e1)(t - e2)(t - e3)) = R_F(x - e1, x - e2, x - e3)
    z = mpmath.re(mpmath.elliprf(*(x - r for r in roots)))
    L = period_lattice(E, mpmath.mp.dps)
    return z, L


def archimedean_lambda_q(E: WeierstrassModel, P: Point, dps: int = DEFAULT_DPS):
    """Model-independent local height from the q-product:

    lambda(z) = -1/2 B2(Im z / Im tau) log|q| - log|1 - u| - sum log|(1 - q^n u)(1 - q^n / u)|
    on C / (Z + Z tau), u = e^(2 pi i z), B2(t) = t^2 - t + 1/6.
    """
    with mpmath.workdps(dps + 10):
        z, L = elliptic_log_real(E, P)
        tau = L.tau
        if mpmath.im(tau) < 0:
            tau = -tau
        zn = z / L.omega1
        q = mpmath.expjpi(2 * tau)
        u = mpmath.expjpi(2 * zn)
        t = mpmath.im(zn) / mpmath.im(tau)
        B2 = t * t - t + mpmath.mpf(1) / 6
        lam = -B2 / 2 * mpmath.log(abs(q)) - mpmath.log(abs(1 - u))
        eps = mpmath.mpf(10) ** (-dps - 5)
        qn = q
        while abs(qn) > eps:
            lam -= mpmath.log(abs((1 - qn * u) * (1 - qn / u)))
            qn *= q
    return +lam


def archimedean_lambda_tate(E: WeierstrassModel, P: Point, dps: int = DEFAULT_DPS):
    """Tate's series lambda = 1/2 log|x| + 1/8 sum 4^-n log|z(2^n P)|, z = 1 - b4'/x^2 - 2b6'/x^3 - b8'/x^4,
    after shifting x so every real point has x >= 1.  Normalized so lambda - log|x|/2 -> 0 at O.
    """
    with mpmath.workdps(dps + 20):
        b2, b4, b6, b8 = (_mp(v) for v in E.b_invariants)
        e_max = max(_real_roots(E))
        r = e_max - 1
        # b-invariants of the model shifted by x -> x + r
        B2 = b2 + 12 * r
        B4 = b4 + r * b2 + 6 * r * r
        B6 = b6 + 2 * r * b4 + r * r * b2 + 4 * r**3
        B8 = b8 + 3 * r * b6 + 3 * r * r * b4 + r**3 * b2 + 3 * r**4
        x = _mp(P.x) - r
        if x < 1 - mpmath.mpf(10) ** (-dps):
            raise NotImplementedError("point on the non-identity real component")
        lam = mpmath.log(x) / 2
        eps = mpmath.mpf(10) ** (-dps - 5)
        weight = mpmath.mpf(1) / 8
        while weight > eps:
            zx = 1 - B4 / x**2 - 2 * B6 / x**3 - B8 / x**4
            lam += weight * mpmath.log(abs(zx))
            x = (x**4 - B4 * x * x - 2 * B6 * x - B8) / (4 * x**3 + B2 * x * x + 2 * B4 * x + B6)
            weight /= 4
    return +lam


# --- non-archimedean ------------------------------------------------------

def non_archimedean_term(E: WeierstrassModel, P: Point, p: int) -> Fraction:
    """Coefficient r with the p-part of h^ - (1/6) log|Delta| - 2 lambda_oo equal to r log p."""
    x, y = Fraction(P.x), Fraction(P.y)
    a1, a2, a3, a4, _ = (Fraction(a) for a in E.a_invariants)
    b2, b4, b6, b8 = (Fraction(b) for b in E.b_invariants)
    disc = Fraction(E.discriminant)
    N = _ord(disc, p)
    A = _ord(3 * x * x + 2 * a2 * x + a4 - a1 * y, p)
    B = _ord(2 * y + a1 * x + a3, p)
    C = _ord(3 * x**4 + b2 * x**3 + 3 * b4 * x * x + 3 * b6 * x + b8, p)
    if A <= 0 or B <= 0:
        return Fraction(max(0, -_ord(x, p)))
    if _ord(Fraction(E.c_invariants[0]), p) == 0:
        n = min(Fraction(B), Fraction(N, 2))
        return -n * (N - n) / N
    if C >= 3 * B:
        return Fraction(-2 * B, 3)
    return Fraction(-C, 4)


def canonical_height(E: WeierstrassModel, P: Point, dps: int = DEFAULT_DPS,
                     method: str = "q"):
    """h^(P) for a rational point on a minimal integral model (BSD normalization).

    method="q" uses the q-product archimedean term, method="tate" Tate's series.
    Torsion points give exactly 0.
    """
    if P.is_zero or torsion_order(E, P) is not None:
        return 0.0
    check_minimal(E)
    with mpmath.workdps(dps + 10):
        disc = abs(int(Fraction(E.discriminant)))
        if method == "q":
            lam = archimedean_lambda_q(E, P, dps) + mpmath.log(disc) / 12
        elif method == "tate":
            lam = archimedean_lambda_tate(E, P, dps)
        else:
            raise ValueError(f"unknown method {method!r}")
        h = 2 * lam
        primes = set(factorize(disc)) | set(factorize(Fraction(P.x).denominator))
        for p in sorted(primes):
            r = non_archimedean_term(E, P, p)
            h += mpmath.mpf(r.numerator) / r.denominator * mpmath.log(p)
        return +h


def height_doubling_limit(E: WeierstrassModel, P: Point, k: int = 6) -> float:
    """h(x(2^k P)) / 4^k, a low-precision reference (error O(4^-k))."""
    Q = P
    for _ in range(k):
        Q = E.add(Q, Q)
        if Q.is_zero:
            return 0.0
    return naive_height(Q.x) / 4**k
