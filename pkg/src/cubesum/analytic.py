"""High-precision evaluation of eta, j and the modular parametrization at CM points,
reduced binary quadratic forms, singular moduli norms, and real periods.

Every evaluation takes a digit count and runs inside an mpmath workdps block, so
callers never see a changed global precision.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath

from .arith import require_criterion_prime
from .curves import WeierstrassModel, is_cube_free, minimal_model

DEFAULT_DPS = 50
GUARD_DIGITS = 10
J_SQRT_MINUS3 = 54000  # 2^4 3^3 5^3
SINGULAR_MODULUS_MODULUS = 2**4 * 3**5 * 5**3  # 486000


class PrecisionError(ArithmeticError):
    pass


def _in_upper_half_plane(tau) -> None:
    if mpmath.im(tau) <= 0:
        raise ValueError("tau must lie in the upper half plane")


# --- SL2(Z) reduction and the eta multiplier ------------------------------

def dedekind_sum(h: int, k: int) -> Fraction:
    """s(h, k) for k >= 1, gcd(h, k) = 1, via the reciprocity law."""
    if k < 1:
        raise ValueError("k must be positive")
    if gcd(h, k) != 1:
        raise ValueError("h and k must be coprime")
    sign = 1
    total = Fraction(0)
    h %= k
    # s(h,k) + s(k,h) = -1/4 + (h/k + k/h + 1/(hk))/12
    while h:
        total += sign * (Fraction(-1, 4) + Fraction(h * h + k * k + 1, 12 * h * k))
        h, k = k % h, h
        sign = -sign
    return total


def dedekind_sum_direct(h: int, k: int) -> Fraction:
    def saw(x: Fraction) -> Fraction:
        if x.denominator == 1:
            return Fraction(0)
        return x - math.floor(x) - Fraction(1, 2)

    return sum((saw(Fraction(i, k)) * saw(Fraction(h * i, k)) for i in range(1, k)), Fraction(0))


def reduce_tau(tau, max_steps: int = 10_000):
    """Return (tau', (a, b, c, d)) with tau' = (a tau + b)/(c tau + d) in the fundamental domain."""
    _in_upper_half_plane(tau)
    a, b, c, d = 1, 0, 0, 1
    z = mpmath.mpc(tau)
    for _ in range(max_steps):
        n = int(mpmath.nint(mpmath.re(z)))
        if n:
            z -= n
            a, b = a - n * c, b - n * d
        if abs(z) < 1 - mpmath.mpf(10) ** (-mpmath.mp.dps // 2):
            z = -1 / z
            a, b, c, d = -c, -d, a, b
        else:
            break
    else:
        raise PrecisionError("SL2(Z) reduction did not terminate")
    return z, (a, b, c, d)


def eta_multiplier(a: int, b: int, c: int, d: int):
    """epsilon(gamma) with eta(gamma tau) = epsilon * sqrt(-i (c tau + d)) * eta(tau), c > 0."""
    if c <= 0:
        raise ValueError("normalize to c > 0 first")
    phase = Fraction(a + d, 12 * c) - dedekind_sum(d, c)
    return mpmath.expjpi(mpmath.mpf(phase.numerator) / phase.denominator)


def _eta_series(tau):
    """eta(tau) = q^(1/24) sum (-1)^k q^(k(3k-1)/2), summed until the tail is below eps."""
    q = mpmath.expjpi(2 * tau)
    aq = abs(q)
    eps = mpmath.mpf(10) ** (-mpmath.mp.dps - 5)
    if aq >= 1:
        raise PrecisionError("|q| >= 1")
    total = mpmath.mpc(1)
    k = 1
    while True:
        e1, e2 = k * (3 * k - 1) // 2, k * (3 * k + 1) // 2
        if aq**e1 < eps * (1 - aq):
            break
        total += (-1) ** k * (q**e1 + q**e2)
        k += 1
    return mpmath.expjpi(tau / 12) * total


def eval_eta(tau, dps: int = DEFAULT_DPS):
    """Dedekind eta at tau, reducing to the fundamental domain with the Dedekind-sum multiplier."""
    with mpmath.workdps(dps + GUARD_DIGITS):
        tau = mpmath.mpc(tau)
        _in_upper_half_plane(tau)
        z, (a, b, c, d) = reduce_tau(tau)
        guard = GUARD_DIGITS + 2 * len(str(max(abs(c), abs(d), 1)))
        with mpmath.workdps(dps + guard):
            tau = mpmath.mpc(tau)
            z = (a * tau + b) / (c * tau + d)
            ez = _eta_series(z)
            if c < 0 or (c == 0 and d < 0):
                a, b, c, d = -a, -b, -c, -d
            if c == 0:
                # gamma = T^b
                val = ez * mpmath.expjpi(-mpmath.mpf(b) / 12)
            else:
                val = ez / (eta_multiplier(a, b, c, d) * mpmath.sqrt(-1j * (c * tau + d)))
        return +val


def eval_eta_stepwise(tau, dps: int = DEFAULT_DPS):
    """Reference eta: apply eta(tau + 1) and eta(-1/tau) one step at a time."""
    with mpmath.workdps(dps + GUARD_DIGITS + 10):
        z = mpmath.mpc(tau)
        _in_upper_half_plane(z)
        factor = mpmath.mpc(1)
        for _ in range(10_000):
            n = int(mpmath.nint(mpmath.re(z)))
            z -= n
            factor *= mpmath.expjpi(mpmath.mpf(n) / 12)
            if abs(z) < 1 - mpmath.mpf(10) ** (-mpmath.mp.dps // 2):
                factor /= mpmath.sqrt(-1j * z)
                z = -1 / z
            else:
                break
        return +(factor * _eta_series(z))


# --- j and the Hauptmodul -------------------------------------------------

def _E4_lambert(tau):
    q = mpmath.expjpi(2 * tau)
    aq = abs(q)
    eps = mpmath.mpf(10) ** (-mpmath.mp.dps - 5)
    acc = mpmath.mpc(0)
    qn = mpmath.mpc(1)
    n = 0
    while True:
        n += 1
        qn *= q
        if n**3 * aq**n < eps * (1 - aq) ** 2:
            break
        acc += n**3 * qn / (1 - qn)
    return 1 + 240 * acc


def eval_j(tau, dps: int = DEFAULT_DPS):
    """j(tau) = E4^3 / eta^24 at the reduced point."""
    with mpmath.workdps(dps + GUARD_DIGITS):
        z, _ = reduce_tau(mpmath.mpc(tau))
        val = _E4_lambert(z) ** 3 / _eta_series(z) ** 24
    return +val


def eval_j_eta_quotient(tau, dps: int = DEFAULT_DPS):
    """j = (1 + 256 t)^3 / t with t = (eta(2 tau)/eta(tau))^24, independent of E4."""
    with mpmath.workdps(dps + GUARD_DIGITS):
        z, _ = reduce_tau(mpmath.mpc(tau))
        t = (eval_eta(2 * z, dps + 5) / eval_eta(z, dps + 5)) ** 24
        val = (1 + 256 * t) ** 3 / t
    return +val


def eval_j_qexpansion(tau, terms: int = 80, dps: int = DEFAULT_DPS):
    """1/q + 744 + 196884 q + ... from the exact coefficients."""
    from .qseries import j_series

    with mpmath.workdps(dps + GUARD_DIGITS):
        z, _ = reduce_tau(mpmath.mpc(tau))
        val = j_series(terms).evaluate(z)
    return +val


def eval_f(tau, dps: int = DEFAULT_DPS):
    """f(tau) = eta(tau)^4 / eta(3 tau)^4."""
    with mpmath.workdps(dps + GUARD_DIGITS):
        tau = mpmath.mpc(tau)
        val = (eval_eta(tau, dps + 5) / eval_eta(3 * tau, dps + 5)) ** 4
    return +val


@dataclass(frozen=True)
class ParamPoint:
    x: mpmath.mpc
    y: mpmath.mpc
    residual: mpmath.mpf


def _x_series_estimate(tau, series):
    return series.evaluate(tau)


def eval_param(tau, dps: int = DEFAULT_DPS, start_im: float = 1.0) -> ParamPoint:
    """The point (x, y) on y^2 = x^3 + 144 attached to tau.

    y = -8 f(9 tau) - 12 comes from eta.  x is a cube root of y^2 - 144; the branch
    is the one with rational q-expansion, fixed by evaluating that expansion high on
    the vertical line through tau and continuing the root down to tau.
    """
    from .qseries import param_series

    with mpmath.workdps(dps + GUARD_DIGITS):
        tau = mpmath.mpc(tau)
        _in_upper_half_plane(tau)
        xs, _ = param_series(60)

        def cube(t):
            y = -8 * eval_f(9 * t, dps) - 12
            return y, y * y - 144

        top = mpmath.mpc(mpmath.re(tau), max(mpmath.im(tau), start_im))
        x_prev = _x_series_estimate(top, xs)
        y, target = cube(top)
        x_prev = _nearest_cube_root(target, x_prev)
        t_prev = top
        step = (mpmath.im(top) - mpmath.im(tau)) / 8
        while mpmath.im(t_prev) > mpmath.im(tau):
            t_next = mpmath.mpc(mpmath.re(tau), max(mpmath.im(tau), mpmath.im(t_prev) - step))
            y_next, target = cube(t_next)
            roots = _cube_roots(target)
            roots.sort(key=lambda r: abs(r - x_prev))
            if len(roots) > 1 and abs(roots[0] - x_prev) * 4 > abs(roots[1] - x_prev):
                step /= 2
                if step < mpmath.mpf(10) ** -12:
                    raise PrecisionError("branch continuation stalled near a zero of x")
                continue
            x_prev, y, t_prev = roots[0], y_next, t_next
        x = x_prev
        resid = abs(y * y - x**3 - 144)
        tol = mpmath.mpf(10) ** (-(dps // 2)) * max(1, abs(y) ** 2)
        if resid > tol:
            raise PrecisionError(f"curve residual {mpmath.nstr(resid, 5)} too large")
    return ParamPoint(+x, +y, +resid)


def _cube_roots(z) -> list:
    if z == 0:
        return [mpmath.mpc(0)]
    r = mpmath.cbrt(z) if mpmath.im(z) == 0 and mpmath.re(z) > 0 else mpmath.exp(mpmath.log(z) / 3)
    w = mpmath.expjpi(mpmath.mpf(2) / 3)
    return [r, r * w, r * w * w]


def _nearest_cube_root(z, guess):
    return min(_cube_roots(z), key=lambda r: abs(r - guess))


def cm_point_tau():
    """omega / (9 (2 omega + 1)) with omega = exp(2 pi i / 3)."""
    w = mpmath.expjpi(mpmath.mpf(2) / 3)
    return w / (9 * (2 * w + 1))


def cm_targets():
    """The closed forms (4 sqrt(-3) cbrt(3) w^2, 24 w - 12)."""
    w = mpmath.expjpi(mpmath.mpf(2) / 3)
    s = 2 * w + 1
    return 4 * s * mpmath.cbrt(3) * w**2, 24 * w - 12


@dataclass
class CMReport:
    psi_x_error: float
    psi_y_error: float
    f_value: tuple[str, str]
    f_error_w2: float
    f_error_w: float
    tolerance: float
    dps: int

    @property
    def psi_ok(self) -> bool:
        return self.psi_x_error < self.tolerance and self.psi_y_error < self.tolerance

    @property
    def f_ok(self) -> bool:
        """f(w/(2w+1)) = -3 w^2, the value the criterion asks for."""
        return self.f_error_w2 < self.tolerance

    @property
    def ok(self) -> bool:
        return self.psi_ok and self.f_ok

    def to_dict(self) -> dict:
        return {
            "psi_x_error": self.psi_x_error,
            "psi_y_error": self.psi_y_error,
            "psi_pass": self.psi_ok,
            "f_value": list(self.f_value),
            "f_error_vs_-3w^2": self.f_error_w2,
            "f_error_vs_-3w": self.f_error_w,
            "f_pass": self.f_ok,
            "tolerance": self.tolerance,
            "digits": self.dps,
            "pass": self.ok,
        }


def cm_verify(dps: int = DEFAULT_DPS, tol: float = 1e-10) -> CMReport:
    """psi at w/(9(2w+1)) against its closed form, and f at w/(2w+1) against -3w^2 and -3w."""
    with mpmath.workdps(dps):
        P = eval_param(cm_point_tau(), dps)
        tx, ty = cm_targets()
        w = mpmath.expjpi(mpmath.mpf(2) / 3)
        f = eval_f(w / (2 * w + 1), dps)
        return CMReport(
            psi_x_error=float(abs(P.x - tx)),
            psi_y_error=float(abs(P.y - ty)),
            f_value=(mpmath.nstr(mpmath.re(f), 20), mpmath.nstr(mpmath.im(f), 20)),
            f_error_w2=float(abs(f + 3 * w * w)),
            f_error_w=float(abs(f + 3 * w)),
            tolerance=tol,
            dps=dps,
        )


# --- reduced forms and singular moduli ------------------------------------

@dataclass(frozen=True, order=True)
class ReducedForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def root(self):
        """tau = (-b + sqrt(D)) / (2a) in the upper half plane."""
        D = self.discriminant
        return (-self.b + mpmath.sqrt(D)) / (2 * self.a)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c}


def reduced_forms(D: int) -> list[ReducedForm]:
    """Primitive reduced forms of discriminant D < 0, sorted."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, abs(b)), c) != 1:
                continue
            out.append(ReducedForm(a, b, c))
        a += 1
    return sorted(out)


def class_number(D: int) -> int:
    return len(reduced_forms(D))


def singular_moduli_dps(p: int) -> int:
    """Digits for the norm: |j(tau)| ~ exp(pi sqrt|D| / a), summed over the forms, plus 40 guard."""
    D = 3 * p * p
    size = sum(math.pi * math.sqrt(D) / (f.a * math.log(10)) for f in reduced_forms(-D))
    return int(size) + 40


def _j_of_form(args):
    form, dps = args
    with mpmath.workdps(dps):
        return eval_j(form.root(), dps)


@dataclass
class NormTestResult:
    p: int
    class_number: int
    N: int
    margin: float
    imag_residual: float
    divisible: bool
    dps: int

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "class_number": self.class_number,
            "N": str(self.N),
            "rounding_margin": self.margin,
            "imag_residual": self.imag_residual,
            "modulus": str(SINGULAR_MODULUS_MODULUS),
            "divisible": self.divisible,
            "digits": self.dps,
        }


def singular_moduli_norm_test(p: int, dps: int | None = None, workers: int = 1,
                              retries: int = 3, min_gap: float = 1e-5) -> NormTestResult:
    """N = prod over forms of discriminant -3p^2 of (j(tau_i) - 54000); test 486000^h | N."""
    require_criterion_prime(p)
    forms = reduced_forms(-3 * p * p)
    h = len(forms)
    dps = dps or singular_moduli_dps(p)
    for _ in range(retries + 1):
        args = [(f, dps) for f in forms]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                js = list(pool.map(_j_of_form, args))
        else:
            js = [_j_of_form(a) for a in args]
        with mpmath.workdps(dps):
            prod = mpmath.mpc(1)
            for j in js:
                prod *= j - J_SQRT_MINUS3
            re, im = mpmath.re(prod), mpmath.im(prod)
            N = int(mpmath.nint(re))
            err = abs(re - N)
            scale = max(1, abs(re))
            imag_rel = float(abs(im) / scale)
            if err < min_gap and abs(im) < min_gap:
                margin = float(mpmath.mpf("0.5") - err)
                return NormTestResult(p, h, N, margin, imag_rel,
                                      N % SINGULAR_MODULUS_MODULUS**h == 0, dps)
        dps *= 2
    raise PrecisionError(f"could not round the norm for p={p} to an integer")


# --- periods ---------------------------------------------------------------

def _b246(E: WeierstrassModel):
    return tuple(mpmath.mpf(Fraction(v).numerator) / Fraction(v).denominator
                 for v in E.b_invariants[:3])


@dataclass(frozen=True)
class PeriodLattice:
    omega1: mpmath.mpf
    omega2: mpmath.mpc

    @property
    def tau(self):
        return self.omega2 / self.omega1


def period_lattice(E: WeierstrassModel, dps: int = DEFAULT_DPS) -> PeriodLattice:
    """Basis (w1, w2) with w1 the least positive real period, after Cohen's AGM algorithm."""
    with mpmath.workdps(dps + GUARD_DIGITS):
        b2, b4, b6 = _b246(E)
        disc = Fraction(E.discriminant)
        roots = mpmath.polyroots([4, b2, 2 * b4, b6], maxsteps=200, extraprec=2 * dps)
        if disc < 0:
            e1 = max((r for r in roots), key=lambda r: -abs(mpmath.im(r)))
            e1 = mpmath.re(e1)
            a = 3 * e1 + b2 / 4
            b = mpmath.sqrt(3 * e1 * e1 + b2 / 2 * e1 + b4 / 2)
            w1 = 2 * mpmath.pi / mpmath.agm(2 * mpmath.sqrt(b), mpmath.sqrt(2 * b + a))
            w2 = -w1 / 2 + 1j * mpmath.pi / mpmath.agm(2 * mpmath.sqrt(b), mpmath.sqrt(2 * b - a))
        else:
            e3, e2, e1 = sorted(mpmath.re(r) for r in roots)
            w1 = mpmath.pi / mpmath.agm(mpmath.sqrt(e1 - e3), mpmath.sqrt(e1 - e2))
            w2 = 1j * mpmath.pi / mpmath.agm(mpmath.sqrt(e1 - e3), mpmath.sqrt(e2 - e3))
        return PeriodLattice(+w1, +w2)


def real_period(E: WeierstrassModel, dps: int = DEFAULT_DPS):
    """Least positive real period of the invariant differential dx/(2y + a1 x + a3)."""
    return period_lattice(E, dps).omega1


def real_period_bsd(E: WeierstrassModel, dps: int = DEFAULT_DPS):
    """Integral of |dx/(2y + a1 x + a3)| over E(R): twice the least period if E(R) has two components."""
    w1 = real_period(E, dps)
    return 2 * w1 if Fraction(E.discriminant) > 0 else w1


def real_period_integral(E: WeierstrassModel, dps: int = 20):
    """Reference value 2 * int_{e1}^oo dx / sqrt(4x^3 + b2 x^2 + 2 b4 x + b6), for one real root.

    Evaluated as a Carlson symmetric integral, which handles the endpoint singularity exactly.
    """
    with mpmath.workdps(dps + GUARD_DIGITS):
        b2, b4, b6 = _b246(E)
        if Fraction(E.discriminant) > 0:
            raise ValueError("the integral reference covers one real root only")
        roots = mpmath.polyroots([4, b2, 2 * b4, b6], maxsteps=200, extraprec=2 * dps)
        real = [r for r in roots if abs(mpmath.im(r)) < mpmath.mpf(10) ** (-dps)]
        e1 = mpmath.re(real[0])
        z = [r for r in roots if r is not real[0]][0]
        # 4(x - e1)(x - z)(x - zbar), substitute x = e1 + t: int_0^oo dt / (2 sqrt(t (t - u)(t - ubar)))
        u = z - e1
        # int_0^oo dt / sqrt(t (t + x)(t + y)) = 2 R_F(0, x, y) with x = -u, y = -ubar
        rf = mpmath.elliprf(0, -u, -mpmath.conj(u))
        return +mpmath.re(2 * rf)


def real_period_quadrature(E: WeierstrassModel, dps: int = 15):
    """Plain numerical quadrature of the same integral, substituting x = e1 + s^2."""
    with mpmath.workdps(dps + GUARD_DIGITS):
        b2, b4, b6 = _b246(E)
        roots = mpmath.polyroots([4, b2, 2 * b4, b6], maxsteps=200, extraprec=2 * dps)
        e1 = max(mpmath.re(r) for r in roots if abs(mpmath.im(r)) < 1e-10)

        def g(s):
            x = e1 + s * s
            return 4 * s / mpmath.sqrt(4 * x**3 + b2 * x * x + 2 * b4 * x + b6)

        return +mpmath.quad(g, [0, 1, mpmath.inf])


def lattice_invariants(L: PeriodLattice, dps: int = DEFAULT_DPS):
    """(g2, g3) of the lattice, from E4 and E6 at tau = w2/w1."""
    with mpmath.workdps(dps + GUARD_DIGITS):
        tau = L.tau
        if mpmath.im(tau) < 0:
            tau = -tau
        q = mpmath.expjpi(2 * tau)
        e4 = 1 + 240 * mpmath.nsum(lambda n: n**3 * q**n / (1 - q**n), [1, mpmath.inf])
        e6 = 1 - 504 * mpmath.nsum(lambda n: n**5 * q**n / (1 - q**n), [1, mpmath.inf])
        k = 2 * mpmath.pi / L.omega1
        g2 = k**4 * e4 / 12
        g3 = k**6 * e6 / 216
    return +g2, +g3


def curve_g2_g3(E: WeierstrassModel) -> tuple[Fraction, Fraction]:
    c4, c6 = E.c_invariants
    return Fraction(c4) / 12, Fraction(c6) / 216


def omega_n(n: int, dps: int = DEFAULT_DPS):
    """Omega^n: the real period of the minimal model of y^2 = x^3 + 16 n^2."""
    if not is_cube_free(n):
        raise ValueError(f"{n} is not cube-free")
    return real_period_bsd(minimal_model(n), dps)


@dataclass
class PeriodRelation:
    p: int
    residual_p: float
    residual_p2: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.residual_p < self.tolerance and self.residual_p2 < self.tolerance

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "relative_residual_p": self.residual_p,
            "relative_residual_p2": self.residual_p2,
            "tolerance": self.tolerance,
            "pass": self.ok,
        }


def verify_period_relation(p: int, tol: float = 1e-8, dps: int = 30) -> PeriodRelation:
    """|p W^p W^(9p^2) - (W^3)^2| and |p W^(p^2) W^(9p) - (W^3)^2|, relative to (W^3)^2."""
    require_criterion_prime(p)
    for n in (p, p * p, 9 * p, 9 * p * p, 3):
        if not is_cube_free(n):
            raise ValueError(f"{n} is not cube-free")
    with mpmath.workdps(dps):
        w = {n: omega_n(n, dps) for n in (p, p * p, 9 * p, 9 * p * p, 3)}
        ref = w[3] ** 2
        r1 = abs(p * w[p] * w[9 * p * p] - ref) / ref
        r2 = abs(p * w[p * p] * w[9 * p] - ref) / ref
    return PeriodRelation(p, float(r1), float(r2), tol)

