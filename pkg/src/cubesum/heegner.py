"""The Heegner point for p = 17 and the Gross-Zagier consistency check.

Exact work happens on E^1: y^2 = x^3 + 16 over Q(w)(t), t^3 = 17, where the point
z (already traced down from the ring class field) has rational-looking coordinates.
The isomorphism (x, y) -> (x / cbrt(9), y / 3) from E^3 to E^1 is defined over
Q(cbrt 3) and preserves absolute heights.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath

from .analytic import eval_param, omega_n
from .curves import O, Point, WeierstrassModel
from .heights import (
    canonical_height,
    height_doubling_limit,
    minimal_model_x3,
    torsion_order,
    transform_point,
)
from .lfunctions import l_value
from .tower import QOmega, TowerNumber

P17 = 17
GZ_BAND = (0.9, 1.1)
SECOND_FORMULA_TOL = 1e-3

E1 = WeierstrassModel(0, 0, 0, 0, 16, label="E^1")
E3_MIN = WeierstrassModel(0, 0, 1, 0, 2, label="E^3_min")

_W = QOmega.omega()
_S = QOmega.sqrt_minus3()


def _t(c0=0, c1=0, c2=0) -> TowerNumber:
    return TowerNumber(c0, c1, c2, m=P17)


# --- displayed data -------------------------------------------------------

def displayed_p_tau0(ctx, sqrt17_sign: int = 1):
    """x(P_tau0), y(P_tau0) on E^3_min as printed, under real cube roots and w = exp(2 pi i/3).

    sqrt17_sign = -1 gives the conjugate over K(cbrt 17, cbrt 3).
    """
    F = ctx.mpf
    w = ctx.expjpi(F(2) / 3)
    s3 = 2 * w + 1
    t = ctx.cbrt(17)
    r = sqrt17_sign * ctx.sqrt(17)
    x = (
        ((F(209) / 204 * s3 + F(145) / 68) * r + F(17) / 4 * s3 + F(35) / 4) * t**2
        + ((F(8) / 3 * s3 + F(11) / 2) * r + 11 * s3 + F(45) / 2) * t
        + (F(41) / 6 * s3 + 14) * r + 28 * s3 + F(117) / 2
    ) * ctx.cbrt(9)
    w2 = w * w
    y = (
        (F(6045) / 34 * w2 * r + F(1467) / 2 * w2) * t**2
        + (F(915) / 2 * w2 * r + F(3771) / 2 * w2) * t
        + 1176 * w2 * r + 4848 * w2 - 2
    )
    return x, y


def displayed_trace_summands(ctx):
    """The two summands of the degree-2 trace of P_tau0, on E^3_min."""
    F = ctx.mpf
    w = ctx.expjpi(F(2) / 3)
    s3 = 2 * w + 1
    c9 = ctx.cbrt(9)
    a = Point(-F(7) / 17 * ctx.cbrt(17) * c9, -F(57) / 34 * s3 - F(1) / 2)
    b = Point(-w * w * c9, F(3) / 2 * s3 - F(1) / 2)
    return a, b


def z_summands_on_e3() -> tuple[tuple[TowerNumber, TowerNumber], ...]:
    """The summands of z on E^3 as (x / cbrt 9, y): the x-coordinates carry a cbrt(9) factor."""
    return (
        (_t(0, Fraction(-28, 17)), _t(_S * Fraction(-228, 17))),
        (_t(_W * _W * -4), _t(_S * 12)),
    )


def phi_z_summands() -> tuple[Point, Point]:
    """phi(z) summands on E^1 over Q(w, cbrt 17)."""
    return (
        Point(_t(0, Fraction(-28, 17)), _t(_S * Fraction(-76, 17))),
        Point(_t(_W * _W * -4), _t(_S * 4)),
    )


# --- Galois action --------------------------------------------------------

def sigma(P: Point, k: int = 1) -> Point:
    """t -> w^k t applied to the coordinates."""
    return P if P.is_zero else Point(P.x.sigma(k), P.y.sigma(k))


def omega_mult(P: Point, k: int = 1) -> Point:
    """[w^k](x, y) = (w^k x, y)."""
    return P if P.is_zero else Point(P.x * (_W**k), P.y)


def eigen_projections(E: WeierstrassModel, z: Point) -> tuple[Point, Point]:
    """z1 = z + [w^2] z^s + [w] z^(s^2) and z2 = z + [w] z^s + [w^2] z^(s^2)."""
    zs, zss = sigma(z, 1), sigma(z, 2)
    z1 = E.add(E.add(z, omega_mult(zs, 2)), omega_mult(zss, 1))
    z2 = E.add(E.add(z, omega_mult(zs, 1)), omega_mult(zss, 2))
    return z1, z2


def twist_z1(z1: Point) -> tuple[int, Point]:
    """Rational point attached to z1 = (a t, c sqrt(-3)).

    (a t, c sqrt-3) -> (17 a, 17 c sqrt-3) lands on E^17 over K, and
    (X, Y sqrt-3) -> (-3 X, 9 Y) is a K-isomorphism onto y^2 = x^3 - 27 * 16 * 17^2.
    """
    x, y = z1.x, z1.y
    c0, c1, c2 = x.c
    if c0 or c2 or c1.b or any(y.c[1:]):
        raise ValueError("z1 is not of the form (a t, c sqrt(-3))")
    yq = y.c[0]
    # c * (1 + 2w)
    c = yq.a
    if yq.b != 2 * c:
        raise ValueError("y(z1) is not a rational multiple of sqrt(-3)")
    a = c1.a
    k = -27 * 16 * P17**2
    return k, Point(-3 * P17 * a, 9 * P17 * c)


def _tower_point_str(P: Point) -> dict:
    if P.is_zero:
        return {"point": "O"}
    return {"x": repr(P.x), "y": repr(P.y)}


# --- the example ----------------------------------------------------------

@dataclass
class Example17:
    embedding: dict
    numeric_match: float
    embeddings_on_curve: int
    trace_residual: float
    phi_z_on_curve: bool
    z_matches_phi_z: bool
    z1: dict
    z2: dict
    z_trace_zero: bool
    z1_eigen: bool
    z2_eigen: bool
    sum_is_3z: bool
    z2_torsion_order: int | None
    cube_sum_anchor: bool
    twisted_curve: str
    twisted_point: tuple[str, str]
    timings: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return (
            self.numeric_match < 1e-8
            and self.trace_residual < 1e-8
            and self.phi_z_on_curve
            and self.z_matches_phi_z
            and self.z1_eigen
            and self.z2_eigen
            and self.sum_is_3z
            and self.cube_sum_anchor
        )

    def to_dict(self, with_timings: bool = False) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        if not with_timings:
            d.pop("timings")
        return d


def _embedding_search(ctx, xm, ym):
    """Which sign of sqrt 17 and branch of the conjugation reproduces the numeric point."""
    best, hits = None, 0
    for sgn, conj in itertools.product((1, -1), (False, True)):
        x, y = displayed_p_tau0(ctx, sgn)
        if conj:
            x, y = ctx.conj(x), ctx.conj(y)
        if abs(y * y + y - x**3 - 2) < ctx.mpf(10) ** (-20):
            hits += 1
        d = abs(x - xm) + abs(y - ym)
        if best is None or d < best[0]:
            best = (d, sgn, conj)
    return best, hits


def heegner_example_17(dps: int = 40) -> Example17:
    """Numeric CM evaluation and exact tower arithmetic for the p = 17 Heegner point."""
    timings = {}
    t0 = time.perf_counter()
    with mpmath.workdps(dps):
        ctx = mpmath.mp
        w = ctx.expjpi(ctx.mpf(2) / 3)
        tau0 = 17 * w / (9 * (2 * w + 1))
        P = eval_param(tau0, dps)
        # E^3 -> E^3_min: (x, y) -> (x / 4, (y - 4) / 8)
        xm, ym = P.x / 4, (P.y - 4) / 8
        (dist, sgn, conj), hits = _embedding_search(ctx, xm, ym)

        # trace from H_17 down to K(cbrt 17): add the sqrt(17) conjugate
        Emc = WeierstrassModel(0, 0, 1, 0, 2)
        p_plus = Point(*displayed_p_tau0(ctx, 1))
        p_minus = Point(*displayed_p_tau0(ctx, -1))
        tr = Emc.add(p_plus, p_minus)
        a, b = displayed_trace_summands(ctx)
        ab = Emc.add(a, b)
        trace_res = float(abs(tr.x - ab.x) + abs(tr.y - ab.y))
    timings["numeric"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    A, B = phi_z_summands()
    on_curve = E1.contains(A) and E1.contains(B)
    # z on E^3 is (cbrt 9 * X, 3 Y) for (X, Y) = phi(z); compare summand by summand
    z_match = all(
        zx == Pp.x and zy == 3 * Pp.y for (zx, zy), Pp in zip(z_summands_on_e3(), (A, B))
    )
    z = E1.add(A, B)
    zt = E1.add(E1.add(z, sigma(z, 1)), sigma(z, 2))
    z1, z2 = eigen_projections(E1, z)
    z1_eigen = sigma(z1) == omega_mult(z1, 1)
    z2_eigen = sigma(z2) == omega_mult(z2, 2)
    sum3 = E1.add(z1, z2) == E1.mul(3, z)
    z2_order = torsion_order(E1, z2)
    k, Pt = twist_z1(z1)
    timings["exact"] = time.perf_counter() - t0

    return Example17(
        embedding={"sqrt17_sign": sgn, "complex_conjugate": conj, "cube_roots": "real", "omega": "exp(2 pi i/3)"},
        numeric_match=float(dist),
        embeddings_on_curve=hits,
        trace_residual=trace_res,
        phi_z_on_curve=on_curve,
        z_matches_phi_z=z_match,
        z1=_tower_point_str(z1),
        z2=_tower_point_str(z2),
        z_trace_zero=zt.is_zero,
        z1_eigen=z1_eigen,
        z2_eigen=z2_eigen,
        sum_is_3z=sum3,
        z2_torsion_order=z2_order,
        cube_sum_anchor=17 * 7**3 == 18**3 + (-1) ** 3,
        twisted_curve=f"y^2 = x^3 {k:+d}",
        twisted_point=(str(Pt.x), str(Pt.y)),
        timings=timings,
    )


# --- Gross-Zagier ---------------------------------------------------------

@dataclass
class GZReport:
    p: int
    lhs: float
    height_z1: float
    height_z1_tate: float
    height_z1_doubling: float
    rhs: float
    ratio: float
    band: tuple[float, float]
    in_band: bool
    second_lhs: float
    second_rhs: float
    second_ok: bool
    L_prime_p: float
    L_9p2: float
    L_9p: float
    omega_p: float
    omega_9p2: float
    notes: list[str] = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def to_dict(self, with_timings: bool = False) -> dict:
        d = asdict(self)
        d["band"] = list(self.band)
        if not with_timings:
            d.pop("timings")
        return d


def gz_check(p: int = P17, dps: int = 30, workers: int = 1) -> GZReport:
    """Both sides of L'(1,E^p) L(1,E^{9p^2}) / (Omega^p Omega^{9p^2}) = 3 h(z1), and of the z2 formula."""
    if p != P17:
        raise NotImplementedError("the Heegner point is only reconstructed for p = 17")
    timings = {}
    t0 = time.perf_counter()
    A, B = phi_z_summands()
    z1, z2 = eigen_projections(E1, E1.add(A, B))
    k, Pt = twist_z1(z1)
    Emin, urst = minimal_model_x3(k)
    Q = transform_point(Pt, urst)
    h = float(canonical_height(Emin, Q, dps, "q"))
    h_tate = float(canonical_height(Emin, Q, dps, "tate"))
    h_dbl = height_doubling_limit(Emin, Q, 6)
    timings["heights"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    rp = l_value(p, order=1, workers=workers)
    r9p2 = l_value(9 * p * p, workers=workers)
    r9p = l_value(9 * p, workers=workers)
    timings["lvalues"] = time.perf_counter() - t0
    with mpmath.workdps(dps):
        om_p = float(omega_n(p, dps))
        om_9p2 = float(omega_n(9 * p * p, dps))
        om_p2 = float(omega_n(p * p, dps))
        om_9p = float(omega_n(9 * p, dps))
    lhs = rp.derivative * r9p2.value / (om_p * om_9p2)
    rhs = 3 * h
    ratio = lhs / rhs

    # second formula: sign of E^{p^2} decides which L-term is the leading one
    rp2 = l_value(p * p, order=1, workers=workers)
    lead = rp2.derivative if rp2.sign == -1 else rp2.value
    second_lhs = lead * r9p.value / (om_p2 * om_9p)
    h2 = 0.0 if z2.is_zero or torsion_order(E1, z2) is not None else float("nan")
    second_rhs = 3 * h2
    second_ok = abs(second_lhs) < SECOND_FORMULA_TOL and abs(second_rhs) < SECOND_FORMULA_TOL

    notes = [
        "h(z1) is the absolute Neron-Tate height (BSD normalization) of z1 = z + [w^2]z^s + [w]z^(s^2), "
        "computed on the minimal model of its rational twist",
        f"lhs / h(z1) = {lhs / h:.12f}",
    ]
    in_band = GZ_BAND[0] <= ratio <= GZ_BAND[1]
    if not in_band:
        notes.append("ratio outside the band: normalization of h(z1) is an open question, not a pass")
    return GZReport(
        p=p, lhs=lhs, height_z1=h, height_z1_tate=h_tate, height_z1_doubling=h_dbl, rhs=rhs,
        ratio=ratio, band=GZ_BAND, in_band=in_band,
        second_lhs=second_lhs, second_rhs=second_rhs, second_ok=second_ok,
        L_prime_p=rp.derivative, L_9p2=r9p2.value, L_9p=r9p.value,
        omega_p=om_p, omega_9p2=om_9p2, notes=notes, timings=timings,
    )
