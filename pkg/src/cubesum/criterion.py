"""The finite-field criterion for primes p = 8 (mod 9).

D(x) = x^9 - 24x^6 + 3x^3 + 1 - 9(c - 1) x^2 (x^3 + 1)^2 with c the cube root
of 3 in F_p.  If D has no root in F_p then at least one of p, p^2 is a sum of two
rational cubes.  Every report also cross-checks the equivalent statement about
9-divisibility of the point c on y^2 + y = x^3 over F_p^2.
"""

from __future__ import annotations

import enum
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import poly
from .arith import Fp2Elt, cube_root_of_3, fp2_elements, primes_in_range, require_criterion_prime
from .curves import O, Point, WeierstrassModel, e1_min, mul_sqrt_minus3

DEFAULT_ORACLE_MAX = 200


class Verdict(str, enum.Enum):
    GUARANTEED_CUBE_SUM = "GuaranteedCubeSum"
    INCONCLUSIVE = "Inconclusive"


class EquivalenceViolation(AssertionError):
    """Two computations that must agree did not.  Carries a counterexample record."""

    def __init__(self, message: str, record: dict):
        super().__init__(message)
        self.record = record


def build_D(p: int) -> list[int]:
    """Coefficients of D(x) over F_p, lowest degree first (degree 9, monic)."""
    require_criterion_prime(p)
    k = (cube_root_of_3(p).value - 1) % p
    # x^2 (x^3 + 1)^2 = x^8 + 2x^5 + x^2
    coeffs = [0] * 10
    coeffs[9] = 1
    coeffs[6] = -24
    coeffs[3] = 3
    coeffs[0] = 1
    coeffs[8] -= 9 * k
    coeffs[5] -= 18 * k
    coeffs[2] -= 9 * k
    return [c % p for c in coeffs]


def d_has_root(p: int, oracle: bool = False) -> tuple[bool, list[int]]:
    """Whether D has a root in F_p, with the roots as witnesses.

    Uses gcd(D, x^p - x); with oracle=True the answer is also compared against
    exhaustive evaluation of D on F_p.
    """
    D = build_D(p)
    g = poly.frobenius_gcd(D, p)
    has = poly.degree(g) > 0
    witnesses = poly.roots(D, p) if has else []
    if oracle:
        brute = poly.roots_bruteforce(D, p)
        if bool(brute) != has or (has and sorted(brute) != sorted(witnesses)):
            raise EquivalenceViolation(
                f"root search disagrees at p={p}", {"p": p, "gcd_roots": witnesses, "brute": brute}
            )
    return has, witnesses


def d_root_count_fp2(p: int) -> int:
    return poly.count_roots(build_D(p), p, k=2)


# --- the point c on y^2 + y = x^3 over F_p^2 -------------------------------

def curve_fp2(p: int) -> WeierstrassModel:
    return e1_min(lambda a: Fp2Elt(a, 0, p))


def _fp2(x: int, p: int) -> Fp2Elt:
    return Fp2Elt(x, 0, p)


def point_a(p: int) -> Point:
    """a = (-1/cbrt3, (-3 - sqrt(-3))/6)."""
    c3 = _fp2(cube_root_of_3(p).value, p)
    s = Fp2Elt.sqrt_minus3(p)
    return Point(-1 / c3, (-3 - s) / 6)


def point_b(p: int) -> Point:
    """The primitive 3-torsion point (-1, w)."""
    return Point(_fp2(-1, p), Fp2Elt.omega(p))


def point_c_closed_form(p: int) -> Point:
    """c = (-(k^2 + 3k + 1)/4, (s k^2 + 3 s k + 5 s - 4)/8), k = cbrt3, s = sqrt(-3)."""
    k = _fp2(cube_root_of_3(p).value, p)
    s = Fp2Elt.sqrt_minus3(p)
    return Point(-(k * k + 3 * k + 1) / 4, (s * k * k + 3 * s * k + 5 * s - 4) / 8)


def point_P1(p: int) -> Point:
    """P1 = (cbrt3 - 1, 1 - cbrt3^2), an F_p-point with [sqrt(-3)]P1 = c."""
    k = cube_root_of_3(p).value
    return Point(_fp2(k - 1, p), _fp2(1 - k * k, p))


def point_c(p: int) -> Point:
    """c = a - b, computed by the group law and by the closed form; both must agree."""
    require_criterion_prime(p)
    E = curve_fp2(p)
    a, b = E.check(point_a(p)), E.check(point_b(p))
    via_group = E.sub(a, b)
    closed = E.check(point_c_closed_form(p))
    if via_group != closed:
        raise EquivalenceViolation(
            f"a - b differs from the closed form of c at p={p}",
            {"p": p, "a-b": repr(via_group), "closed": repr(closed)},
        )
    return via_group


def kernel_sqrt_minus3(p: int) -> list[Point]:
    return [O, Point(_fp2(0, p), _fp2(0, p)), Point(_fp2(0, p), _fp2(-1, p))]


def divisible_by(Q: Point, m: int, p: int) -> bool:
    """Whether Q = [m]d for some d in E(F_p^2) ~ (Z/(p+1))^2; needs m | p+1.

    In (Z/N)^2 the m-multiples are exactly the kernel of [N/m].
    """
    if (p + 1) % m:
        raise ValueError(f"{m} does not divide p+1={p + 1}")
    return curve_fp2(p).mul((p + 1) // m, Q).is_zero


def nine_divisibility(p: int) -> bool:
    """c is 9-divisible iff [(p+1)/9]c is O or +-(0, -1)."""
    require_criterion_prime(p)
    E = curve_fp2(p)
    T = E.mul((p + 1) // 9, point_c(p))
    return T.is_zero or (T.x == 0 and (T.y == -1 or T.y == 0))


def _c_divisible_by_3n_sqrt3_via_lift(p: int, n: int) -> bool:
    # c = [sqrt(-3)]P1, so c = [3^n sqrt(-3)]d iff some P1 + t (t in the kernel) is 3^n-divisible
    E = curve_fp2(p)
    P1 = point_P1(p)
    return any(divisible_by(E.add(P1, t), 3**n, p) for t in kernel_sqrt_minus3(p))


def divisibility_ladder(p: int, n: int) -> tuple[bool, bool]:
    """(c divisible by 3^n sqrt(-3), c divisible by 3^(n+1)); the two must agree."""
    require_criterion_prime(p)
    if (p + 1) % 3 ** (n + 1):
        raise ValueError(f"3^{n + 1} does not divide p+1")
    c = point_c(p)
    if mul_sqrt_minus3(point_P1(p)) != c:
        raise EquivalenceViolation(f"[sqrt(-3)]P1 != c at p={p}", {"p": p})
    return _c_divisible_by_3n_sqrt3_via_lift(p, n), divisible_by(c, 3 ** (n + 1), p)


# --- exhaustive oracles over the enumerated group ---------------------------

def enumerate_points(p: int) -> list[Point]:
    """Every point of y^2 + y = x^3 over F_p^2, O first."""
    by_value: dict[Fp2Elt, list[Fp2Elt]] = {}
    for y in fp2_elements(p):
        by_value.setdefault(y * y + y, []).append(y)
    pts = [O]
    for x in fp2_elements(p):
        for y in by_value.get(x * x * x, ()):
            pts.append(Point(x, y))
    return pts


class GroupOracle:
    """Images of [3^k] and [3^k sqrt(-3)] over all of E(F_p^2), built by brute force."""

    def __init__(self, p: int):
        self.p = p
        self.E = curve_fp2(p)
        self.points = enumerate_points(p)
        self._triple: dict[Point, Point] = {}
        self._images: dict[tuple[int, bool], frozenset] = {}

    def triple(self, P: Point) -> Point:
        T = self._triple.get(P)
        if T is None:
            T = self.E.mul(3, P)
            self._triple[P] = T
        return T

    def image(self, k: int, sqrt3: bool = False) -> frozenset:
        """{[3^k]d} or {[3^k sqrt(-3)]d} over every d."""
        key = (k, sqrt3)
        if key not in self._images:
            if k == 0:
                base = frozenset(self.points)
            else:
                base = frozenset(self.triple(P) for P in self.image(k - 1))
            if sqrt3:
                base = frozenset(mul_sqrt_minus3(P) for P in base)
            self._images[key] = base
        return self._images[key]

    def divisible(self, Q: Point, k: int, sqrt3: bool = False) -> bool:
        return Q in self.image(k, sqrt3)


def nine_divisibility_oracle(p: int, oracle: GroupOracle | None = None) -> bool:
    oracle = oracle or GroupOracle(p)
    return oracle.divisible(point_c(p), 2)


def divisibility_ladder_oracle(p: int, n: int, oracle: GroupOracle | None = None) -> tuple[bool, bool]:
    """The ladder pair decided by solving [3^n sqrt(-3)]d = c and [3^(n+1)]d = c directly."""
    oracle = oracle or GroupOracle(p)
    c = point_c(p)
    return oracle.divisible(c, n, sqrt3=True), oracle.divisible(c, n + 1)


# --- reports and scanning ----------------------------------------------------

@dataclass
class CriterionReport:
    p: int
    cube_root_of_3: int
    d_has_root: bool
    witnesses: list[int]
    c: tuple[tuple[int, int], tuple[int, int]]
    nine_divisible: bool
    verdict: Verdict
    fp2_root_count: int
    oracle_checked: bool
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self, with_timings: bool = True) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        if not with_timings:
            d.pop("timings")
        return d


def check_prime(p: int, oracle_max: int = DEFAULT_ORACLE_MAX) -> CriterionReport:
    """Decide the criterion for p and cross-validate every equivalence."""
    require_criterion_prime(p)
    timings = {}
    t0 = time.perf_counter()
    has, wit = d_has_root(p, oracle=p <= 10_000)
    timings["d_has_root"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    c = point_c(p)
    nine = nine_divisibility(p)
    timings["nine_divisibility"] = time.perf_counter() - t0
    nroots2 = d_root_count_fp2(p)
    record = {"p": p, "d_has_root": has, "nine_divisible": nine, "fp2_roots": nroots2}
    if has != nine:
        raise EquivalenceViolation(f"root/9-divisibility mismatch at p={p}", record)
    if nroots2 not in (0, 9):
        raise EquivalenceViolation(f"D has {nroots2} roots in F_p^2 at p={p}", record)
    if has != (nroots2 == 9):
        raise EquivalenceViolation(f"F_p and F_p^2 root existence differ at p={p}", record)
    oracle_checked = False
    if p <= oracle_max:
        t0 = time.perf_counter()
        brute = nine_divisibility_oracle(p)
        timings["oracle"] = time.perf_counter() - t0
        oracle_checked = True
        if brute != nine:
            raise EquivalenceViolation(f"exhaustive 9-divisibility oracle disagrees at p={p}", record)
    verdict = Verdict.INCONCLUSIVE if has else Verdict.GUARANTEED_CUBE_SUM
    return CriterionReport(
        p=p,
        cube_root_of_3=cube_root_of_3(p).value,
        d_has_root=has,
        witnesses=wit,
        c=((c.x.a, c.x.b), (c.y.a, c.y.b)),
        nine_divisible=nine,
        verdict=verdict,
        fp2_root_count=nroots2,
        oracle_checked=oracle_checked,
        timings=timings,
    )


@dataclass
class ScanSummary:
    lo: int
    hi: int
    counts: dict[str, int] = field(
        default_factory=lambda: {v.value: 0 for v in Verdict}
    )
    failures: list[dict] = field(default_factory=list)
    rows: list[tuple[int, bool, bool, str]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def with_root(self) -> int:
        return self.counts[Verdict.INCONCLUSIVE.value]

    @property
    def density_with_root(self) -> Fraction:
        return Fraction(self.with_root, self.total) if self.total else Fraction(0)

    def merge(self, other: "ScanSummary") -> "ScanSummary":
        out = ScanSummary(min(self.lo, other.lo), max(self.hi, other.hi))
        for k in out.counts:
            out.counts[k] = self.counts[k] + other.counts[k]
        out.failures = sorted(self.failures + other.failures, key=lambda r: r.get("p", 0))
        out.rows = sorted(self.rows + other.rows)
        return out

    def to_dict(self) -> dict:
        return {
            "range": [self.lo, self.hi],
            "counts": dict(self.counts),
            "total": self.total,
            "density_with_root": str(self.density_with_root),
            "density_with_root_float": float(self.density_with_root),
            "failures": self.failures,
        }


def _scan_chunk(args) -> ScanSummary:
    lo, hi, oracle_max = args
    summary = ScanSummary(lo, hi)
    for p in primes_in_range(lo, hi, 9, 8):
        try:
            rep = check_prime(p, oracle_max=oracle_max)
        except EquivalenceViolation as exc:
            summary.failures.append(dict(exc.record, error=str(exc)))
            continue
        summary.counts[rep.verdict.value] += 1
        summary.rows.append((p, rep.d_has_root, rep.nine_divisible, rep.verdict.value))
    return summary


def scan(lo: int, hi: int, workers: int = 1, oracle_max: int = DEFAULT_ORACLE_MAX,
         chunks: int | None = None) -> ScanSummary:
    """Run check_prime on every prime p = 8 (mod 9) in [lo, hi].

    Any equivalence violation is recorded in `failures`; callers treat a
    nonempty list as a hard error.
    """
    if hi < lo:
        return ScanSummary(lo, hi)
    n = chunks or max(1, workers * 4)
    step = max(1, (hi - lo + 1 + n - 1) // n)
    parts = [(a, min(a + step - 1, hi), oracle_max) for a in range(lo, hi + 1, step)]
    if workers <= 1:
        results = [_scan_chunk(x) for x in parts]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_chunk, parts))
    total = ScanSummary(lo, hi)
    for r in results:
        total = total.merge(r)
    total.lo, total.hi = lo, hi
    return total
