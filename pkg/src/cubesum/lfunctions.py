"""L-series of the curves y^2 = x^3 + 16 n^2: Frobenius traces, central values,
first derivatives, root numbers, and the case analysis deciding which of p, p^2
carries the Heegner point.
"""

from __future__ import annotations

import csv
import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import mpmath
import numpy as np

from .arith import is_prime, primes_in_range, require_criterion_prime
from .curves import WeierstrassModel, conductor, local_data, minimal_model

NAIVE_COUNT_CAP = 200_000
ZERO_THRESHOLD = 1e-3


# --- Frobenius traces -----------------------------------------------------

def _quadratic_character_table(ell: int) -> np.ndarray:
    chi = -np.ones(ell, dtype=np.int64)
    sq = (np.arange(1, ell, dtype=np.int64) ** 2) % ell
    chi[sq] = 1
    chi[0] = 0
    return chi


def count_points(E: WeierstrassModel, ell: int) -> int:
    """#E(F_ell) including the point at infinity, for an ell-integral model."""
    a1, a2, a3, a4, a6 = (int(a) % ell if int(a) == a else _red(a, ell) for a in E.a_invariants)
    if ell == 2:
        n = 1
        for x in range(2):
            for y in range(2):
                if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % 2 == 0:
                    n += 1
        return n
    # (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    b2 = (a1 * a1 + 4 * a2) % ell
    b4 = (2 * a4 + a1 * a3) % ell
    b6 = (a3 * a3 + 4 * a6) % ell
    x = np.arange(ell, dtype=np.int64)
    rhs = (((4 * x + b2) % ell * x + 2 * b4) % ell * x + b6) % ell
    chi = _quadratic_character_table(ell)
    return int(ell + 1 + chi[rhs].sum())


def _red(a, ell: int) -> int:
    from fractions import Fraction

    a = Fraction(a)
    return a.numerator * pow(a.denominator, -1, ell) % ell


def a_ell(n: int, ell: int) -> int:
    """Trace of Frobenius of E^n at ell; bad primes use the reduction-type convention."""
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    if ell > NAIVE_COUNT_CAP:
        raise ValueError(f"ell={ell} exceeds the point-counting cap")
    E = minimal_model(n)
    bad = local_data(E)
    if ell in bad:
        return bad[ell].local_a
    a = ell + 1 - count_points(E, ell)
    if a * a > 4 * ell:
        raise ArithmeticError(f"Hasse bound violated at ell={ell}")
    return a


class ALCache:
    """CSV cache of Frobenius traces keyed by (n, ell)."""

    def __init__(self, path):
        self.path = Path(path)
        self.values: dict[tuple[int, int], int] = {}
        if self.path.exists():
            with open(self.path, newline="") as fh:
                for row in csv.DictReader(fh):
                    self.values[int(row["n"]), int(row["ell"])] = int(row["a"])
        self._new: list[tuple[int, int, int]] = []

    def get(self, n: int, ell: int) -> int | None:
        return self.values.get((n, ell))

    def put(self, n: int, ell: int, a: int) -> None:
        if (n, ell) not in self.values:
            self.values[n, ell] = a
            self._new.append((n, ell, a))

    def flush(self) -> None:
        if not self._new:
            return
        fresh = not self.path.exists()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", newline="") as fh:
            w = csv.writer(fh)
            if fresh:
                w.writerow(["n", "ell", "a"])
            w.writerows(sorted(self._new))
        self._new.clear()


def _a_ell_chunk(args):
    n, ells = args
    E = minimal_model(n)
    return [(ell, ell + 1 - count_points(E, ell)) for ell in ells]


def a_ell_table(n: int, bound: int, workers: int = 1, cache: ALCache | None = None) -> dict[int, int]:
    """a_ell for every prime ell <= bound.

    Good primes ell = 2 (mod 3) are supersingular for these CM curves and get 0
    without counting; the rest are counted (in parallel when workers > 1).
    """
    E = minimal_model(n)
    bad = local_data(E)
    out: dict[int, int] = {}
    todo = []
    for ell in primes_in_range(2, bound):
        if ell in bad:
            out[ell] = bad[ell].local_a
        elif ell % 3 == 2:
            out[ell] = 0
        elif cache is not None and cache.get(n, ell) is not None:
            out[ell] = cache.get(n, ell)
        else:
            todo.append(ell)
    if todo:
        chunks = [(n, todo[i::max(1, workers)]) for i in range(max(1, workers))]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_a_ell_chunk, chunks))
        else:
            results = [_a_ell_chunk(c) for c in chunks]
        for part in results:
            for ell, a in part:
                out[ell] = a
                if cache is not None:
                    cache.put(n, ell, a)
        if cache is not None:
            cache.flush()
    return dict(sorted(out.items()))


def an_coefficients(n: int, M: int, workers: int = 1, cache: ALCache | None = None,
                    bad: dict | None = None) -> np.ndarray:
    """a_1..a_M (index 0 unused) from the prime traces by multiplicativity and the Hecke recursion."""
    ap = a_ell_table(n, M, workers, cache)
    bad = bad if bad is not None else local_data(minimal_model(n))
    an = np.zeros(M + 1, dtype=np.float64)
    an[1] = 1
    # smallest prime factor sieve
    spf = np.zeros(M + 1, dtype=np.int64)
    for ell in ap:
        sl = spf[ell::ell]
        sl[sl == 0] = ell
    for m in range(2, M + 1):
        ell = int(spf[m])
        k, rest = 0, m
        while rest % ell == 0:
            rest //= ell
            k += 1
        if rest > 1:
            an[m] = an[rest] * an[m // rest]
            continue
        a = ap[ell]
        if k == 1:
            an[m] = a
        elif ell in bad:
            an[m] = a * an[m // ell]
        else:
            an[m] = a * an[m // ell] - ell * an[m // (ell * ell)]
    return an


# --- central values -------------------------------------------------------

@dataclass
class LReport:
    label: str
    n: int
    conductor: int
    sign: int
    value: float
    derivative: float | None
    terms: int
    tail_bound: float
    sign_gap: float = 0.0
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.derivative is None:
            d.pop("derivative")
        return d


def _terms_needed(N: int, target: float, A: float) -> int:
    # the slowest weight is exp(-2 pi n / (A sqrt N)) for A >= 1
    c = 2 * math.pi / (A * math.sqrt(N))
    return int(math.log(4 / (target * (1 - math.exp(-c)))) / c) + 10


def _tail(N: int, M: int, A: float) -> float:
    # |a_n| <= d(n) sqrt(n) and d(n) <= 2 sqrt(n), so |a_n / n| <= 2
    c = 2 * math.pi / (A * math.sqrt(N))
    return 2 * 2 * math.exp(-c * (M + 1)) / (1 - math.exp(-c))


def _weighted_sum(an: np.ndarray, N: int, A: float, eps: int) -> float:
    n = np.arange(1, len(an), dtype=np.float64)
    s = math.sqrt(N)
    w = np.exp(-2 * math.pi * n * A / s) + eps * np.exp(-2 * math.pi * n / (A * s))
    return float(np.sum(an[1:] / n * w))


def root_number(an: np.ndarray, N: int, A: float = 1.2) -> tuple[int, float]:
    """The sign that makes the smoothed sum independent of the cut parameter.

    Returns the sign and the gap |mismatch(wrong sign)| - |mismatch(chosen)|.
    """
    mism = {}
    for eps in (1, -1):
        mism[eps] = abs(_weighted_sum(an, N, A, eps) - _weighted_sum(an, N, 1.0, eps))
    eps = min(mism, key=mism.get)
    return eps, mism[-eps] - mism[eps]


def l_value(n: int, order: int = 0, target_error: float = 1e-10, workers: int = 1,
            cache: ALCache | None = None, max_terms: int = 2_000_000) -> LReport:
    """L(E^n, 1), and L'(E^n, 1) when the sign is -1."""
    E = minimal_model(n)
    N = conductor(E)
    A = 1.2
    M = _terms_needed(N, target_error, A)
    if M > max_terms:
        raise ValueError(f"{M} terms needed, above the cap {max_terms}")
    bad = local_data(E)
    an = an_coefficients(n, M, workers, cache, bad)
    eps, gap = root_number(an, N, A)
    # for sign -1 the central value vanishes identically
    val = _weighted_sum(an, N, 1.0, 1) if eps == 1 else 0.0
    deriv = l_derivative(an, N) if eps == -1 else None
    report = LReport(E.label or f"E^{n}", n, N, eps, val, deriv, M, _tail(N, M, A), gap)
    if order == 1 and eps == 1:
        report.notes.append("sign +1: the first derivative is not the leading term and is not reported")
    return report


def l_derivative(an: np.ndarray, N: int, dps: int = 20) -> float:
    """L'(1) = 2 sum a_n / n E1(2 pi n / sqrt N) for sign -1."""
    with mpmath.workdps(dps):
        c = 2 * mpmath.pi / mpmath.sqrt(N)
        total = mpmath.mpf(0)
        for k in range(1, len(an)):
            a = an[k]
            if a:
                x = c * k
                if x > 200:
                    break
                total += mpmath.mpf(a) / k * mpmath.e1(x)
        return float(2 * total)


def expected_sign(p: int) -> int:
    """Root number of E^p for a prime p != 3 by the residue rule: -1 iff p = 4, 7, 8 (mod 9)."""
    return -1 if p % 9 in (4, 7, 8) else 1


# --- which of p, p^2 -------------------------------------------------------

class Classification(str, enum.Enum):
    P_ONLY = "POnly"
    P_SQUARED_ONLY = "PSquaredOnly"
    BOTH = "Both"
    NEITHER = "Neither"


@dataclass
class ClassifyReport:
    p: int
    classification: Classification
    L_9p: float
    L_9p2: float
    threshold: float
    ambiguous: bool
    label: str = "conjectural (BSD-conditional)"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["classification"] = self.classification.value
        return d


def classify_values(L_9p: float, L_9p2: float, scale: float = 1.0,
                    threshold: float = ZERO_THRESHOLD) -> tuple[Classification, bool]:
    """Case analysis on the two central values; values near the threshold set the ambiguity flag."""
    t = threshold * scale
    z9p, z9p2 = abs(L_9p) < t, abs(L_9p2) < t
    ambiguous = any(t / 10 <= abs(v) <= 10 * t for v in (L_9p, L_9p2))
    if not z9p2 and z9p:
        c = Classification.P_ONLY
    elif z9p2 and not z9p:
        c = Classification.P_SQUARED_ONLY
    elif not z9p2 and not z9p:
        c = Classification.BOTH
    else:
        c = Classification.NEITHER
        ambiguous = True
    return c, ambiguous


def classify(p: int, threshold: float = ZERO_THRESHOLD, workers: int = 1,
             cache: ALCache | None = None) -> ClassifyReport:
    """Nonvanishing of L(1, E^{9p^2}) puts a point on E^p; of L(1, E^{9p}) on E^{p^2}."""
    require_criterion_prime(p)
    r9p = l_value(9 * p, workers=workers, cache=cache)
    r9p2 = l_value(9 * p * p, workers=workers, cache=cache)
    scale = max(abs(r9p.value), abs(r9p2.value), 1.0)
    c, amb = classify_values(r9p.value, r9p2.value, scale, threshold)
    return ClassifyReport(p, c, r9p.value, r9p2.value, threshold, amb)
