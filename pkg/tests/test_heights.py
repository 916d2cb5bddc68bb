import json
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest

from cubesum.curves import O, Point, WeierstrassModel
from cubesum.heights import (
    NonMinimalModel,
    canonical_height,
    check_minimal,
    height_doubling_limit,
    minimal_model_x3,
    non_archimedean_term,
    torsion_order,
    transform_point,
)

FIXTURE = json.loads((Path(__file__).parent / "data" / "twisted_height.json").read_text())
E37 = WeierstrassModel(0, 0, 1, -1, 0)


@pytest.mark.parametrize("method", ["q", "tate"])
def test_37a1_regulator(method):
    # generator (0, 0); (1, 0) = 2P
    h = canonical_height(E37, Point(Fraction(1), Fraction(0)), 30, method)
    assert abs(h / 4 - mpmath.mpf("0.0511114082399688")) < 1e-14


@pytest.mark.parametrize("method", ["q", "tate"])
def test_quadratic_scaling(method):
    E = WeierstrassModel(0, 0, 0, 0, 17)
    P = Point(Fraction(-2), Fraction(3))
    with mpmath.workdps(30):
        h1 = canonical_height(E, P, 30, method)
        h2 = canonical_height(E, E.mul(2, P), 30, method)
        h3 = canonical_height(E, E.mul(3, P), 30, method)
        assert abs(h2 - 4 * h1) < 1e-20 and abs(h3 - 9 * h1) < 1e-20


def test_methods_and_doubling_agree():
    E = WeierstrassModel(0, 0, 0, 0, 17)
    P = Point(Fraction(8), Fraction(23))
    with mpmath.workdps(30):
        hq = canonical_height(E, P, 30, "q")
        assert abs(hq - canonical_height(E, P, 30, "tate")) < 1e-20
    assert abs(hq - height_doubling_limit(E, P, 6)) < 1e-3


def test_torsion_is_zero():
    E = WeierstrassModel(0, 0, 0, 0, 1)
    T = Point(Fraction(2), Fraction(3))
    assert torsion_order(E, T) == 6
    assert canonical_height(E, T) == 0.0
    assert canonical_height(E, O) == 0.0


def test_non_minimal_rejected():
    E = WeierstrassModel(0, 0, 0, 0, 17 * 2**6 * 3**6)
    with pytest.raises(NonMinimalModel):
        check_minimal(E)
    with pytest.raises(NonMinimalModel):
        canonical_height(E, Point(Fraction(-2 * 36), Fraction(3 * 216)))


def test_minimal_model_x3_shapes():
    E, urst = minimal_model_x3(-27 * 16 * 289)
    assert E.a_invariants == (0, 0, 1, 0, -1951)
    assert urst == (2, 0, 0, 4)
    E2, urst2 = minimal_model_x3(17 * 2**6)
    assert E2.a_invariants == (0, 0, 0, 0, 17) and urst2 == (2, 0, 0, 0)


def test_transform_point_lands_on_model():
    E, urst = minimal_model_x3(-124848)
    P = Point(Fraction(84), Fraction(684))
    assert WeierstrassModel(0, 0, 0, 0, -124848).contains(P)
    Q = transform_point(P, urst)
    assert Q == Point(Fraction(21), Fraction(85))
    assert E.contains(Q)


def test_non_archimedean_good_reduction_is_denominator():
    E = WeierstrassModel(0, 0, 0, 0, 17)
    P = E.mul(2, Point(Fraction(-2), Fraction(3)))
    d = Fraction(P.x).denominator
    for p in (2, 3, 5, 7):
        if d % p == 0:
            assert non_archimedean_term(E, P, p) > 0


def test_twisted_point_fixture():
    E = WeierstrassModel(*(Fraction(a) for a in FIXTURE["curve_a_invariants"]))
    P = Point(*(Fraction(c) for c in FIXTURE["point"]))
    assert E.contains(P)
    ref = mpmath.mpf(FIXTURE["height"])
    for method in ("q", "tate"):
        assert abs(canonical_height(E, P, 40, method) - ref) < 1e-6
    assert abs(height_doubling_limit(E, P, 6) - ref) < 1e-3
